# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import math
import datetime
import numpy as np
import pytest
from sarlevel.raster import Raster, RegionMask, GeoTransform
from sarlevel.preprocess import EdgeRaster, smooth, gradients, canny_edges
from sarlevel.floodsim import water_mask
from sarlevel.estimator import Prepared, ShorelineFitness, search
from sarlevel.metrics import Pair, evaluate

_GT = GeoTransform(0.0, 0.0, 1.0, -1.0)


def _unittest_water_mask_is_monotone() -> None:
    rng = np.random.default_rng(3001)
    for case in range(500):
        shape = (int(rng.integers(1, 33)), int(rng.integers(1, 33)))
        values = rng.normal(100, 10, shape)
        holes = rng.random(shape) < 0.05
        values[holes] = np.nan
        dem = Raster(values, _GT, nodata=math.nan)
        region = RegionMask(rng.random(shape) < 0.8, _GT)
        a, b = sorted(rng.uniform(70, 130, 2))
        low, high = water_mask(dem, float(a), region).bits, water_mask(dem, float(b), region).bits
        assert not (low & ~high).any(), f"case {case}"
        assert not (high & holes).any()
        assert not (high & ~region.bits).any()


def _random_prepared(rng: np.random.Generator) -> Prepared:
    size = int(rng.integers(6, 20))
    dem = Raster(np.round(rng.uniform(0.0, 10.0, (size, size)), 1), _GT)
    edges = EdgeRaster(np.where(rng.random((size, size)) < 0.3, rng.uniform(0.5, 5.0, (size, size)), 0.0), _GT)
    bits = np.zeros((size, size), dtype=bool)
    bits[1:-1, 1:-1] = True
    region = RegionMask(bits, _GT)
    return Prepared(
        grid=dem.grid,
        aoi=region,
        region=region,
        dem=dem,
        filtered=dem,
        edges=edges,
        lower=0.0,
        upper=10.0,
        connectivity=8,
    )


def _unittest_argmax_is_invariant_under_edge_scaling() -> None:
    rng = np.random.default_rng(3002)
    for case in range(100):
        prepared = _random_prepared(rng)
        # Powers of two keep every sum exact, so even ties are preserved.
        factor = 2.0 ** int(rng.integers(-10, 11))
        base = ShorelineFitness(prepared)
        scaled = ShorelineFitness(prepared, prepared.edges.scaled(factor))
        levels = [float(x) for x in prepared.contours()]
        assert max(levels, key=lambda x: (base(x).fitness, -x)) == max(levels, key=lambda x: (scaled(x).fitness, -x))
        a = search(prepared.lower, prepared.upper, base, 9, 0.05)
        b = search(prepared.lower, prepared.upper, scaled, 9, 0.05)
        assert a.level == b.level, f"case {case}"
        assert [it.best_level for it in a.iterations] == [it.best_level for it in b.iterations]


def _unittest_smoothed_gradients_of_quadratic_field() -> None:
    rng = np.random.default_rng(3003)
    rows, cols = np.mgrid[0:40, 0:50].astype(np.float64)
    for sigma in (0.7, 1.0, 2.0):
        a, b, c = rng.uniform(-1, 1, 3)
        r0, c0 = rng.uniform(0, 40), rng.uniform(0, 50)
        y, x = rows - r0, cols - c0
        field = a * y**2 + b * x**2 + c * x * y
        gy, gx, magnitude = gradients(smooth(field, np.ones(field.shape, dtype=bool), sigma))
        # Smoothing a quadratic adds a constant; central differences of a quadratic are exact.
        ey, ex = 2 * a * y + c * x, 2 * b * x + c * y
        m = math.ceil(3 * sigma) + 1
        inner = (slice(m, -m), slice(m, -m))
        scale = max(1.0, float(np.max(np.hypot(ex, ey)[inner])))
        assert np.max(np.abs(gy[inner] - ey[inner])) <= 1e-6 * scale
        assert np.max(np.abs(gx[inner] - ex[inner])) <= 1e-6 * scale
        assert np.max(np.abs(magnitude[inner] - np.hypot(ex, ey)[inner])) <= 1e-6 * scale


def _unittest_canny_threshold_and_constant_input() -> None:
    region = RegionMask(np.ones((10, 12), dtype=bool), _GT)
    constant = canny_edges(Raster(np.full((10, 12), 400.0), _GT), region)
    assert not constant.values.any()
    assert constant.threshold == 0.0

    # Half the pixels at 0 and half at 20: standard deviation 10.
    values = np.zeros((10, 12))
    values[:, 6:] = 20.0
    edges = canny_edges(Raster(values, _GT), region)
    assert edges.threshold == 5.0
    assert edges.values.any()
    assert np.all(edges.values[edges.values > 0] >= 5.0)


def _random_pairs(rng: np.random.Generator, n: int) -> list[Pair]:
    d = datetime.date(2000, 1, 1)
    ref = rng.normal(300, 5, n)
    est = ref + rng.normal(0, rng.uniform(0.01, 3), n)
    return [Pair(d + datetime.timedelta(days=i), float(e), float(r)) for i, (e, r) in enumerate(zip(est, ref))]


def _unittest_metric_inequalities() -> None:
    rng = np.random.default_rng(3004)
    for _ in range(1000):
        pairs = _random_pairs(rng, int(rng.integers(2, 30)))
        report = evaluate(pairs)
        assert report.rmse >= report.mae >= 0
        assert report.n_dates == len(pairs)


def _unittest_metric_invariances() -> None:
    rng = np.random.default_rng(3005)
    for _ in range(200):
        pairs = _random_pairs(rng, int(rng.integers(3, 30)))
        report = evaluate(pairs)
        shuffled = evaluate([pairs[i] for i in rng.permutation(len(pairs))])
        assert shuffled.mae == pytest.approx(report.mae, rel=1e-12)
        assert shuffled.rmse == pytest.approx(report.rmse, rel=1e-12)
        assert shuffled.r2 == pytest.approx(report.r2, rel=1e-9)

        offset = float(rng.uniform(-100, 100))
        moved = evaluate([Pair(p.date, p.estimate + offset, p.reference + offset) for p in pairs])
        assert moved.r2 == pytest.approx(report.r2, rel=1e-6, abs=1e-9)
        assert moved.mae == pytest.approx(report.mae, rel=1e-6, abs=1e-9)

    perfect = evaluate([Pair(p.date, p.reference, p.reference) for p in _random_pairs(rng, 10)])
    assert perfect.r2 == 1.0 and perfect.rmse == 0.0
