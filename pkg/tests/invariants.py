# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Invariants of the estimator and of its building blocks that hold for any input, checked on seeded random
and synthetic data.
"""

from __future__ import annotations
import numpy as np
import pytest
from sarlevel.raster import Raster, RegionMask, GeoTransform, dilate_mask
from sarlevel.preprocess import gradients, suppress_non_maxima
from sarlevel.floodsim import shoreline
from sarlevel.scene import Scene
from sarlevel.synth import SynthParams, make_scene, brute_force_level
from sarlevel.estimator import EstimatorConfig, ShorelineFitness, estimate_level, evaluate_level, prepare

_GT = GeoTransform(0.0, 0.0, 1.0, -1.0)


def _flat_backscatter(scene: Scene, db: float) -> Scene:
    """Same DEM and outline, featureless radar image."""
    flat = np.full(scene.vv.values.shape, db)
    return Scene(scene.vv.replace(flat), scene.vh.replace(flat), scene.dem, scene.aoi, scene.date, scene.reference)


def _unittest_level_stays_within_dem_range_without_edges() -> None:
    config = EstimatorConfig(tolerance=0.1)
    scene = _flat_backscatter(make_scene(SynthParams()), -10.0)
    prepared = prepare(scene, config)
    assert not prepared.edges.values.any()
    result = estimate_level(scene, config, prepared=prepared)
    assert result.dem_min == prepared.lower and result.dem_max == prepared.upper
    assert result.dem_min <= result.level <= result.dem_max
    assert result.level == pytest.approx(result.dem_min, abs=1e-9)
    assert result.trace is not None
    assert all(result.dem_min <= it.best_level <= result.dem_max for it in result.trace.iterations)
    # The dense sweep breaks the all-zero tie at the bottom of the range as well.
    assert brute_force_level(scene, config, 0.01) == result.dem_min


def _unittest_level_stays_within_dem_range_on_synthetic_scenes() -> None:
    config = EstimatorConfig(sample_num=9, tolerance=0.1)
    for seed in range(6):
        params = SynthParams(size=48, true_level=10.5 + 0.4 * seed, salt_probability=0.05, seed=seed)
        result = estimate_level(make_scene(params), config)
        assert result.dem_min <= result.level <= result.dem_max, seed


def _unittest_constant_dem_through_pipeline() -> None:
    scene = make_scene(SynthParams(size=32, seed=3))
    plateau = Scene(scene.vv, scene.vh, scene.dem.replace(np.full(scene.dem.values.shape, 50.0)), scene.aoi)
    result = estimate_level(plateau, EstimatorConfig())
    assert result.level == 50.0
    assert result.dem_min == result.dem_max == 50.0
    assert result.trace is not None and len(result.trace.iterations) == 1
    assert set(result.trace.iterations[0].candidates) == {50.0}


def _unittest_sar_without_crs_accepts_projected_dem() -> None:
    config = EstimatorConfig(sample_num=17, tolerance=0.1)
    scene = make_scene(SynthParams(size=48, salt_probability=0.02, seed=11))
    assert scene.dem.crs == "EPSG:32633"
    bare = Scene(
        Raster(scene.vv.values, scene.vv.transform),
        Raster(scene.vh.values, scene.vh.transform),
        scene.dem,
        scene.aoi,
    )
    assert bare.vv.crs == ""
    assert estimate_level(bare, config).level == estimate_level(scene, config).level


def _unittest_trace_replays_against_fitness() -> None:
    config = EstimatorConfig(sample_num=17, tolerance=0.05)
    scene = make_scene(SynthParams(size=64, salt_probability=0.02, seed=7))
    prepared = prepare(scene, config)
    result = estimate_level(scene, config, prepared=prepared)
    assert result.trace is not None
    replayed = 0
    for it in result.trace.iterations:
        for level, value, size in zip(it.candidates, it.values, it.shoreline_sizes):
            e = evaluate_level(level, prepared.dem, prepared.edges, prepared.region, prepared.connectivity)
            assert e.fitness == pytest.approx(value, rel=1e-12, abs=1e-12), level
            assert e.shoreline_size == size, level
            replayed += 1
    assert replayed == 17 * len(result.trace.iterations)


def _unittest_dense_sweep_granularity() -> None:
    config = EstimatorConfig(speckle_radius=1)
    base = make_scene(SynthParams(size=48, true_level=11.5, water_stddev=0.0, land_stddev=0.0))
    # Contours spaced 0.1 m apart, wider than either sweep step, so both sweeps visit every contour.
    dem = base.dem.replace(np.round(base.dem.values, 1))
    scene = Scene(base.vv, base.vh, dem, base.aoi)
    coarse = brute_force_level(scene, config, 0.05)
    fine = brute_force_level(scene, config, 0.025)
    assert abs(coarse - fine) <= 0.05 + 1e-9
    objective = ShorelineFitness(prepare(scene, config))
    assert objective(coarse).fitness == objective(fine).fitness > 0


def _unittest_true_level_is_optimal_on_clean_valley() -> None:
    config = EstimatorConfig()
    params = SynthParams(size=64, shape="valley", true_level=12.0, water_stddev=0.0, land_stddev=0.0)
    prepared = prepare(make_scene(params), config)
    objective = ShorelineFitness(prepared)
    contours = [float(x) for x in prepared.contours()]
    best = objective(params.true_level).fitness
    assert best > 0
    for level in contours:
        assert objective(level).fitness <= best, level


def _unittest_dilation_is_monotone_and_translation_invariant() -> None:
    rng = np.random.default_rng(4001)
    for case in range(200):
        bits = np.zeros((40, 40), dtype=bool)
        bits[10:30, 10:30] = rng.random((20, 20)) < float(rng.uniform(0.01, 0.2))
        bits[20, 20] = True
        mask = RegionMask(bits, _GT)
        near, far = sorted(float(x) for x in rng.uniform(0.0, 5.0, 2))
        small, large = dilate_mask(mask, near).bits, dilate_mask(mask, far).bits
        assert not (bits & ~small).any(), f"case {case}"
        assert not (small & ~large).any(), f"case {case}"

        subset = RegionMask(bits & (rng.random(bits.shape) < 0.5), _GT)
        assert not (dilate_mask(subset, far).bits & ~large).any(), f"case {case}"

        dr, dc = (int(x) for x in rng.integers(-4, 5, 2))
        moved = RegionMask(np.roll(bits, (dr, dc), axis=(0, 1)), _GT)
        expected = np.roll(large, (dr, dc), axis=(0, 1))
        assert np.array_equal(dilate_mask(moved, far).bits, expected), f"case {case}"


def _unittest_non_maximum_suppression_on_ramps() -> None:
    rng = np.random.default_rng(4002)
    for case in range(100):
        center, width = float(rng.uniform(8.0, 24.0)), float(rng.uniform(1.5, 6.0))
        sign = float(rng.choice([-1.0, 1.0]))
        profile = sign * np.clip((np.arange(32) - center) / width, -1.0, 1.0)
        image = np.tile(profile, (24, 1))
        if case % 2:
            image = image.T
        gy, gx, magnitude = gradients(image)
        keep = suppress_non_maxima(magnitude, gy, gx)
        lines = (keep, magnitude) if case % 2 == 0 else (keep.T, magnitude.T)
        for row_keep, row_mag in zip(*lines):
            (kept,) = np.flatnonzero(row_keep)
            assert row_mag[kept] >= row_mag.max() * (1 - 1e-6), f"case {case}"


def _unittest_shoreline_erosion_shrinks_bounds() -> None:
    rng = np.random.default_rng(4003)
    for case in range(300):
        shape = (int(rng.integers(3, 25)), int(rng.integers(3, 25)))
        component = RegionMask(rng.random(shape) < float(rng.uniform(0.3, 0.95)), _GT)
        line = np.zeros(shape, dtype=bool)
        for r, c in shoreline(component):
            line[r, c] = True
        assert not (line & ~component.bits).any(), f"case {case}"
        outer = component.bounds()
        inner = component.replace(component.bits & ~line).bounds()
        if outer is None or inner is None:
            continue
        for o, i in zip(outer, inner):
            assert o.start + 1 <= i.start and i.stop <= o.stop - 1, f"case {case}"
