# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import math
import logging
from typing import Literal
import numpy as np
from numpy.typing import NDArray
from scipy import ndimage
from ._types import Raster, RegionMask, Polygon, Grid, RegionStats
from ._types import RasterError, EmptyRegionError, CRSMismatchError, ensure_same_grid


Resampling = Literal["nearest", "bilinear"]


def rasterize_polygon(poly: Polygon, grid: Grid) -> RegionMask:
    """
    A pixel is inside iff its center is inside the polygon under the even-odd rule.
    Holes need no special treatment because every ring contributes crossings.
    A center lying exactly on a boundary is resolved by the strict inequality of the crossing test,
    which makes the outcome deterministic.
    """
    for idx, ring in enumerate(poly.rings):
        if _ring_area(ring) == 0.0:
            raise RasterError(f"Ring #{idx} is degenerate (collinear vertices)")
    xs, ys = grid.transform.pixel_centers(grid.width, grid.height)
    px, py = np.meshgrid(xs, ys)
    inside = np.zeros(grid.shape, dtype=bool)
    for ring in poly.rings:
        for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
            if y1 == y2:
                continue  # Horizontal edges never produce a crossing.
            straddles = (y1 > py) != (y2 > py)
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddles & (px < x_cross)
    _logger.debug("Rasterized polygon onto %r: %d pixels inside", grid, np.count_nonzero(inside))
    return RegionMask(inside, grid.transform)


def _ring_area(ring: tuple[tuple[float, float], ...]) -> float:
    xy = np.asarray(ring, dtype=np.float64)
    return float(0.5 * abs(np.dot(xy[:-1, 0], xy[1:, 1]) - np.dot(xy[1:, 0], xy[:-1, 1])))


def dilate_mask(mask: RegionMask, distance: float) -> RegionMask:
    """
    A pixel becomes true if its center is within the Euclidean distance (map units)
    of the center of some true pixel. Non-square pixels are honored.
    """
    if not distance >= 0:
        raise RasterError(f"Dilation distance shall be non-negative, got {distance}")
    if distance == 0 or not mask.bits.any():
        return mask
    sampling = (abs(mask.transform.pixel_height), mask.transform.pixel_width)
    dist = ndimage.distance_transform_edt(~mask.bits, sampling=sampling)
    return mask.replace(dist <= distance * (1 + _DISTANCE_RTOL))


_DISTANCE_RTOL = 1e-12


def clip_stats(raster: Raster, mask: RegionMask) -> RegionStats:
    ensure_same_grid(raster, mask)
    samples = raster.values[mask.bits & raster.valid]
    if samples.size == 0:
        raise EmptyRegionError("The region contains no valid samples")
    lo, hi = float(np.min(samples)), float(np.max(samples))
    return RegionStats(
        min=lo,
        max=hi,
        mean=min(max(float(np.mean(samples)), lo), hi),
        stddev=float(np.std(samples)) if hi > lo else 0.0,
        count=int(samples.size),
    )


def align_to(source: Raster, target: Grid, method: Resampling = "nearest", target_crs: str | None = None) -> Raster:
    """
    Resamples the source onto the target grid without reprojection.
    Target pixels whose neighborhood falls outside the source or onto nodata become nodata;
    if the source has no nodata sentinel, NaN is used when needed.
    An empty CRS on either side is unknown and not compared.
    """
    if target_crs and source.crs and target_crs != source.crs:
        raise CRSMismatchError(f"Cannot align {source.crs!r} to {target_crs!r}: reprojection is not supported")
    if source.grid == target:
        return source
    st, tt = source.transform, target.transform
    xs, ys = tt.pixel_centers(target.width, target.height)
    # Fractional source indices where integers are source pixel centers.
    cols = (xs - st.origin_x) / st.pixel_width - 0.5
    rows = (ys - st.origin_y) / st.pixel_height - 0.5
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    if method == "nearest":
        values, ok = _sample_nearest(source, rr, cc)
    elif method == "bilinear":
        values, ok = _sample_bilinear(source, rr, cc)
    else:
        raise RasterError(f"Unknown resampling method: {method!r}")
    nodata = source.nodata
    if not ok.all() and nodata is None:
        nodata = math.nan
    out = np.where(ok, values, nodata if nodata is not None else 0.0)
    _logger.debug("Aligned %r onto %r using %s; %d pixels uncovered", source, target, method, np.count_nonzero(~ok))
    return Raster(out, tt, nodata=nodata, crs=source.crs)


def _sample_nearest(
    source: Raster, rr: NDArray[np.float64], cc: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    # Half-way points resolve to the higher index.
    ri = np.floor(rr + 0.5).astype(np.int64)
    ci = np.floor(cc + 0.5).astype(np.int64)
    inb = (ri >= 0) & (ri < source.height) & (ci >= 0) & (ci < source.width)
    ri_c = np.clip(ri, 0, source.height - 1)
    ci_c = np.clip(ci, 0, source.width - 1)
    ok = inb & source.valid[ri_c, ci_c]
    return source.values[ri_c, ci_c], ok


def _sample_bilinear(
    source: Raster, rr: NDArray[np.float64], cc: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    eps = 1e-9
    inb = (rr >= -eps) & (rr <= source.height - 1 + eps) & (cc >= -eps) & (cc <= source.width - 1 + eps)
    coords = np.stack([np.clip(rr, 0, source.height - 1), np.clip(cc, 0, source.width - 1)])
    valid = source.valid.astype(np.float64)
    filled = np.where(source.valid, source.values, 0.0)
    values = ndimage.map_coordinates(filled, coords, order=1, mode="nearest")
    coverage = ndimage.map_coordinates(valid, coords, order=1, mode="nearest")
    # Any nodata neighbor with nonzero weight invalidates the sample.
    return values, inb & (coverage >= 1.0 - eps)


_logger = logging.getLogger(__name__)


def _unittest_rasterize() -> None:
    import pytest
    from ._types import GeoTransform

    grid = Grid(GeoTransform(0.0, 4.0, 1.0, -1.0), 4, 4)
    left = rasterize_polygon(Polygon.rectangle(0.0, 0.0, 2.0, 4.0), grid)
    assert left.bits.tolist() == [[True, True, False, False]] * 4

    small = Grid(GeoTransform(0.0, 2.0, 1.0, -1.0), 2, 2)
    assert rasterize_polygon(Polygon.rectangle(0.0, 0.0, 2.0, 2.0), small).bits.all()
    assert not rasterize_polygon(Polygon.rectangle(10.0, 10.0, 12.0, 12.0), small).bits.any()

    holed = Polygon.from_rings(
        [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0), (0.0, 0.0)],
        [(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0), (1.0, 1.0)],
    )
    bits = rasterize_polygon(holed, grid).bits
    assert bits.sum() == 12 and not bits[1:3, 1:3].any()

    with pytest.raises(RasterError):
        rasterize_polygon(Polygon.from_rings([(0, 0), (1, 1), (2, 2), (0, 0)]), grid)


def _unittest_dilate() -> None:
    import pytest
    from ._types import GeoTransform

    bits = np.zeros((9, 9), dtype=bool)
    bits[4, 4] = True
    mask = RegionMask(bits, GeoTransform(0.0, 9.0, 1.0, -1.0))
    assert dilate_mask(mask, 0.0) == mask
    assert dilate_mask(mask, 2.0).count == 13
    with pytest.raises(RasterError):
        dilate_mask(mask, -1.0)

    bits = np.zeros((121, 121), dtype=bool)
    bits[60, 60] = True
    mask = RegionMask(bits, GeoTransform(0.0, 1210.0, 10.0, -10.0))
    out = dilate_mask(mask, 500.0).bits
    rr, cc = np.mgrid[0:121, 0:121]
    assert np.array_equal(out, (rr - 60) ** 2 + (cc - 60) ** 2 <= 50**2)


def _unittest_clip_stats() -> None:
    import pytest
    from ._types import GeoTransform

    gt = GeoTransform(0.0, 2.0, 1.0, -1.0)
    everything = RegionMask(np.ones((2, 2), dtype=bool), gt)
    st = clip_stats(Raster(np.array([[1.0, 2.0], [3.0, 4.0]]), gt), everything)
    assert (st.min, st.max, st.mean, st.count) == (1.0, 4.0, 2.5, 4)
    assert st.stddev == pytest.approx(1.1180, abs=1e-4)

    st = clip_stats(Raster(np.full((2, 2), 7.0), gt), everything)
    assert (st.min, st.max, st.mean, st.stddev) == (7.0, 7.0, 7.0, 0.0)

    with pytest.raises(EmptyRegionError):
        clip_stats(Raster(np.full((2, 2), -1.0), gt, nodata=-1.0), everything)


def _unittest_align() -> None:
    import pytest
    from ._types import GeoTransform

    src = Raster(np.arange(16.0).reshape(4, 4), GeoTransform(0.0, 4.0, 1.0, -1.0), crs="EPSG:32633")
    assert align_to(src, src.grid) is src
    half = align_to(src, Grid(GeoTransform(0.0, 4.0, 2.0, -2.0), 2, 2))
    # Target centers sit exactly between source centers; ties go to the higher index.
    assert half.values.tolist() == [[5.0, 7.0], [13.0, 15.0]]
    assert half.nodata is None

    ramp = Raster(np.add.outer(np.arange(5.0) * 3.0, np.arange(5.0) * 2.0), GeoTransform(0.0, 5.0, 1.0, -1.0))
    shifted = align_to(ramp, Grid(GeoTransform(0.75, 4.5, 1.0, -1.0), 3, 3), "bilinear")
    xs, ys = shifted.transform.pixel_centers(3, 3)
    expected = np.add.outer((4.5 - ys) * 3.0, (xs - 0.5) * 2.0)
    assert np.allclose(shifted.values, expected, rtol=0, atol=1e-12)

    outside = align_to(src, Grid(GeoTransform(2.0, 4.0, 1.0, -1.0), 4, 1))
    assert outside.nodata is not None and outside.valid.tolist() == [[True, True, False, False]]

    with pytest.raises(CRSMismatchError):
        align_to(src, src.grid, target_crs="EPSG:4326")
    assert align_to(src, src.grid, target_crs="") is src
    assert align_to(ramp, ramp.grid, target_crs="EPSG:4326") is ramp
