# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
SAR scene preprocessing: VV/VH band fusion, circular focal-median speckle filtering,
single-threshold Canny edge detection, and Otsu thresholding (used by the baseline estimator).
"""

from __future__ import annotations
import math
import logging
import warnings
import dataclasses
import numpy as np
from numpy.typing import NDArray
from scipy import ndimage
from sarlevel.raster import Raster, RegionMask, RasterError, CRSMismatchError, ensure_same_grid, clip_stats


class PreprocessError(ValueError):
    pass


@dataclasses.dataclass(frozen=True, eq=False)
class EdgeRaster(Raster):
    """
    Retained gradient magnitudes at edge pixels, zero elsewhere.
    Every nonzero sample is at least the threshold that produced it.
    """

    threshold: float = 0.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.nodata is not None or np.any(self.values < 0):
            raise RasterError("Edge magnitudes shall be non-negative and have no nodata")

    def scaled(self, factor: float) -> EdgeRaster:
        return EdgeRaster(self.values * factor, self.transform, crs=self.crs, threshold=self.threshold * factor)


def combine_bands(vv: Raster, vh: Raster) -> Raster:
    """
    Elementwise product of the two polarizations as stored (no dB/linear conversion).
    Nodata in either input propagates. If the inputs use different sentinels, the output uses NaN.

    >>> from sarlevel.raster import GeoTransform
    >>> gt = GeoTransform(0, 1, 1, -1)
    >>> combine_bands(Raster(np.array([[-17.0]]), gt), Raster(np.array([[-22.0]]), gt)).values.tolist()
    [[374.0]]
    """
    ensure_same_grid(vv, vh)
    if vv.crs != vh.crs:
        raise CRSMismatchError(f"VV is in {vv.crs!r} but VH is in {vh.crs!r}")
    if vv.nodata is None or vh.nodata is None:
        nodata = vv.nodata if vh.nodata is None else vh.nodata
    elif vv.nodata == vh.nodata:
        nodata = vv.nodata
    else:
        nodata = math.nan
    valid = vv.valid & vh.valid
    product = np.where(valid, vv.masked(0.0) * vh.masked(0.0), nodata if nodata is not None else 0.0)
    return vv.replace(product, nodata=nodata)


def speckle_filter(image: Raster, radius: int) -> Raster:
    """
    Focal median over a circular window: all valid in-bounds pixels whose centers lie within
    the Euclidean distance ``radius`` (pixels) of the target center. Even-sized windows yield the mean
    of the two middle values. Windows shrink at the border instead of padding.
    """
    if radius < 0 or int(radius) != radius:
        raise PreprocessError(f"Kernel radius shall be a non-negative integer, got {radius}")
    radius = int(radius)
    if radius == 0:
        return image
    offsets = circular_offsets(radius)
    height, width = image.values.shape
    padded = np.pad(image.masked(), radius, mode="constant", constant_values=np.nan)
    out = np.empty((height, width), dtype=np.float64)
    block = max(1, _STACK_BUDGET // max(1, len(offsets) * width))
    for top in range(0, height, block):
        bottom = min(height, top + block)
        stack = np.stack(
            [
                padded[top + radius + dr : bottom + radius + dr, radius + dc : radius + dc + width]
                for dr, dc in offsets
            ]
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)  # All-NaN windows are expected around nodata.
            out[top:bottom] = np.nanmedian(stack, axis=0)
    empty = np.isnan(out)
    if empty.any():
        out[empty] = image.nodata if image.nodata is not None else math.nan
    _logger.debug("Speckle filter r=%d (%d px window) applied to %r", radius, len(offsets), image)
    return image.replace(out, nodata=image.nodata if image.nodata is not None or not empty.any() else math.nan)


_STACK_BUDGET = 4_000_000


def circular_offsets(radius: int) -> list[tuple[int, int]]:
    """
    >>> circular_offsets(1)
    [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    >>> len(circular_offsets(2)), len(circular_offsets(3))
    (13, 29)
    """
    return [
        (dr, dc)
        for dr in range(-radius, radius + 1)
        for dc in range(-radius, radius + 1)
        if dr * dr + dc * dc <= radius * radius
    ]


def gaussian_kernel(sigma: float) -> NDArray[np.float64]:
    """
    Normalized 1-D Gaussian with half-width ceil(3 sigma).

    >>> k = gaussian_kernel(1.0)
    >>> len(k), round(float(k.sum()), 12)
    (7, 1.0)
    """
    half = math.ceil(3.0 * sigma)
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(x**2) / (2.0 * sigma * sigma))
    return np.asarray(k / k.sum())


def smooth(values: NDArray[np.float64], valid: NDArray[np.bool_], sigma: float) -> NDArray[np.float64]:
    """
    Separable Gaussian smoothing by normalized convolution: weights of out-of-bounds and invalid pixels are
    dropped and the remaining weights renormalized. Pixels without any valid neighbor become NaN.
    """
    kernel = gaussian_kernel(sigma)
    num = np.where(valid, values, 0.0)
    den = valid.astype(np.float64)
    for axis in (1, 0):
        num = ndimage.correlate1d(num, kernel, axis=axis, mode="constant", cval=0.0)
        den = ndimage.correlate1d(den, kernel, axis=axis, mode="constant", cval=0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / den, np.nan)


def gradients(
    smoothed: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """
    Central differences (one-sided on the raster border), per pixel.
    Returns (d/drow, d/dcol, magnitude); undefined pixels get zero gradient.
    """
    if min(smoothed.shape) < 2:
        zero = np.zeros_like(smoothed)
        return zero, zero.copy(), zero.copy()
    gy, gx = np.gradient(smoothed)
    gy = np.nan_to_num(gy, nan=0.0)
    gx = np.nan_to_num(gx, nan=0.0)
    return gy, gx, np.hypot(gx, gy)


# (row, col) step for each of the 8 quantized gradient directions, counter-clockwise from +col.
_DIRECTIONS = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]

_NMS_RTOL = 1e-9


def suppress_non_maxima(
    magnitude: NDArray[np.float64], gy: NDArray[np.float64], gx: NDArray[np.float64]
) -> NDArray[np.bool_]:
    """
    Keeps pixels that are local maxima along the quantized gradient direction.
    A pixel shall be no smaller than its neighbor behind and strictly greater than its neighbor ahead
    (in the direction the gradient points to), so a tied pair keeps exactly one pixel.
    Differences below a relative tolerance count as ties. Off-raster neighbors are zero.
    """
    height, width = magnitude.shape
    padded = np.pad(magnitude, 1, mode="constant", constant_values=0.0)
    direction = np.rint(np.degrees(np.arctan2(gy, gx)) / 45.0).astype(np.int64) % 8
    tol = magnitude * _NMS_RTOL
    keep = np.zeros(magnitude.shape, dtype=bool)
    for d, (dr, dc) in enumerate(_DIRECTIONS):
        sel = direction == d
        if not sel.any():
            continue
        ahead = padded[1 + dr : 1 + dr + height, 1 + dc : 1 + dc + width]
        behind = padded[1 - dr : 1 - dr + height, 1 - dc : 1 - dc + width]
        keep |= sel & (magnitude >= behind - tol) & (magnitude > ahead + tol)
    return keep


def canny_edges(image: Raster, region: RegionMask, sigma: float = 1.0) -> EdgeRaster:
    """
    Gaussian smoothing, central-difference gradients, 4-sector non-maximum suppression,
    then every pixel whose magnitude is below half the standard deviation of the input over the region is dropped.
    No hysteresis. The output is zero outside the region.
    """
    if not sigma > 0:
        raise PreprocessError(f"Gaussian sigma shall be positive, got {sigma}")
    ensure_same_grid(image, region)
    stats = clip_stats(image, region)
    threshold = 0.5 * stats.stddev
    valid = image.valid
    # Centering leaves the gradients unchanged and makes constant inputs exactly zero after smoothing.
    centered = np.where(valid, image.values - stats.mean, 0.0)
    gy, gx, magnitude = gradients(smooth(centered, valid, sigma))
    keep = suppress_non_maxima(magnitude, gy, gx) & (magnitude >= threshold) & (magnitude > 0)
    keep &= region.bits & valid
    _logger.debug(
        "Canny sigma=%.3f threshold=%.6g (region stddev %.6g over %d px): %d edge pixels",
        sigma,
        threshold,
        stats.stddev,
        stats.count,
        np.count_nonzero(keep),
    )
    return EdgeRaster(np.where(keep, magnitude, 0.0), image.transform, crs=image.crs, threshold=threshold)


def otsu_threshold(image: Raster, region: RegionMask, bins: int = 256) -> float:
    """
    Histogram split maximizing the between-class variance over the region's valid samples.
    The histogram spans [min, max]; the returned value is the upper edge of the last bin of the lower class.
    Ties resolve to the lowest split.
    """
    if bins < 2:
        raise PreprocessError(f"At least two bins are required, got {bins}")
    ensure_same_grid(image, region)
    stats = clip_stats(image, region)
    if stats.max <= stats.min:
        raise PreprocessError("Otsu threshold is undefined for a constant region")
    samples = image.values[region.bits & image.valid]
    hist, edges = np.histogram(samples, bins=bins, range=(stats.min, stats.max))
    variance = between_class_variance(hist, edges)
    best = int(np.argmax(variance))
    _logger.debug("Otsu split after bin %d of %d: threshold %.6g", best, bins, edges[best + 1])
    return float(edges[best + 1])


def between_class_variance(hist: NDArray[np.int64], edges: NDArray[np.float64]) -> NDArray[np.float64]:
    """Between-class variance for a split after each bin except the last."""
    p = hist.astype(np.float64) / float(hist.sum())
    centers = 0.5 * (edges[:-1] + edges[1:])
    omega = np.cumsum(p)[:-1]
    mu = np.cumsum(p * centers)[:-1]
    mu_total = float(np.sum(p * centers))
    denom = omega * (1.0 - omega)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (mu_total * omega - mu) ** 2 / denom
    return np.where(denom > 0, out, 0.0)


_logger = logging.getLogger(__name__)


def _unittest_combine_bands() -> None:
    import pytest
    from sarlevel.raster import GeoTransform, GridMismatchError

    gt = GeoTransform(0.0, 2.0, 1.0, -1.0)
    vv = Raster(np.array([[-17.0, 2.0], [3.0, -9999.0]]), gt, nodata=-9999.0)
    vh = Raster(np.array([[-22.0, -9999.0], [1.0, 1.0]]), gt, nodata=-9999.0)
    out = combine_bands(vv, vh)
    assert out.nodata == -9999.0
    assert out.valid.tolist() == [[True, False], [True, False]]
    assert out.values[0, 0] == 374.0 and out.values[1, 0] == 3.0
    assert combine_bands(vh, vv) == out

    ones = Raster(np.ones((2, 2)), gt)
    assert combine_bands(ones, vh) == vh

    other = Raster(np.ones((2, 2)), GeoTransform(1.0, 2.0, 1.0, -1.0))
    with pytest.raises(GridMismatchError):
        combine_bands(ones, other)

    mixed = combine_bands(vv, Raster(np.ones((2, 2)), gt, nodata=-1.0))
    assert mixed.nodata is not None and math.isnan(mixed.nodata)


def _unittest_speckle_filter() -> None:
    from sarlevel.raster import GeoTransform

    gt = GeoTransform(0.0, 5.0, 1.0, -1.0)
    spike = np.zeros((5, 5))
    spike[2, 2] = 100.0
    r = Raster(spike, gt)
    assert speckle_filter(r, 0) is r
    assert np.all(speckle_filter(r, 1).values == 0.0)

    const = Raster(np.full((5, 5), -13.0), gt)
    for radius in range(4):
        assert speckle_filter(const, radius) == const

    # Corner window with radius 1 holds 3 pixels; two of them nodata leaves one.
    holes = np.arange(25.0).reshape(5, 5)
    holes[0, 1] = holes[1, 0] = -1.0
    out = speckle_filter(Raster(holes, gt, nodata=-1.0), 1)
    assert out.values[0, 0] == 0.0
    assert out.values[1, 1] == 7.0  # 6, 7, 11 remain

    row = speckle_filter(Raster(np.array([[1.0, 2.0, 3.0, 40.0]]), gt), 1)
    assert row.values.tolist() == [[1.5, 2.0, 3.0, 21.5]]


def _unittest_canny() -> None:
    import pytest
    from sarlevel.raster import GeoTransform, EmptyRegionError

    gt = GeoTransform(0.0, 16.0, 1.0, -1.0)
    everything = RegionMask(np.ones((16, 16), dtype=bool), gt)

    flat = canny_edges(Raster(np.full((16, 16), 3.7), gt), everything)
    assert not flat.values.any() and flat.threshold == 0.0

    step = np.zeros((16, 16))
    step[:, 8:] = 10.0
    edges = canny_edges(Raster(step, gt), everything)
    assert edges.threshold == pytest.approx(2.5)
    cols = set(np.nonzero(edges.values)[1].tolist())
    assert len(cols) == 1 and cols <= {7, 8}
    assert np.all(edges.values[edges.values > 0] >= edges.threshold)

    half = RegionMask(np.arange(16)[None, :].repeat(16, 0) >= 8, gt)
    clipped = canny_edges(Raster(step, gt), half)
    assert not clipped.values[:, :8].any()

    with pytest.raises(EmptyRegionError):
        canny_edges(Raster(step, gt), RegionMask(np.zeros((16, 16), dtype=bool), gt))
    with pytest.raises(PreprocessError):
        canny_edges(Raster(step, gt), everything, sigma=0.0)


def _unittest_otsu() -> None:
    import pytest
    from sarlevel.raster import GeoTransform

    gt = GeoTransform(0.0, 4.0, 1.0, -1.0)
    everything = RegionMask(np.ones((4, 4), dtype=bool), gt)
    bimodal = Raster(np.array([[0.0, 100.0] * 2] * 4), gt)
    assert 0.0 < otsu_threshold(bimodal, everything) < 100.0

    quad = Raster(np.array([[0.0] * 4, [1.0] * 4, [9.0] * 4, [10.0] * 4]), gt)
    assert 1.0 < otsu_threshold(quad, everything) < 9.0
    assert 1.0 < otsu_threshold(quad, everything, bins=10) < 9.0

    with pytest.raises(PreprocessError):
        otsu_threshold(Raster(np.full((4, 4), 5.0), gt), everything)
