# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import math
import dataclasses
from typing import Optional, Sequence
import numpy as np
from numpy.typing import NDArray
import rasterio.transform


class RasterError(ValueError):
    pass


class GridMismatchError(RasterError):
    pass


class EmptyRegionError(RasterError):
    pass


class CRSMismatchError(RasterError):
    pass


@dataclasses.dataclass(frozen=True)
class GeoTransform:
    """
    North-up affine georeferencing of a grid: the map coordinates of the outer corner of pixel (0, 0)
    and the signed pixel size. Rotation/shear terms are not supported.

    >>> gt = GeoTransform(500.0, 1000.0, 10.0, -10.0)
    >>> gt.pixel_to_map(0, 0)
    (505.0, 995.0)
    >>> gt.map_to_pixel(*gt.pixel_to_map(7, 3))
    (7, 3)
    """

    origin_x: float
    origin_y: float
    pixel_width: float
    pixel_height: float

    def __post_init__(self) -> None:
        if not (self.pixel_width > 0 and math.isfinite(self.pixel_width)):
            raise RasterError(f"Pixel width shall be positive, got {self.pixel_width}")
        if not (self.pixel_height != 0 and math.isfinite(self.pixel_height)):
            raise RasterError(f"Pixel height shall be nonzero, got {self.pixel_height}")
        if not (math.isfinite(self.origin_x) and math.isfinite(self.origin_y)):
            raise RasterError("Origin shall be finite")

    def pixel_to_map(self, row: float, col: float) -> tuple[float, float]:
        """Map coordinates (x, y) of the pixel center."""
        return (
            self.origin_x + (col + 0.5) * self.pixel_width,
            self.origin_y + (row + 0.5) * self.pixel_height,
        )

    def map_to_pixel(self, x: float, y: float) -> tuple[int, int]:
        """Index (row, col) of the pixel containing the point."""
        return (
            math.floor((y - self.origin_y) / self.pixel_height),
            math.floor((x - self.origin_x) / self.pixel_width),
        )

    def pixel_centers(self, width: int, height: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Arrays of X coordinates per column and Y coordinates per row."""
        xs = self.origin_x + (np.arange(width, dtype=np.float64) + 0.5) * self.pixel_width
        ys = self.origin_y + (np.arange(height, dtype=np.float64) + 0.5) * self.pixel_height
        return xs, ys

    def to_affine(self) -> rasterio.Affine:
        return rasterio.Affine(self.pixel_width, 0.0, self.origin_x, 0.0, self.pixel_height, self.origin_y)

    @staticmethod
    def from_affine(affine: rasterio.Affine) -> GeoTransform:
        if affine.b != 0 or affine.d != 0:
            raise RasterError(f"Rotated or sheared transforms are not supported: {affine!r}")
        return GeoTransform(
            origin_x=float(affine.c),
            origin_y=float(affine.f),
            pixel_width=float(affine.a),
            pixel_height=float(affine.e),
        )

    def shifted(self, rows: int, cols: int) -> GeoTransform:
        """Same grid geometry with the origin moved to the corner of pixel (rows, cols)."""
        return dataclasses.replace(
            self,
            origin_x=self.origin_x + cols * self.pixel_width,
            origin_y=self.origin_y + rows * self.pixel_height,
        )

    @staticmethod
    def from_origin(west: float, north: float, pixel_size: float) -> GeoTransform:
        return GeoTransform.from_affine(rasterio.transform.from_origin(west, north, pixel_size, pixel_size))


@dataclasses.dataclass(frozen=True)
class Grid:
    transform: GeoTransform
    width: int
    height: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width


def _frozen(array: NDArray[np.generic]) -> NDArray[np.generic]:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(frozen=True, eq=False)
class Raster:
    """
    Single-band grid of float64 samples. Samples are stored row-major with shape (height, width).
    Every sample is either finite or equal to the nodata sentinel (NaN sentinel matches NaN samples).
    The array is made read-only upon construction so that instances can be shared between workers.
    """

    values: NDArray[np.float64]
    transform: GeoTransform
    nodata: Optional[float] = None
    crs: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise RasterError(f"Raster values shall be two-dimensional, got shape {values.shape}")
        object.__setattr__(self, "values", _frozen(values))
        if self.nodata is not None:
            object.__setattr__(self, "nodata", float(self.nodata))
        if not np.all(np.isfinite(values) | ~self.valid):
            raise RasterError("Raster contains non-finite samples that are not marked as nodata")

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def grid(self) -> Grid:
        return Grid(self.transform, self.width, self.height)

    @property
    def valid(self) -> NDArray[np.bool_]:
        """True where the sample is not nodata."""
        if self.nodata is None:
            return np.ones(self.values.shape, dtype=bool)
        if math.isnan(self.nodata):
            return ~np.isnan(self.values)
        return np.asarray(self.values != self.nodata)

    def masked(self, fill: float = math.nan) -> NDArray[np.float64]:
        """A writable copy of the samples where nodata is replaced with the fill value."""
        return np.where(self.valid, self.values, fill)

    def replace(self, values: NDArray[np.float64], nodata: Optional[float] = None) -> Raster:
        """New raster on the same grid and CRS."""
        return Raster(values, self.transform, nodata=nodata, crs=self.crs)

    def window(self, rows: slice, cols: slice) -> Raster:
        """Sub-raster with a correspondingly shifted transform. Slices shall have unit step."""
        return Raster(
            self.values[rows, cols],
            self.transform.shifted(rows.start or 0, cols.start or 0),
            nodata=self.nodata,
            crs=self.crs,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        same_nodata = (self.nodata == other.nodata) or (
            self.nodata is not None
            and other.nodata is not None
            and math.isnan(self.nodata)
            and math.isnan(other.nodata)
        )
        return (
            same_nodata
            and self.transform == other.transform
            and self.crs == other.crs
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values, equal_nan=True))
        )

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        return f"Raster({self.width}x{self.height}, nodata={self.nodata}, crs={self.crs!r}, {self.transform})"


@dataclasses.dataclass(frozen=True, eq=False)
class RegionMask:
    bits: NDArray[np.bool_]
    transform: GeoTransform

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise RasterError(f"Mask shall be two-dimensional, got shape {bits.shape}")
        object.__setattr__(self, "bits", _frozen(bits))

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def grid(self) -> Grid:
        return Grid(self.transform, self.width, self.height)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def replace(self, bits: NDArray[np.bool_]) -> RegionMask:
        return RegionMask(bits, self.transform)

    def window(self, rows: slice, cols: slice) -> RegionMask:
        return RegionMask(self.bits[rows, cols], self.transform.shifted(rows.start or 0, cols.start or 0))

    def bounds(self) -> Optional[tuple[slice, slice]]:
        """Smallest (rows, cols) window holding every true bit; None if the mask is empty."""
        rows = np.flatnonzero(self.bits.any(axis=1))
        if rows.size == 0:
            return None
        cols = np.flatnonzero(self.bits.any(axis=0))
        return slice(int(rows[0]), int(rows[-1]) + 1), slice(int(cols[0]), int(cols[-1]) + 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegionMask):
            return NotImplemented
        return self.transform == other.transform and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        return f"RegionMask({self.width}x{self.height}, count={self.count})"


Ring = Sequence[tuple[float, float]]


@dataclasses.dataclass(frozen=True)
class Polygon:
    """
    The first ring is the outer boundary, the rest are holes. Every ring is closed (first vertex equals last)
    and has at least three distinct vertices.
    """

    rings: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self) -> None:
        if not self.rings:
            raise RasterError("Polygon shall have at least one ring")
        rings = tuple(tuple((float(x), float(y)) for x, y in r) for r in self.rings)
        for idx, ring in enumerate(rings):
            if len(ring) < 4 or ring[0] != ring[-1]:
                raise RasterError(f"Ring #{idx} is not closed or has too few vertices")
            if len(set(ring)) < 3:
                raise RasterError(f"Ring #{idx} has fewer than three distinct vertices")
        object.__setattr__(self, "rings", rings)

    @staticmethod
    def from_rings(*rings: Ring) -> Polygon:
        return Polygon(tuple(tuple(r) for r in rings))

    @staticmethod
    def rectangle(x0: float, y0: float, x1: float, y1: float) -> Polygon:
        return Polygon.from_rings([(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)])


@dataclasses.dataclass(frozen=True)
class RegionStats:
    min: float
    max: float
    mean: float
    stddev: float
    count: int


def ensure_same_grid(*items: Raster | RegionMask) -> Grid:
    grids = {x.grid for x in items}
    if len(grids) != 1:
        raise GridMismatchError(f"Inputs are not on the same grid: {sorted(map(str, grids))}")
    (out,) = grids
    return out


def _unittest_types() -> None:
    import pytest

    gt = GeoTransform(0.0, 40.0, 10.0, -10.0)
    for row in range(4):
        for col in range(4):
            assert gt.map_to_pixel(*gt.pixel_to_map(row, col)) == (row, col)

    with pytest.raises(RasterError):
        GeoTransform(0.0, 0.0, 0.0, -1.0)
    with pytest.raises(RasterError):
        GeoTransform(0.0, 0.0, 1.0, 0.0)

    r = Raster(np.arange(6.0).reshape(2, 3), gt, nodata=-9999.0, crs="EPSG:32633")
    assert (r.width, r.height) == (3, 2)
    assert not r.values.flags.writeable
    assert r == Raster(np.arange(6.0).reshape(2, 3), gt, nodata=-9999, crs="EPSG:32633")
    assert r != r.replace(np.zeros((2, 3)), nodata=-9999.0)
    with pytest.raises(RasterError):
        Raster(np.array([[np.nan, 1.0]]), gt)
    assert Raster(np.array([[np.nan, 1.0]]), gt, nodata=np.nan).valid.tolist() == [[False, True]]

    win = r.window(slice(1, 2), slice(1, 3))
    assert win.values.tolist() == [[4.0, 5.0]] and win.transform == GeoTransform(10.0, 30.0, 10.0, -10.0)
    bits = np.zeros((4, 4), dtype=bool)
    bits[1, 2] = bits[2, 1] = True
    mask = RegionMask(bits, gt)
    assert mask.bounds() == (slice(1, 3), slice(1, 3))
    assert mask.window(*mask.bounds()).count == 2  # type: ignore
    assert RegionMask(np.zeros((2, 2), dtype=bool), gt).bounds() is None

    with pytest.raises(RasterError):
        Polygon.from_rings([(0, 0), (1, 0), (1, 1)])  # Not closed
    with pytest.raises(RasterError):
        Polygon.from_rings([(0, 0), (1, 0), (0, 0), (1, 0), (0, 0)])
    assert len(Polygon.rectangle(0, 0, 1, 1).rings[0]) == 5
