# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Bathtub flood simulation on a DEM: submerge everything at or below a level, keep the biggest connected
water body, and take its boundary pixels as the simulated shoreline.
DEM nodata is treated as land.
"""

from __future__ import annotations
import logging
import dataclasses
from typing import Iterator, Literal
import numpy as np
from numpy.typing import NDArray
from scipy import ndimage
from sarlevel.raster import Raster, RegionMask, GeoTransform, ensure_same_grid


Connectivity = Literal[4, 8]


class FloodSimError(ValueError):
    pass


_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


@dataclasses.dataclass(frozen=True, eq=False)
class LabelGrid:
    """
    Component id per pixel: 0 is background, components are numbered 1..count in the order of their
    first pixel in a row-major scan.
    """

    labels: NDArray[np.int32]
    count: int
    connectivity: Connectivity
    transform: GeoTransform

    def sizes(self) -> NDArray[np.int64]:
        """Pixel count per label; index 0 is the background."""
        return np.bincount(self.labels.ravel(), minlength=self.count + 1)

    def component(self, label: int) -> NDArray[np.bool_]:
        return np.asarray(self.labels == label)


@dataclasses.dataclass(frozen=True, eq=False)
class PixelSet:
    """Unique (row, col) indices ordered row-major."""

    indices: NDArray[np.int64]

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return ((int(r), int(c)) for r, c in self.indices)

    def __contains__(self, item: object) -> bool:
        return item in set(iter(self))

    def gather(self, values: NDArray[np.float64]) -> NDArray[np.float64]:
        """Samples of the grid at the member pixels."""
        return np.asarray(values[self.indices[:, 0], self.indices[:, 1]])


def water_mask(dem: Raster, level: float, region: RegionMask) -> RegionMask:
    """
    >>> from sarlevel.raster import GeoTransform
    >>> gt = GeoTransform(0, 4, 1, -1)
    >>> ring = np.ones((4, 4)); ring[1:3, 1:3] = 0
    >>> water_mask(Raster(ring, gt), 0.0, RegionMask(np.ones((4, 4), bool), gt)).bits.astype(int).tolist()
    [[0, 0, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 0]]
    """
    ensure_same_grid(dem, region)
    return region.replace(region.bits & dem.valid & (dem.masked(np.inf) <= level))


def connected_components(mask: RegionMask, connectivity: Connectivity = 8) -> LabelGrid:
    if connectivity not in _STRUCTURES:
        raise FloodSimError(f"Connectivity shall be 4 or 8, got {connectivity!r}")
    raw, count = ndimage.label(mask.bits, structure=_STRUCTURES[connectivity])
    raw = np.asarray(raw, dtype=np.int32)
    if count > 1:
        # Renumber by first occurrence in row-major order.
        present, first = np.unique(raw.ravel(), return_index=True)
        order = present[1:][np.argsort(first[1:], kind="stable")]
        remap = np.zeros(count + 1, dtype=np.int32)
        remap[order] = np.arange(1, len(order) + 1, dtype=np.int32)
        raw = remap[raw]
    return LabelGrid(raw, int(count), connectivity, mask.transform)


def largest_component(labels: LabelGrid) -> RegionMask:
    """Ties go to the smallest label. No components yields an empty mask."""
    bits = np.zeros(labels.labels.shape, dtype=bool)
    if labels.count > 0:
        sizes = labels.sizes()
        sizes[0] = -1
        bits = labels.component(int(np.argmax(sizes)))
    return RegionMask(bits, labels.transform)


def shoreline(component: RegionMask) -> PixelSet:
    """Member pixels with at least one 4-neighbor outside the component; off-raster counts as outside."""
    bits = component.bits
    padded = np.pad(bits, 1, mode="constant", constant_values=False)
    interior = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    return PixelSet(np.argwhere(bits & ~interior).astype(np.int64))


def simulate_shoreline(dem: Raster, level: float, region: RegionMask, connectivity: Connectivity = 8) -> PixelSet:
    """Shoreline of the largest water body at the given level."""
    labels = connected_components(water_mask(dem, level, region), connectivity)
    out = shoreline(largest_component(labels))
    _logger.debug("Level %.6f: %d water bodies, shoreline %d px", level, labels.count, len(out))
    return out


_logger = logging.getLogger(__name__)


def _unittest_water_mask() -> None:
    gt = GeoTransform(0.0, 3.0, 1.0, -1.0)
    dem = Raster(np.array([[1.0, 2.0, 3.0], [4.0, -1.0, 6.0], [7.0, 8.0, 9.0]]), gt, nodata=-1.0)
    region = RegionMask(np.ones((3, 3), dtype=bool), gt)
    assert water_mask(dem, 0.5, region).count == 0
    assert water_mask(dem, 100.0, region).count == 8  # Nodata never floods
    assert water_mask(dem, 3.0, region).bits[0].tolist() == [True, True, True]
    clipped = region.replace(np.eye(3, dtype=bool))
    assert water_mask(dem, 100.0, clipped).count == 2


def _unittest_connected_components() -> None:
    import pytest

    gt = GeoTransform(0.0, 4.0, 1.0, -1.0)
    empty = connected_components(RegionMask(np.zeros((4, 4), dtype=bool), gt))
    assert empty.count == 0 and not empty.labels.any()

    diag = RegionMask(np.array([[1, 0], [0, 1]], dtype=bool), gt)
    assert connected_components(diag, 8).count == 1
    four = connected_components(diag, 4)
    assert four.count == 2 and four.labels.tolist() == [[1, 0], [0, 2]]

    # Both arms join through the bottom row.
    u = np.array(
        [
            [1, 0, 0, 1],
            [1, 0, 0, 1],
            [1, 1, 1, 1],
            [0, 0, 0, 0],
        ],
        dtype=bool,
    )
    lg = connected_components(RegionMask(u, gt), 4)
    assert lg.count == 1 and set(np.unique(lg.labels).tolist()) == {0, 1}

    with pytest.raises(FloodSimError):
        connected_components(diag, 6)  # type: ignore


def _unittest_largest_component() -> None:
    gt = GeoTransform(0.0, 5.0, 1.0, -1.0)
    bits = np.zeros((5, 5), dtype=bool)
    bits[0, 0:3] = True
    bits[4, 0:5] = True
    lg = connected_components(RegionMask(bits, gt))
    assert largest_component(lg).count == 5
    assert largest_component(lg).bits[4].all()

    pairs = np.zeros((5, 5), dtype=bool)
    pairs[0, 0:2] = True
    pairs[4, 3:5] = True
    out = largest_component(connected_components(RegionMask(pairs, gt)))
    assert out.bits[0, 0] and out.count == 2

    assert largest_component(connected_components(RegionMask(np.zeros((5, 5), dtype=bool), gt))).count == 0


def _unittest_shoreline() -> None:
    gt = GeoTransform(0.0, 5.0, 1.0, -1.0)
    two = np.zeros((5, 5), dtype=bool)
    two[1:3, 1:3] = True
    assert len(shoreline(RegionMask(two, gt))) == 4

    three = np.zeros((5, 5), dtype=bool)
    three[1:4, 1:4] = True
    ring = shoreline(RegionMask(three, gt))
    assert len(ring) == 8 and (2, 2) not in ring

    assert len(shoreline(RegionMask(np.zeros((5, 5), dtype=bool), gt))) == 0
    # Touching the raster border counts as touching the outside.
    assert len(shoreline(RegionMask(np.ones((5, 5), dtype=bool), gt))) == 16
