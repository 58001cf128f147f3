# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import logging
import threading
import dataclasses
import numpy as np
from numpy.typing import NDArray
from sarlevel.raster import Raster, RegionMask, Grid, EmptyRegionError, ensure_same_grid
from sarlevel.raster import rasterize_polygon, dilate_mask, clip_stats, align_to
from sarlevel.preprocess import EdgeRaster, combine_bands, speckle_filter, canny_edges
from sarlevel.floodsim import Connectivity, simulate_shoreline
from sarlevel.scene import Scene
from sarlevel.util import stage
from ._config import EstimatorConfig
from ._search import Evaluation


def evaluate_level(
    level: float,
    dem: Raster,
    edges: Raster,
    region: RegionMask,
    connectivity: Connectivity = 8,
) -> Evaluation:
    """
    Sum of edge magnitudes over the shoreline of the largest water body at the level,
    together with the shoreline length in pixels.
    """
    ensure_same_grid(dem, edges, region)
    line = simulate_shoreline(dem, level, region, connectivity)
    return Evaluation(float(np.sum(line.gather(edges.values))), len(line))


def fitness(
    level: float,
    dem: Raster,
    edges: Raster,
    region: RegionMask,
    connectivity: Connectivity = 8,
) -> float:
    """
    >>> from sarlevel.raster import GeoTransform
    >>> gt = GeoTransform(0, 4, 1, -1)
    >>> dem = np.ones((4, 4)); dem[1:3, 1:3] = 0
    >>> edges = np.zeros((4, 4)); edges[1:3, 1:3] = 2
    >>> fitness(0.0, Raster(dem, gt), Raster(edges, gt), RegionMask(np.ones((4, 4), bool), gt))
    8.0
    """
    return evaluate_level(level, dem, edges, region, connectivity).fitness


@dataclasses.dataclass(frozen=True, eq=False)
class Prepared:
    """
    Per-scene products computed once before the search. Everything is on the SAR grid.
    """

    grid: Grid
    aoi: RegionMask
    """The reservoir outline as drawn."""
    region: RegionMask
    """The outline expanded by the buffer distance; all statistics and flooding are confined to it."""
    dem: Raster
    filtered: Raster
    """Combined bands after speckle filtering."""
    edges: EdgeRaster
    lower: float
    upper: float
    connectivity: Connectivity

    def contours(self) -> NDArray[np.float64]:
        """Distinct DEM values inside the region in ascending order."""
        return np.unique(self.dem.values[self.region.bits & self.dem.valid])


def prepare(scene: Scene, config: EstimatorConfig) -> Prepared:
    grid = scene.vv.grid
    with stage("align"):
        dem = align_to(scene.dem, grid, "nearest", target_crs=scene.vv.crs or None)
    with stage("region"):
        aoi = rasterize_polygon(scene.aoi, grid)
        region = dilate_mask(aoi, config.buffer_distance)
        if region.count == 0:
            raise EmptyRegionError("The reservoir outline does not intersect the SAR raster")
        dem_stats = clip_stats(dem, region)
    with stage("preprocess"):
        combined = combine_bands(scene.vv, scene.vh)
        filtered = speckle_filter(combined, config.speckle_radius)
        edges = canny_edges(filtered, region, config.gaussian_sigma)
    _logger.info(
        "Scene %s: region %d px (outline %d px), DEM range [%.3f, %.3f], %d edge pixels",
        scene.name,
        region.count,
        aoi.count,
        dem_stats.min,
        dem_stats.max,
        np.count_nonzero(edges.values),
    )
    return Prepared(
        grid=grid,
        aoi=aoi,
        region=region,
        dem=dem,
        filtered=filtered,
        edges=edges,
        lower=dem_stats.min,
        upper=dem_stats.max,
        connectivity=config.connectivity,  # type: ignore
    )


class ShorelineFitness:
    """
    The search objective for one prepared scene. Safe to call from multiple threads.

    The flood at a level depends only on the highest DEM contour not above it, so evaluations are memoized
    per contour. The inputs are cropped to the bounding box of the region, which leaves the result unchanged
    because nothing outside the region can be flooded.
    """

    def __init__(self, prepared: Prepared, edges: Raster | None = None) -> None:
        edges = edges if edges is not None else prepared.edges
        bounds = prepared.region.bounds()
        assert bounds is not None
        self._dem = prepared.dem.window(*bounds)
        self._edges = edges.window(*bounds)
        self._region = prepared.region.window(*bounds)
        self._connectivity = prepared.connectivity
        self._contours = prepared.contours()
        self._cache: dict[int, Evaluation] = {}
        self._lock = threading.Lock()

    def contour_index(self, level: float) -> int:
        """Number of distinct DEM values in the region not exceeding the level."""
        return int(np.searchsorted(self._contours, level, side="right"))

    def __call__(self, level: float) -> Evaluation:
        k = self.contour_index(level)
        if k == 0:
            return Evaluation(0.0, 0)
        with self._lock:
            hit = self._cache.get(k)
        if hit is None:
            hit = evaluate_level(float(self._contours[k - 1]), self._dem, self._edges, self._region, self._connectivity)
            with self._lock:
                self._cache[k] = hit
        return hit

    @property
    def evaluations(self) -> int:
        return len(self._cache)


_logger = logging.getLogger(__name__)


def _unittest_shoreline_fitness() -> None:
    from sarlevel.raster import GeoTransform

    gt = GeoTransform(0.0, 8.0, 1.0, -1.0)
    rng = np.random.default_rng(1)
    dem = Raster(np.round(rng.uniform(0, 5, (8, 8)), 1), gt)
    edges = EdgeRaster(rng.uniform(0, 1, (8, 8)), gt)
    bits = np.zeros((8, 8), dtype=bool)
    bits[1:7, 2:8] = True
    region = RegionMask(bits, gt)
    prepared = Prepared(
        grid=dem.grid,
        aoi=region,
        region=region,
        dem=dem,
        filtered=dem,
        edges=edges,
        lower=0.0,
        upper=5.0,
        connectivity=8,
    )
    objective = ShorelineFitness(prepared)
    for level in np.linspace(-1.0, 6.0, 71):
        assert objective(float(level)) == evaluate_level(float(level), dem, edges, region)
    assert objective(-1.0) == Evaluation(0.0, 0)
    assert objective.evaluations <= len(prepared.contours())
