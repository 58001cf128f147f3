# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import logging
import datetime
import dataclasses
from concurrent.futures import Executor
from typing import Any, Optional
import numpy as np
import simplejson as json  # type: ignore
from sarlevel.preprocess import otsu_threshold
from sarlevel.floodsim import connected_components, largest_component, shoreline
from sarlevel.scene import Scene
from sarlevel.util import stage
from ._config import EstimatorConfig
from ._search import FitnessTrace, SearchError, search
from ._fitness import Prepared, ShorelineFitness, prepare


@dataclasses.dataclass(frozen=True)
class EstimateResult:
    level: float
    config: EstimatorConfig
    date: Optional[datetime.date] = None
    trace: Optional[FitnessTrace] = None
    """Absent for the baseline method, which does not search."""
    dem_min: float = float("nan")
    dem_max: float = float("nan")
    method: str = "fitness"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "date": self.date.isoformat() if self.date else None,
            "method": self.method,
            "level_m": self.level,
            "dem_min": self.dem_min,
            "dem_max": self.dem_max,
            "config": self.config.to_dict(),
        }
        if self.trace is not None:
            out.update(self.trace.to_dict())
        return out

    def dumps(self) -> str:
        return str(json.dumps(self.to_dict(), indent=2, ignore_nan=True)) + "\n"


def estimate_level(
    scene: Scene,
    config: EstimatorConfig,
    executor: Optional[Executor] = None,
    prepared: Optional[Prepared] = None,
) -> EstimateResult:
    """
    Finds the level whose simulated shoreline collects the most edge response.
    The search starts from the DEM range within the expanded outline.
    A flat DEM yields its only value after a single iteration.
    """
    if prepared is None:
        prepared = prepare(scene, config)
    objective = ShorelineFitness(prepared)
    with stage("search"):
        trace = search(
            prepared.lower,
            prepared.upper,
            objective,
            config.sample_num,
            config.tolerance,
            executor,
            admissible=(prepared.lower, prepared.upper),
        )
    _logger.info(
        "Scene %s: level %.4f after %d iterations (%d distinct floods simulated)",
        scene.name,
        trace.level,
        len(trace.iterations),
        objective.evaluations,
    )
    return EstimateResult(
        level=trace.level,
        config=config,
        date=scene.date,
        trace=trace,
        dem_min=prepared.lower,
        dem_max=prepared.upper,
    )


def estimate_level_otsu(scene: Scene, config: EstimatorConfig, bins: int = 256) -> EstimateResult:
    """
    Baseline: split the filtered image with Otsu's threshold, take the class lying lower on the DEM as water,
    and report the median DEM elevation along the shoreline of its largest connected body.
    """
    prepared = prepare(scene, config)
    with stage("classify"):
        image, region = prepared.filtered, prepared.region
        threshold = otsu_threshold(image, region, bins)
        usable = region.bits & image.valid & prepared.dem.valid
        above = usable & (image.masked(-np.inf) >= threshold)
        below = usable & ~above
        if not above.any() or not below.any():
            raise SearchError("Thresholding left one of the classes empty")
        dem = prepared.dem.values
        water = below if np.median(dem[below]) <= np.median(dem[above]) else above
        body = largest_component(connected_components(region.replace(water), prepared.connectivity))
        line = shoreline(body)
        if len(line) == 0:
            raise SearchError("No water body found")
        level = float(np.median(line.gather(dem)))
    _logger.info(
        "Scene %s: Otsu threshold %.6g, water shoreline %d px, level %.4f", scene.name, threshold, len(line), level
    )
    return EstimateResult(
        level=level,
        config=config,
        date=scene.date,
        dem_min=prepared.lower,
        dem_max=prepared.upper,
        method="otsu",
    )


_logger = logging.getLogger(__name__)
