# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Synthetic scenes with a known water level, and the dense-sweep oracle used to check the estimator against them.

The DEM is an analytic bowl or valley. Backscatter is drawn from one Gaussian for flooded pixels and another
for dry ones (in dB, water darker), optionally with salt noise. Everything is a pure function of the parameters,
including the seed.
"""

from __future__ import annotations
import math
import logging
import datetime
import dataclasses
from pathlib import Path
from concurrent.futures import Executor
from typing import Callable, Literal, Optional, Any
import numpy as np
from numpy.typing import NDArray
from sarlevel.raster import Raster, Polygon, GeoTransform, write_raster, write_polygon
from sarlevel.scene import Scene, ManifestRow
from sarlevel.estimator import EstimatorConfig, ShorelineFitness, prepare


class SynthError(ValueError):
    pass


DemShape = Literal["bowl", "valley"]


@dataclasses.dataclass(frozen=True)
class SynthParams:
    size: int = 64
    """Pixels per side; the grid is square."""
    pixel_size: float = 10.0
    """Meters."""
    shape: DemShape = "bowl"
    base: float = 10.0
    """Elevation at the center (bowl) or along the center column (valley), meters."""
    slope: float = 0.1
    """Meters of elevation per pixel of distance from the center."""
    true_level: float = 12.0
    water_mean: float = -20.0
    water_stddev: float = 1.0
    land_mean: float = -6.0
    land_stddev: float = 1.0
    salt_probability: float = 0.0
    salt_value: float = 5.0
    """Backscatter of salted pixels, dB; far above both classes."""
    seed: int = 0
    date: Optional[datetime.date] = None
    aoi_margin: float = 100.0
    """Meters between the flooded area and the reservoir outline; keep it below the buffer distance."""
    crs: str = "EPSG:32633"
    origin: tuple[float, float] = (500_000.0, 6_000_000.0)

    def __post_init__(self) -> None:
        if self.size < 3:
            raise SynthError(f"Grid size shall be at least 3, got {self.size}")
        if not self.pixel_size > 0:
            raise SynthError(f"Pixel size shall be positive, got {self.pixel_size}")
        if self.shape not in ("bowl", "valley"):
            raise SynthError(f"Unknown DEM shape {self.shape!r}")
        if not self.slope > 0:
            raise SynthError(f"Slope shall be positive, got {self.slope}")
        if not self.water_mean < self.land_mean:
            raise SynthError(f"Water shall be darker than land: {self.water_mean} >= {self.land_mean}")
        if self.water_stddev < 0 or self.land_stddev < 0:
            raise SynthError("Standard deviations shall be non-negative")
        if not 0 <= self.salt_probability <= 1:
            raise SynthError(f"Salt probability shall be within [0, 1], got {self.salt_probability}")
        if self.aoi_margin < 0:
            raise SynthError(f"Margin shall be non-negative, got {self.aoi_margin}")

    @property
    def transform(self) -> GeoTransform:
        return GeoTransform.from_origin(self.origin[0], self.origin[1], self.pixel_size)

    def replace(self, **changes: Any) -> SynthParams:
        return dataclasses.replace(self, **changes)


def make_dem(params: SynthParams) -> Raster:
    """
    >>> dem = make_dem(SynthParams(size=33, slope=1.0))
    >>> float(dem.values[16, 16]), round(float(dem.values[0, 0]), 2)
    (10.0, 32.63)
    """
    center = (params.size - 1) / 2.0
    idx = np.arange(params.size, dtype=np.float64) - center
    if params.shape == "bowl":
        dist = np.hypot(idx[:, None], idx[None, :])
    else:
        dist = np.broadcast_to(np.abs(idx)[None, :], (params.size, params.size))
    return Raster(params.base + params.slope * dist, params.transform, crs=params.crs)


def make_sar_scene(dem: Raster, params: SynthParams) -> Scene:
    valid = dem.values[dem.valid]
    if valid.size == 0 or not float(valid.min()) <= params.true_level <= float(valid.max()):
        raise SynthError(f"True level {params.true_level} is outside the DEM range")
    wet = dem.valid & (dem.masked(np.inf) <= params.true_level)
    rng = np.random.default_rng(params.seed)
    vv = _draw_band(rng, wet, params)
    vh = _draw_band(rng, wet, params)
    aoi = _outline(wet, dem.transform, params.aoi_margin)
    _logger.debug(
        "Synthetic scene: %d of %d pixels flooded at %.3f", np.count_nonzero(wet), wet.size, params.true_level
    )
    return Scene(
        vv=dem.replace(vv),
        vh=dem.replace(vh),
        dem=dem,
        aoi=aoi,
        date=params.date,
        reference=params.true_level,
    )


def make_scene(params: SynthParams) -> Scene:
    return make_sar_scene(make_dem(params), params)


def _draw_band(rng: np.random.Generator, wet: NDArray[np.bool_], params: SynthParams) -> NDArray[np.float64]:
    water = rng.normal(params.water_mean, params.water_stddev, wet.shape)
    land = rng.normal(params.land_mean, params.land_stddev, wet.shape)
    salt = rng.random(wet.shape) < params.salt_probability
    out = np.where(wet, water, land)
    out[salt] = params.salt_value
    return np.asarray(out)


def _outline(wet: NDArray[np.bool_], transform: GeoTransform, margin: float) -> Polygon:
    rows = np.flatnonzero(wet.any(axis=1))
    cols = np.flatnonzero(wet.any(axis=0))
    x0 = transform.origin_x + cols[0] * transform.pixel_width - margin
    x1 = transform.origin_x + (cols[-1] + 1) * transform.pixel_width + margin
    ya = transform.origin_y + rows[0] * transform.pixel_height
    yb = transform.origin_y + (rows[-1] + 1) * transform.pixel_height
    return Polygon.rectangle(x0, min(ya, yb) - margin, x1, max(ya, yb) + margin)


def brute_force_level(
    scene: Scene,
    config: EstimatorConfig,
    granularity: float,
    executor: Optional[Executor] = None,
) -> float:
    """
    Evaluates the fitness at every level from the minimum to the maximum of the DEM in the region
    in steps of the granularity and returns the best one, the lowest on ties.
    Preprocessing is identical to the estimator's.
    """
    if not granularity > 0:
        raise SynthError(f"Granularity shall be positive, got {granularity}")
    prepared = prepare(scene, config)
    objective = ShorelineFitness(prepared)
    count = int(math.floor((prepared.upper - prepared.lower) / granularity * (1 + 1e-12))) + 1
    levels = [prepared.lower + k * granularity for k in range(count)]
    mapper: Callable[..., Any] = executor.map if executor is not None else map
    values = [e.fitness for e in mapper(objective, levels)]
    best = max(range(count), key=lambda i: (values[i], -i))
    _logger.debug(
        "Dense sweep of %s: %d levels, %d distinct floods, best %.4f",
        scene.name,
        count,
        objective.evaluations,
        levels[best],
    )
    return float(levels[best])


def write_scene(scene: Scene, directory: str | Path, stem: Optional[str] = None) -> ManifestRow:
    """
    Writes the rasters as GeoTIFF and the outline as GeoJSON; returns the manifest row pointing at them.
    """
    if scene.date is None:
        raise SynthError("A scene needs a date to be listed in a manifest")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or scene.date.isoformat()
    row = ManifestRow(
        date=scene.date,
        vv_path=(directory / f"{stem}_vv.tif").resolve(),
        vh_path=(directory / f"{stem}_vh.tif").resolve(),
        dem_path=(directory / f"{stem}_dem.tif").resolve(),
        aoi_path=(directory / f"{stem}_aoi.geojson").resolve(),
    )
    write_raster(scene.vv, row.vv_path)
    write_raster(scene.vh, row.vh_path)
    write_raster(scene.dem, row.dem_path)
    write_polygon(scene.aoi, row.aoi_path)
    return row


_logger = logging.getLogger(__name__)


def _unittest_make_dem() -> None:
    import pytest

    p = SynthParams(size=33, slope=1.0)
    assert make_dem(p) == make_dem(p)
    valley = make_dem(p.replace(shape="valley"))
    assert valley.values[0, 16] == 10.0 and valley.values[32, 0] == 26.0
    with pytest.raises(SynthError):
        SynthParams(slope=0.0)
    with pytest.raises(SynthError):
        SynthParams(water_mean=-5.0, land_mean=-6.0)


def _unittest_make_sar_scene() -> None:
    import pytest

    clean = SynthParams(water_stddev=0.0, land_stddev=0.0)
    scene = make_scene(clean)
    wet = scene.dem.values <= clean.true_level
    assert set(np.unique(scene.vv.values).tolist()) == {-20.0, -6.0}
    assert np.array_equal(scene.vv.values == -20.0, wet)
    assert np.array_equal(scene.vh.values, scene.vv.values)
    assert scene.reference == 12.0

    noisy = SynthParams(seed=42, salt_probability=0.02)
    a, b = make_scene(noisy), make_scene(noisy)
    assert a.vv == b.vv and a.vh == b.vh and a.aoi == b.aoi
    assert a.vv != a.vh  # Independent draws
    assert a.vv != make_scene(noisy.replace(seed=43)).vv

    wet = a.dem.values <= noisy.true_level
    unsalted = a.vv.values != noisy.salt_value
    w, d = a.vv.values[wet & unsalted], a.vv.values[~wet & unsalted]
    stderr = math.sqrt(w.var() / w.size + d.var() / d.size)
    assert d.mean() - w.mean() > 10 * stderr

    with pytest.raises(SynthError):
        make_scene(clean.replace(true_level=1000.0))


def _unittest_outline_covers_wet_area() -> None:
    from sarlevel.raster import rasterize_polygon

    scene = make_scene(SynthParams(size=48, water_stddev=0.0, land_stddev=0.0, aoi_margin=30.0))
    inside = rasterize_polygon(scene.aoi, scene.dem.grid).bits
    wet = scene.dem.values <= 12.0
    assert inside[wet].all()
    assert inside.sum() > wet.sum()
    assert not inside.all()
