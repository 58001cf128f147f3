# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import contextlib
import datetime
from pathlib import Path
from typing import Optional
from concurrent.futures import ThreadPoolExecutor
import click
import sarlevel
from sarlevel.param.estimator import estimator_config_options
from sarlevel.estimator import EstimatorConfig, EstimateResult, estimate_level, estimate_level_otsu
from sarlevel.scene import Scene, load_scene
from sarlevel.util import stage, format_level


_logger = sarlevel.get_logger(__name__)

_PATH = click.Path(exists=True, dir_okay=False, path_type=Path)

METHODS = ("fitness", "otsu")


@sarlevel.subcommand(aliases="est")
@click.option("--vv", type=_PATH, required=True, help="GeoTIFF with the VV backscatter band.")
@click.option("--vh", type=_PATH, required=True, help="GeoTIFF with the VH backscatter band.")
@click.option("--dem", type=_PATH, required=True, help="GeoTIFF with terrain elevations in meters.")
@click.option("--aoi", type=_PATH, required=True, help="GeoJSON with the reservoir outline polygon.")
@click.option(
    "--date",
    type=click.DateTime(formats=["%Y-%m-%d"]),
    help="Acquisition date reported in the output record. Left empty if not given.",
)
@click.option(
    "--method",
    type=click.Choice(METHODS, case_sensitive=False),
    default=METHODS[0],
    show_default=True,
    help="Shoreline fitness search, or the threshold-and-median baseline.",
)
@click.option(
    "--trace",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Write the search iterations with all candidate levels and their fitness as JSON to this file.",
)
@click.option(
    "--jobs",
    "-j",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Evaluate candidate levels of each iteration concurrently in this many threads.",
)
@estimator_config_options
def estimate(
    vv: Path,
    vh: Path,
    dem: Path,
    aoi: Path,
    date: Optional[datetime.datetime],
    method: str,
    trace: Optional[Path],
    jobs: int,
    config: EstimatorConfig,
) -> None:
    """
    Estimate the water level of one scene and print it as a CSV record with the header `date,level_m`.

    All rasters shall share one projected CRS with meter units; the DEM is resampled onto the SAR grid
    with nearest-neighbor sampling if the grids differ.

    Examples:

    \b
        sarlevel estimate --vv vv.tif --vh vh.tif --dem dem.tif --aoi outline.geojson --date 2021-03-04
        sarlevel -v est --vv vv.tif --vh vh.tif --dem dem.tif --aoi outline.geojson -T 0.1 --trace trace.json
    """
    _logger.debug("method=%s, jobs=%d, config=%r", method, jobs, config)
    with stage("load"):
        scene = load_scene(vv, vh, dem, aoi, date.date() if date else None)

    result = run(scene, config, method.lower(), jobs)

    if trace is not None:
        with stage("write"):
            trace.write_text(result.dumps(), encoding="utf8")
            _logger.info("Trace written to %s", trace)
    click.echo("date,level_m")
    click.echo(f"{scene.date.isoformat() if scene.date else ''},{format_level(result.level)}")


def run(scene: Scene, config: EstimatorConfig, method: str, jobs: int) -> EstimateResult:
    if method == "otsu":
        return estimate_level_otsu(scene, config)
    with contextlib.ExitStack() as stack:
        executor = stack.enter_context(ThreadPoolExecutor(jobs)) if jobs > 1 else None
        return estimate_level(scene, config, executor=executor)
