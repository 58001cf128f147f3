# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import sys
from pathlib import Path
from typing import Optional
from concurrent.futures import ThreadPoolExecutor
import click
import sarlevel
from sarlevel.param.estimator import estimator_config_options
from sarlevel.estimator import EstimatorConfig, EstimateResult
from sarlevel.scene import ManifestRow, load_manifest
from sarlevel.metrics import TimeSeries, write_series
from sarlevel.util import StageError, stage
from sarlevel.ui import ProgressReporter, show_warning
from .estimate import METHODS, run


_logger = sarlevel.get_logger(__name__)


@sarlevel.subcommand(aliases="bat")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--out",
    "-o",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Write the level series to this CSV file instead of stdout.",
)
@click.option(
    "--jobs",
    "-j",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Process this many scenes concurrently. The output does not depend on it.",
)
@click.option(
    "--method",
    type=click.Choice(METHODS, case_sensitive=False),
    default=METHODS[0],
    show_default=True,
)
@click.option(
    "--trace-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Write the search trace of every scene as DATE.json into this directory.",
)
@estimator_config_options
def batch(
    manifest: Path,
    out: Optional[Path],
    jobs: int,
    method: str,
    trace_dir: Optional[Path],
    config: EstimatorConfig,
) -> None:
    """
    Estimate the water level of every scene listed in the manifest and emit the series as CSV
    with the header `date,level_m`, one row per scene in date order.

    The manifest is a CSV file with the header `date,vv_path,vh_path,dem_path,aoi_path`
    or a YAML/JSON list of mappings with the same keys. Relative paths are resolved against the manifest directory.

    Scenes that cannot be processed are reported on stderr and skipped.
    The exit code is nonzero only if every scene has failed.

    Example:

    \b
        sarlevel batch scenes.csv -j 8 --out levels.csv
    """
    with stage("manifest"):
        rows = load_manifest(manifest)
    _logger.info("Processing %d scenes in %d threads using %s", len(rows), jobs, config)
    if trace_dir is not None:
        trace_dir.mkdir(parents=True, exist_ok=True)

    with ProgressReporter(len(rows), "scenes") as prog:

        def process(row: ManifestRow) -> Optional[EstimateResult]:
            result: Optional[EstimateResult]
            try:
                with stage("load"):
                    scene = row.load()
                result = run(scene, config, method.lower(), jobs=1)
                if trace_dir is not None:
                    with stage("write"):
                        (trace_dir / f"{row.date.isoformat()}.json").write_text(result.dumps(), encoding="utf8")
            except StageError as ex:
                show_warning(f"Scene {row.date.isoformat()} skipped: {ex}")
                _logger.debug("Scene %s failed", row.date, exc_info=True)
                result = None
            prog.advance(failed=result is None)
            return result

        if jobs > 1:
            with ThreadPoolExecutor(jobs) as executor:
                results = list(executor.map(process, rows))
        else:
            results = [process(r) for r in rows]

    series = TimeSeries.from_pairs((r.date, res.level) for r, res in zip(rows, results) if res is not None)
    failed = len(rows) - len(series)
    _logger.info("%d scenes processed, %d failed", len(series), failed)
    with stage("write"):
        if out is not None:
            write_series(series, out)
        else:
            write_series(series, sys.stdout)
    if rows and failed == len(rows):
        raise StageError("batch", f"All {failed} scenes have failed")
