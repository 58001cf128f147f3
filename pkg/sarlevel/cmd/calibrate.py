# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import sys
from pathlib import Path
from typing import Optional
from concurrent.futures import ThreadPoolExecutor
import click
import sarlevel
from sarlevel.param.estimator import estimator_config_options, RadiusSetParam, RADII_HELP
from sarlevel.estimator import EstimatorConfig
from sarlevel.scene import load_manifest
from sarlevel.metrics import MetricsError, load_series, select_calibration_dates, score_kernels, best_radius
from sarlevel.metrics import write_dates
from sarlevel.ui import show_table
from sarlevel.util import stage


_logger = sarlevel.get_logger(__name__)


@sarlevel.subcommand(aliases="cal")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--reference",
    "-r",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Reference levels, CSV `date,level_m`. Only manifest dates listed here can be used for calibration.",
)
@click.option("--radii", type=RadiusSetParam(), default="0-5", show_default=True, help=RADII_HELP)
@click.option(
    "--count",
    "-n",
    type=click.IntRange(min=1),
    default=8,
    show_default=True,
    help="Number of randomly selected calibration dates; all usable dates if fewer are available.",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the date selection.")
@click.option(
    "--dates-out",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Write the selected calibration dates to this CSV file for use with `evaluate --exclude-dates`.",
)
@click.option(
    "--jobs",
    "-j",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Run this many estimations concurrently.",
)
@estimator_config_options
@sarlevel.pass_purser
def calibrate(
    purser: sarlevel.Purser,
    manifest: Path,
    reference: Path,
    radii: list[int],
    count: int,
    seed: int,
    dates_out: Optional[Path],
    jobs: int,
    config: EstimatorConfig,
) -> None:
    """
    Choose the speckle kernel radius that minimizes the mean absolute error of the estimates
    on a reproducible random subset of the dates that have a reference level.
    Ties are resolved in favor of the smallest radius.

    The per-radius errors are printed to stderr; the chosen radius is printed to stdout as a record
    in the selected format. The remaining options are used for every estimation except the kernel radius.

    Example:

    \b
        sarlevel calibrate scenes.csv -r gauge.csv --radii 0-6 --dates-out calibration-dates.csv -j 8
    """
    with stage("manifest"):
        rows = load_manifest(manifest)
    with stage("load"):
        ref = load_series(reference).as_dict()
        usable = [r for r in rows if r.date in ref]
        if not usable:
            raise MetricsError("None of the manifest dates has a reference level")
        chosen = set(select_calibration_dates([r.date for r in usable], count, seed))
        scenes = [r.load(reference=ref[r.date]) for r in usable if r.date in chosen]
    _logger.info("Calibrating on %d of %d usable dates: %s", len(scenes), len(usable), sorted(chosen))

    if dates_out is not None:
        with stage("write"):
            write_dates(chosen, dates_out)

    with stage("calibrate"):
        if jobs > 1:
            with ThreadPoolExecutor(jobs) as executor:
                scores = score_kernels(scenes, radii, config, executor)
        else:
            scores = score_kernels(scenes, radii, config)
        best = best_radius(scores)

    show_table([(f"radius {r} px", f"MAE {v:.4f} m") for r, v in sorted(scores.items())])
    record = {"kernel_radius": best, "mae": scores[best], "n_dates": len(scenes)}
    sys.stdout.write(purser.make_formatter()(record))
    sys.stdout.flush()
