# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import sys
import math
from pathlib import Path
from typing import Optional
import click
import sarlevel
from sarlevel.metrics import load_series, load_dates, join_series, evaluate as evaluate_pairs
from sarlevel.ui import show_table
from sarlevel.util import stage


_logger = sarlevel.get_logger(__name__)

_CSV = click.Path(exists=True, dir_okay=False, path_type=Path)


@sarlevel.subcommand(aliases="ev")
@click.option("--estimates", "-e", type=_CSV, required=True, help="Estimated levels, CSV `date,level_m`.")
@click.option("--reference", "-r", type=_CSV, required=True, help="Reference levels, CSV `date,level_m`.")
@click.option(
    "--dem-floor",
    type=float,
    default=-math.inf,
    metavar="METERS",
    help="""
The water surface elevation captured in the DEM. Dates whose reference level is at or below it cannot be observed
and are excluded from the comparison. By default nothing is excluded.
""",
)
@click.option(
    "--exclude-dates",
    type=_CSV,
    help="CSV with a `date` column, e.g., written by `calibrate --dates-out`; these dates are not evaluated.",
)
@sarlevel.pass_purser
def evaluate(
    purser: sarlevel.Purser,
    estimates: Path,
    reference: Path,
    dem_floor: float,
    exclude_dates: Optional[Path],
) -> None:
    """
    Compare estimated levels against reference levels on common dates.

    A table with R², RMSE, MAE, and the date counts is printed to stderr;
    the same values are printed to stdout as a machine-readable record in the selected format.
    R² is reported as null when the reference is constant over the compared dates.

    Example:

    \b
        sarlevel --json evaluate -e levels.csv -r gauge.csv --dem-floor 324
    """
    with stage("load"):
        est = load_series(estimates)
        ref = load_series(reference)
        excluded = load_dates(exclude_dates) if exclude_dates is not None else []
    with stage("evaluate"):
        if excluded:
            _logger.info("Excluding %d dates listed in %s", len(excluded), exclude_dates)
            est = est.without(excluded)
        joined = join_series(est, ref, dem_floor)
        report = evaluate_pairs(joined.pairs, joined.excluded_below_floor)
    show_table(report.rows())
    sys.stdout.write(purser.make_formatter()(report.to_dict()))
    sys.stdout.flush()
