# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import sys
import datetime
from pathlib import Path
from typing import Optional
import click
import sarlevel
from sarlevel.synth import SynthParams, SynthError, make_scene, write_scene
from sarlevel.scene import append_manifest_row
from sarlevel.metrics import append_series_row
from sarlevel.util import stage


_logger = sarlevel.get_logger(__name__)

_DEFAULT = SynthParams()


@sarlevel.subcommand(aliases="syn")
@click.option(
    "--out-dir",
    "-O",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
    help="Directory for the generated GeoTIFF and GeoJSON files; created if missing.",
)
@click.option(
    "--date",
    type=click.DateTime(formats=["%Y-%m-%d"]),
    default="2020-01-01",
    show_default=True,
    help="Acquisition date of the scene; also the stem of the file names.",
)
@click.option("--level", type=float, default=_DEFAULT.true_level, show_default=True, help="True water level, m.")
@click.option("--size", type=int, default=_DEFAULT.size, show_default=True, help="Pixels per side.")
@click.option("--pixel-size", type=float, default=_DEFAULT.pixel_size, show_default=True, help="Meters.")
@click.option("--shape", type=click.Choice(["bowl", "valley"]), default=_DEFAULT.shape, show_default=True)
@click.option("--base", type=float, default=_DEFAULT.base, show_default=True, help="Lowest elevation, m.")
@click.option("--slope", type=float, default=_DEFAULT.slope, show_default=True, help="Meters per pixel.")
@click.option(
    "--noise",
    type=float,
    default=_DEFAULT.water_stddev,
    show_default=True,
    metavar="DB",
    help="Standard deviation of the backscatter of both classes.",
)
@click.option(
    "--salt-probability",
    type=float,
    default=_DEFAULT.salt_probability,
    show_default=True,
    help="Probability of a pixel being replaced with bright salt noise.",
)
@click.option("--seed", type=int, default=_DEFAULT.seed, show_default=True)
@click.option(
    "--manifest",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Append the scene to this manifest CSV, creating it if needed.",
)
@click.option(
    "--reference",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Append the true level to this series CSV, creating it if needed.",
)
@sarlevel.pass_purser
def synth(
    purser: sarlevel.Purser,
    out_dir: Path,
    date: datetime.datetime,
    level: float,
    size: int,
    pixel_size: float,
    shape: str,
    base: float,
    slope: float,
    noise: float,
    salt_probability: float,
    seed: int,
    manifest: Optional[Path],
    reference: Optional[Path],
) -> None:
    """
    Generate a synthetic scene with a known water level: an analytic DEM, VV and VH bands where flooded pixels
    are dark, and a rectangular reservoir outline around the flooded area.

    The output is a pure function of the options. The manifest row of the new scene is printed to stdout.

    Example:

    \b
        for d in 01 02 03; do
            sarlevel synth -O scenes --date 2020-01-$d --level 12.$d --seed $d --manifest scenes.csv --reference ref.csv
        done
    """
    try:
        params = SynthParams(
            size=size,
            pixel_size=pixel_size,
            shape=shape,  # type: ignore
            base=base,
            slope=slope,
            true_level=level,
            water_stddev=noise,
            land_stddev=noise,
            salt_probability=salt_probability,
            seed=seed,
            date=date.date(),
        )
        scene = make_scene(params)
    except SynthError as ex:
        raise click.UsageError(f"Invalid scene parameters: {ex}") from ex

    with stage("write"):
        row = write_scene(scene, out_dir)
        if manifest is not None:
            append_manifest_row(manifest, row)
        if reference is not None:
            append_series_row(reference, row.date, level)
    _logger.info("Scene %s written to %s", scene.name, out_dir)
    base_dir = manifest.resolve().parent if manifest is not None else None
    sys.stdout.write(purser.make_formatter()(row.to_record(base_dir)))
    sys.stdout.flush()
