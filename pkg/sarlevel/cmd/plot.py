# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import io
from pathlib import Path
from typing import Optional
import click
import sarlevel
from sarlevel.metrics import TimeSeries, MetricsError, load_series
from sarlevel.util import stage


_logger = sarlevel.get_logger(__name__)

_CSV = click.Path(exists=True, dir_okay=False, path_type=Path)

_STYLE = {
    "estimate": {"color": "tab:blue", "marker": "o", "linestyle": "-"},
    "reference": {"color": "tab:orange", "marker": "s", "linestyle": "--"},
}


@sarlevel.subcommand(aliases="pl")
@click.option("--estimates", "-e", type=_CSV, required=True, help="Estimated levels, CSV `date,level_m`.")
@click.option("--reference", "-r", type=_CSV, help="Reference levels, CSV `date,level_m`; optional.")
@click.option(
    "--out",
    "-o",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    required=True,
    help="Output SVG file.",
)
@click.option("--title", type=str, default="", help="Figure title.")
def plot(estimates: Path, reference: Optional[Path], out: Path, title: str) -> None:
    """
    Plot the estimated level series, optionally next to the reference series, as an SVG file.

    Each series is drawn as a line with one marker per date. The output does not depend on the time
    of the invocation, so identical inputs produce identical files.

    Example:

    \b
        sarlevel plot -e levels.csv -r gauge.csv -o levels.svg
    """
    with stage("load"):
        series = {"estimate": load_series(estimates)}
        if reference is not None:
            series["reference"] = load_series(reference)
    with stage("plot"):
        svg = render_svg(series, title)
    with stage("write"):
        out.write_text(svg, encoding="utf8")
    _logger.info("Plot of %s written to %s", {k: len(v) for k, v in series.items()}, out)


def render_svg(series: dict[str, TimeSeries], title: str = "") -> str:
    """
    The line of each series carries the series name as its SVG group id, which is also its legend label.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for name, s in series.items():
        if len(s) == 0:
            raise MetricsError(f"Nothing to plot: the {name} series is empty")

    with matplotlib.rc_context({"svg.hashsalt": "sarlevel", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(1, 1, figsize=(10, 4))
        try:
            for name, s in series.items():
                style = _STYLE.get(name, {})
                ax.plot(list(s.dates), list(s.values), label=name, gid=name, markersize=4, **style)  # type: ignore
            ax.set_ylabel("water level, m")
            ax.set_xlabel("date")
            if title:
                ax.set_title(title)
            ax.grid(axis="both", color="0.85", linestyle=":", linewidth=0.8)
            ax.legend()
            fig.autofmt_xdate()
            buf = io.StringIO()
            fig.savefig(buf, format="svg", bbox_inches="tight", metadata={"Date": None})
        finally:
            plt.close(fig)
    return buf.getvalue()
