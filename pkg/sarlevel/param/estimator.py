# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import functools
from typing import Any, Callable
import click
from sarlevel.estimator import EstimatorConfig, ConfigError
from sarlevel.radius_set import parse_radius_set, RadiusSetError, RADIUS_SET_USER_DOC


_DEFAULT = EstimatorConfig()

_OPTION_NAMES = ("sample_num", "tolerance", "kernel_radius", "sigma", "buffer_meters", "connectivity")


def estimator_config_options(f: Callable[..., Any]) -> Callable[..., Any]:
    """
    Adds the estimator tuning options to a command and replaces them with a single ``config`` argument
    holding a validated :class:`EstimatorConfig`.
    Invalid combinations are reported as usage errors before the command body runs, so no I/O happens.
    """

    @functools.wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        values = {k: kwargs.pop(k) for k in _OPTION_NAMES}
        try:
            config = EstimatorConfig(
                sample_num=values["sample_num"],
                tolerance=values["tolerance"],
                speckle_radius=values["kernel_radius"],
                gaussian_sigma=values["sigma"],
                buffer_distance=values["buffer_meters"],
                connectivity=int(values["connectivity"]),
            )
        except ConfigError as ex:
            raise click.UsageError(f"Invalid estimator configuration: {ex}") from ex
        return f(*args, config=config, **kwargs)

    options = [
        click.option(
            "--sample-num",
            "-N",
            type=int,
            default=_DEFAULT.sample_num,
            show_default=True,
            help="Candidate levels evaluated per search iteration, including both ends of the bracket.",
        ),
        click.option(
            "--tolerance",
            "-T",
            type=float,
            default=_DEFAULT.tolerance,
            show_default=True,
            metavar="METERS",
            help="The search stops when the spacing between candidate levels does not exceed this.",
        ),
        click.option(
            "--kernel-radius",
            "-K",
            type=int,
            default=_DEFAULT.speckle_radius,
            show_default=True,
            metavar="PIXELS",
            help="Radius of the circular median filter that suppresses speckle; 0 disables it.",
        ),
        click.option(
            "--sigma",
            type=float,
            default=_DEFAULT.gaussian_sigma,
            show_default=True,
            metavar="PIXELS",
            help="Standard deviation of the Gaussian smoothing applied before edge detection.",
        ),
        click.option(
            "--buffer-meters",
            "-B",
            type=float,
            default=_DEFAULT.buffer_distance,
            show_default=True,
            metavar="METERS",
            help="Distance by which the reservoir outline is expanded before any processing.",
        ),
        click.option(
            "--connectivity",
            type=click.Choice(["4", "8"]),
            default=str(_DEFAULT.connectivity),
            show_default=True,
            help="Pixel adjacency that delimits a water body.",
        ),
    ]
    for opt in reversed(options):
        wrapper = opt(wrapper)
    return wrapper


class RadiusSetParam(click.ParamType):
    name = "radii"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> list[int]:
        if isinstance(value, list):
            return value
        try:
            out = parse_radius_set(str(value))
        except RadiusSetError as ex:
            self.fail(str(ex), param, ctx)
        if not out:
            self.fail(f"The radius set {value!r} is empty", param, ctx)
        return out


RADII_HELP = "Speckle kernel radii to choose from, in pixels.\n\n" + RADIUS_SET_USER_DOC


def _unittest_estimator_config_options() -> None:
    from click.testing import CliRunner

    seen: list[EstimatorConfig] = []

    @click.command()
    @estimator_config_options
    def cmd(config: EstimatorConfig) -> None:
        seen.append(config)

    runner = CliRunner()
    assert runner.invoke(cmd, []).exit_code == 0
    assert seen[-1] == EstimatorConfig()

    assert runner.invoke(cmd, ["-N", "17", "--tolerance", "0.1", "-K", "0", "--connectivity", "4"]).exit_code == 0
    assert seen[-1] == EstimatorConfig(sample_num=17, tolerance=0.1, speckle_radius=0, connectivity=4)

    bad = runner.invoke(cmd, ["--tolerance", "0"])
    assert bad.exit_code == 2  # click's own usage error status; remapped by the root command
    assert "Tolerance shall be positive" in bad.output
    assert len(seen) == 2


def _unittest_radius_set_param() -> None:
    import pytest

    p = RadiusSetParam()
    assert p.convert("0-2", None, None) == [0, 1, 2]
    with pytest.raises(click.BadParameter):
        p.convert("x", None, None)
    with pytest.raises(click.BadParameter):
        p.convert("1,!1", None, None)
