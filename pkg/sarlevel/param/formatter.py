# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
from typing import Callable, Any, cast
from collections.abc import Mapping
import click


Formatter = Callable[[Mapping[str, Any]], str]
"""
Renders one flat record as a complete document including the trailing newline.
When writing to stdout, do not use print() because it would add an extra newline.
"""

FormatterFactory = Callable[[], Formatter]


def formatter_factory_option(f: Callable[..., Any]) -> Callable[..., Any]:
    override: str | None = None

    def install_override(_ctx: click.Context, _param: click.Parameter, value: str) -> None:
        nonlocal override
        override = value or override

    def validate(ctx: click.Context, param: click.Parameter, value: str) -> FormatterFactory:
        try:
            return _FORMATTERS[(override or value).upper()]
        except LookupError:
            raise click.BadParameter(f"Invalid format name: {value!r}", ctx=ctx, param=param) from None

    doc = """
The format of machine-readable records printed to stdout by commands that produce them (e.g., evaluate).
Level series are always exchanged as CSV files and are not affected by this option.

TSVH is tab-separated values with a header line.
"""
    f = click.option(
        "--format",
        "-F",
        "formatter_factory",
        envvar="SARLEVEL_FORMAT",
        type=click.Choice(list(_FORMATTERS.keys()), case_sensitive=False),
        callback=validate,
        default=list(_FORMATTERS.keys())[0],
        show_default=True,
        help=doc,
    )(f)

    def shortcut(opt: str) -> None:
        nonlocal f
        f = click.option(
            f"--{opt}",
            flag_value=opt,
            callback=install_override,
            help=f"Same as --format={opt}",
            is_eager=True,
            expose_value=False,
        )(f)

    shortcut("yaml")
    shortcut("json")
    shortcut("tsvh")
    return f


def _make_yaml_formatter() -> Formatter:
    from sarlevel.yaml import Dumper

    return Dumper(explicit_start=False).dumps


def _make_json_formatter() -> Formatter:
    # simplejson keeps the key order and serializes NaN as null with ignore_nan.
    import simplejson as json  # type: ignore

    return lambda data: cast(str, json.dumps(data, separators=(",", ":"), ignore_nan=True)) + _NEWLINE


def _make_tsvh_formatter() -> Formatter:
    def fmt(data: Mapping[str, Any]) -> str:
        values = ("" if v is None else str(v) for v in data.values())
        return "\t".join(map(str, data.keys())) + _NEWLINE + "\t".join(values) + _NEWLINE

    return fmt


_FORMATTERS: dict[str, FormatterFactory] = {
    "YAML": _make_yaml_formatter,
    "JSON": _make_json_formatter,
    "TSVH": _make_tsvh_formatter,
}

_NEWLINE = "\n"


def _unittest_formatter() -> None:
    record = {"r2": 0.75, "rmse": 0.4082, "mae": 0.3333, "n_dates": 3, "excluded_below_floor": 0}
    assert _FORMATTERS["YAML"]()(record) == "r2: 0.75\nrmse: 0.4082\nmae: 0.3333\nn_dates: 3\nexcluded_below_floor: 0\n"
    assert (
        _FORMATTERS["JSON"]()(record) == '{"r2":0.75,"rmse":0.4082,"mae":0.3333,"n_dates":3,"excluded_below_floor":0}\n'
    )
    assert _FORMATTERS["TSVH"]()({"r2": None, "n_dates": 2}) == "r2\tn_dates\n\t2\n"
    assert _FORMATTERS["JSON"]()({"r2": float("nan")}) == '{"r2":null}\n'
