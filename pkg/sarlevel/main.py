# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.
# mypy: warn_unused_ignores=False

from __future__ import annotations
import sys
from typing import Any, Callable, Iterable
import logging
from shutil import get_terminal_size
import click
import sarlevel
from sarlevel.param.formatter import formatter_factory_option, FormatterFactory, Formatter
from sarlevel.util import StageError, EXIT_CODE_VALIDATION, EXIT_CODE_RUNTIME, EXIT_CODE_INTERRUPTED


def get_logger(name: str) -> logging.Logger:
    """
    :func:`logging.getLogger` with private components and double underscores removed from the name,
    so ``sarlevel.cmd._x`` logs as ``sarlevel.cmd``.

    >>> get_logger("sarlevel.estimator._search").name
    'sarlevel.estimator'
    """
    return logging.getLogger(name.replace("__", "").split("._", 1)[0])


_logger = get_logger("sarlevel")
# The CLI tests may parse log lines expecting this format.
_LOG_FORMAT = "%(asctime)s %(process)07d %(levelname)-3.3s %(name)s: %(message)s"
logging.basicConfig(format=_LOG_FORMAT)  # The level is set later from the verbosity option.


class Purser:
    """Shared state handed from the root command to subcommands."""

    def __init__(self, formatter_factory: FormatterFactory) -> None:
        self._formatter_factory = formatter_factory

    def make_formatter(self) -> Formatter:
        return self._formatter_factory()


pass_purser = click.make_pass_decorator(Purser)


class AliasedGroup(click.Group):
    """
    Commands registered through :meth:`command` may carry short aliases: ``@group.command(aliases="est")``.
    The help lists every command as ``name (alias, ...)``.
    """

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self._alias_to_name: dict[str, str] = {}

    def command(self, *args: Any, **kwargs: Any) -> Any:
        aliases = _normalize_aliases(kwargs.pop("aliases", ()))
        register: Any = super().command(*args, **kwargs)

        def decorator(f: Any) -> Any:
            cmd: Any = register(f)
            for alias in aliases:
                if alias in self._alias_to_name or alias in self.commands:
                    raise ValueError(f"Alias {alias!r} of {cmd.name!r} is already taken")
                self._alias_to_name[alias] = cmd.name
            return cmd

        return decorator

    def aliases_of(self, name: str) -> list[str]:
        return sorted(a for a, n in self._alias_to_name.items() if n == name)

    def get_command(self, ctx: click.Context, cmd_name: str) -> Any:
        return super().get_command(ctx, self._alias_to_name.get(cmd_name, cmd_name))

    def resolve_command(
        self, ctx: click.Context, args: list[Any]
    ) -> tuple[str | None, click.Command | None, list[str]]:
        # The canonical name keys the envvar prefix: SARLEVEL_ESTIMATE_TOLERANCE also applies to "est".
        _, cmd, rest = super().resolve_command(ctx, args)
        return (cmd.name if cmd else None), cmd, rest

    def format_commands(self, ctx: click.Context, formatter: click.HelpFormatter) -> None:
        labels = {}
        for name in self.list_commands(ctx):
            cmd = self.get_command(ctx, name)
            if cmd is None or cmd.hidden:
                continue
            aliases = self.aliases_of(name)
            labels[name] = f"{name} ({', '.join(aliases)})" if aliases else name
        if labels:
            limit = formatter.width - 6 - max(map(len, labels.values()))
            with formatter.section("Commands"):
                formatter.write_dl([(lb, self.commands[n].get_short_help_str(limit)) for n, lb in labels.items()])


def _normalize_aliases(item: str | Iterable[str]) -> tuple[str, ...]:
    """
    >>> _normalize_aliases("est"), _normalize_aliases(["b", "a"]), _normalize_aliases(())
    (('est',), ('b', 'a'), ())
    """
    out = (item,) if isinstance(item, str) else tuple(item)
    if not all(isinstance(x, str) and x for x in out):
        raise TypeError(f"Aliases shall be non-empty strings, got {item!r}")
    return out


@click.command(
    cls=AliasedGroup,
    context_settings={
        "max_content_width": get_terminal_size()[0],
        "auto_envvar_prefix": "SARLEVEL",  # Must be here rather than in __main__.py to work when installed.
    },
)
@click.version_option(version=sarlevel.__version__)
@click.option("--verbose", "-v", count=True, help="Emit verbose log messages. Specify twice for extra verbosity.")
@formatter_factory_option
@click.pass_context
def _click_main(ctx: click.Context, verbose: int, formatter_factory: FormatterFactory) -> None:
    """
    Estimates reservoir water levels from SAR scenes and a DEM by finding the simulated flood level
    whose shoreline coincides best with the edges visible in the radar image.

    All rasters of a scene shall share one projected CRS with meter units.
    Level series are exchanged as CSV files with the header `date,level_m`.

    Any long option can be provided via environment variable prefixed with `SARLEVEL_`
    such that an option `--foo-bar` for command `baz`, if not provided as a command-line argument,
    will be read from `SARLEVEL_BAZ_FOO_BAR`.

    Exit codes: 0 success, 1 invalid invocation or configuration, 2 data or processing error.
    """
    _configure_logging(verbose)  # First thing, so that everything after is logged correctly.
    ctx.obj = Purser(formatter_factory=formatter_factory)


subcommand: Callable[..., Callable[..., Any]] = _click_main.command  # type: ignore


def main() -> None:  # https://click.palletsprojects.com/en/8.1.x/exceptions/
    try:
        status = _click_main.main(prog_name="sarlevel", standalone_mode=False)
    except SystemExit as ex:
        status = ex.code
    except BaseException as ex:  # pylint: disable=broad-except
        status = _report(ex)
    _logger.debug("EXIT %r", status)
    sys.exit(status)


def _report(ex: BaseException) -> int:
    """Prints the diagnostic for an exception escaping the command and returns the exit code."""
    from sarlevel.ui import show_error

    if isinstance(ex, (KeyboardInterrupt, click.Abort)):
        _logger.info("Interrupted")
        return EXIT_CODE_INTERRUPTED
    if isinstance(ex, click.ClickException):
        ex.show()
        return EXIT_CODE_VALIDATION
    if isinstance(ex, StageError):
        show_error(str(ex))
        _logger.debug("%s caused by %r", ex, ex.__cause__, exc_info=ex)
        return EXIT_CODE_RUNTIME
    if isinstance(ex, Exception):
        show_error(f"{type(ex).__name__}: {ex}")
        _logger.debug("Unhandled exception", exc_info=ex)
        return EXIT_CODE_RUNTIME
    show_error(f"Internal error, please report: {ex!r}")
    _logger.error("%s", type(ex).__name__, exc_info=ex)
    return EXIT_CODE_RUNTIME


def _configure_logging(verbosity: int) -> None:
    level = (logging.WARNING, logging.INFO)[verbosity] if verbosity < 2 else logging.DEBUG
    logging.root.setLevel(level)
    try:
        import coloredlogs  # type: ignore

        # The level applies to the handler installed by coloredlogs, not to the root logger.
        coloredlogs.install(level=level, fmt=_LOG_FORMAT)
    except Exception as ex:  # pylint: disable=broad-except
        _logger.exception("Could not set up coloredlogs: %r", ex)  # pragma: no cover
