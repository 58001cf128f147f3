# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import sys
import threading
from typing import Any, Callable
import click


class ProgressReporter:
    """
    A ``done/total`` counter redrawn in place on stderr while a batch of scenes is processed.
    Nothing is printed unless stderr is a terminal. :meth:`advance` may be called from worker threads.

    >>> with ProgressReporter(3, "scenes") as prog:
    ...     prog.advance()
    ...     prog.advance(failed=True)
    ...     prog.done, prog.failed
    (2, 1)
    """

    def __init__(self, total: int, noun: str = "items") -> None:
        self._total = total
        self._noun = noun
        self._lock = threading.Lock()
        self._widest = 0
        self._draw = _make_sink()
        self.done = 0
        self.failed = 0

    def advance(self, failed: bool = False) -> None:
        with self._lock:
            self.done += 1
            self.failed += int(failed)
            text = f"{self.done}/{self._total} {self._noun}"
            if self.failed:
                text += f", {self.failed} failed"
            self._widest = max(self._widest, len(text))
            self._draw(text.ljust(self._widest))

    def __enter__(self) -> ProgressReporter:
        return self

    def __exit__(self, *_: Any) -> None:
        if self._widest > 0:
            self._draw(" " * self._widest)


def _make_sink() -> Callable[[str], None]:
    if sys.stderr.isatty():
        return lambda text: click.secho(f"\r{text}\r", nl=False, err=True, fg="green")
    return lambda _: None


def show_error(msg: str) -> None:
    click.secho(msg, err=True, fg="red", bold=True)


def show_warning(msg: str) -> None:
    click.secho(msg, err=True, fg="yellow")


def show_table(rows: list[tuple[str, str]]) -> None:
    """Two-column human-readable table on stderr."""
    width = max((len(k) for k, _ in rows), default=0)
    for key, value in rows:
        click.echo(f"{key.ljust(width)}  {value}", err=True)
