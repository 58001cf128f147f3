# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import contextlib
from typing import Iterator


EXIT_CODE_VALIDATION = 1
"""
The invocation is malformed or the configuration violates its invariants; nothing has been read or written.
"""

EXIT_CODE_RUNTIME = 2
"""
The inputs could not be processed: unreadable files, empty regions, degenerate data, and so on.
"""

EXIT_CODE_INTERRUPTED = 127


class StageError(RuntimeError):
    """
    A failure attributed to a named pipeline stage. The original exception is chained as the cause.

    >>> try:
    ...     with stage("load"):
    ...         raise FileNotFoundError("dem.tif")
    ... except StageError as ex:
    ...     print(ex.stage, "|", ex, "|", type(ex.__cause__).__name__)
    load | load: dem.tif | FileNotFoundError
    """

    def __init__(self, stage_name: str, message: str) -> None:
        super().__init__(f"{stage_name}: {message}")
        self.stage = stage_name


@contextlib.contextmanager
def stage(name: str) -> Iterator[None]:
    """
    Re-raises any exception from the body as :class:`StageError` so that diagnostics name the failing step.
    Stage errors raised by nested stages pass through unchanged (the innermost stage wins).
    """
    try:
        yield
    except StageError:
        raise
    except Exception as ex:
        raise StageError(name, str(ex) or type(ex).__name__) from ex


def format_level(level: float) -> str:
    """
    >>> format_level(191.3359375)
    '191.3359'
    >>> format_level(-0.00001)
    '0.0000'
    """
    out = f"{level:.4f}"
    return "0.0000" if out == "-0.0000" else out
