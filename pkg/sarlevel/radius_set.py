# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import re
import logging


class RadiusSetError(ValueError):
    pass


RADIUS_SET_USER_DOC = """
Radius set notation examples:

\b
    Discrete elements (, or ;):     0,1;3
    Inclusive intervals (- or ..):  0-4, 2..6
    Exclusion with ! prefix:        0-6,!1,!3..4
    JSON/YAML compatibility:        [0, 2, 4]
""".strip()


def parse_radius_set(text: str) -> list[int]:
    """
    Unpacks the set notation of speckle kernel radii in pixels into a sorted list of unique non-negative integers.
    Unlike the usual half-open convention, intervals include both ends because that is how radii are enumerated.
    Raises :class:`RadiusSetError` on syntax errors and negative values.

    >>> parse_radius_set("3")
    [3]
    >>> parse_radius_set("0-4")
    [0, 1, 2, 3, 4]
    >>> parse_radius_set("4,0..2; !1")
    [0, 2, 4]
    >>> parse_radius_set("[5, 1, 1]")
    [1, 5]
    >>> parse_radius_set("3-1")
    []
    >>> parse_radius_set("2,-1")  # doctest:+IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    RadiusSetError: ...
    """
    incl: set[int] = set()
    excl: set[int] = set()
    for item in _RE_SPLIT.split(_RE_JSON_LIST.sub(r"\1", text)):
        item = item.strip()
        if not item:
            continue
        target = incl
        if item.startswith("!"):
            target, item = excl, item[1:].strip()
        if _RE_SCALAR.match(item):
            target.add(int(item))
            continue
        match = _RE_RANGE.match(item)
        if match:
            lo, hi = map(int, match.groups())
            target.update(range(lo, hi + 1))
            continue
        raise RadiusSetError(f"Item {item!r} of the radius set {text!r} could not be parsed")

    result = sorted(incl - excl)
    _logger.debug("Radius set %r parsed as %r", text, result)
    return result


_RE_JSON_LIST = re.compile(r"^\s*\[([^]]*)]\s*$")
_RE_SPLIT = re.compile(r"[,;]")
_RE_SCALAR = re.compile(r"^\+?\d+$")
_RE_RANGE = re.compile(r"^\+?(\d+)\s*(?:-|\.\.)\s*\+?(\d+)$")

_logger = logging.getLogger(__name__)
