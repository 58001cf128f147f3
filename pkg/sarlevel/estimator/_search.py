# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Coarse-to-fine sampling search over a one-dimensional bracket.
Each iteration evaluates evenly spaced candidates, re-centers the bracket on the best one, and shrinks it
to two candidate spacings. The search stops as soon as the spacing is within the tolerance.
"""

from __future__ import annotations
import math
import logging
import dataclasses
from concurrent.futures import Executor
from typing import Any, Callable, Optional, Sequence
import simplejson as json  # type: ignore


class SearchError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class Evaluation:
    fitness: float
    shoreline_size: int = 0


Objective = Callable[[float], Evaluation]


@dataclasses.dataclass(frozen=True)
class SearchIteration:
    lower: float
    upper: float
    step: float
    candidates: tuple[float, ...]
    values: tuple[float, ...]
    shoreline_sizes: tuple[int, ...]
    best_level: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "step": self.step,
            "candidates": list(self.candidates),
            "values": list(self.values),
            "shoreline_sizes": list(self.shoreline_sizes),
            "best_level": self.best_level,
        }

    @staticmethod
    def from_dict(d: dict[str, Any]) -> SearchIteration:
        return SearchIteration(
            lower=float(d["lower"]),
            upper=float(d["upper"]),
            step=float(d["step"]),
            candidates=tuple(map(float, d["candidates"])),
            values=tuple(map(float, d["values"])),
            shoreline_sizes=tuple(map(int, d.get("shoreline_sizes") or [0] * len(d["candidates"]))),
            best_level=float(d["best_level"]),
        )


@dataclasses.dataclass(frozen=True)
class FitnessTrace:
    iterations: tuple[SearchIteration, ...]

    @property
    def level(self) -> float:
        return self.iterations[-1].best_level

    def to_dict(self) -> dict[str, Any]:
        return {"iterations": [it.to_dict() for it in self.iterations]}

    def dumps(self) -> str:
        return str(json.dumps(self.to_dict(), indent=2)) + "\n"

    @staticmethod
    def loads(text: str) -> FitnessTrace:
        doc = json.loads(text)
        return FitnessTrace(tuple(SearchIteration.from_dict(x) for x in doc["iterations"]))


def linspace(lower: float, upper: float, n: int) -> list[float]:
    """
    Endpoints are reproduced exactly; interior points are ``lower + i * step``.

    >>> linspace(152, 364, 9)[:3]
    [152.0, 178.5, 205.0]
    >>> linspace(0, 1, 2)
    [0.0, 1.0]
    >>> linspace(5, 5, 3)
    [5.0, 5.0, 5.0]
    """
    if n < 2:
        raise SearchError(f"At least two samples are required, got {n}")
    if lower > upper:
        raise SearchError(f"Inverted bracket [{lower}, {upper}]")
    step = (upper - lower) / (n - 1)
    return [float(lower + i * step) for i in range(n - 1)] + [float(upper)]


def iteration_bound(span: float, n: int, tol: float) -> int:
    """
    Upper bound on the number of iterations the search takes for a bracket of the given width.

    >>> iteration_bound(212, 9, 1), iteration_bound(212, 9, 0.1), iteration_bound(8, 9, 1)
    (4, 6, 1)
    """
    if n <= 3:
        raise SearchError(f"The bracket does not shrink with {n} samples per iteration")
    if not tol > 0:
        raise SearchError(f"Tolerance shall be positive, got {tol}")
    if span < 0:
        raise SearchError(f"Negative range {span}")
    if span == 0:
        return 1
    ratio = span / ((n - 1) * tol)
    if ratio <= 1:
        return 1
    return max(1, math.ceil(math.log(ratio) / math.log((n - 1) / 2)) + 1)


def search(
    lower: float,
    upper: float,
    objective: Objective,
    sample_num: int,
    tolerance: float,
    executor: Optional[Executor] = None,
    admissible: Optional[tuple[float, float]] = None,
) -> FitnessTrace:
    """
    Maximizes the objective over [lower, upper]. Ties go to the lowest candidate.
    The refined bracket is not clipped to the initial one.

    If an admissible interval is given, the objective shall not improve outside of it.
    Candidates inside the interval win ties against those outside, and a winner outside the interval
    is projected onto it; the projected level becomes the best level of the iteration.
    Candidates of one iteration are evaluated concurrently if an executor is given; iterations are sequential.
    """
    if sample_num < 3:
        raise SearchError(f"Sample count shall be at least 3, got {sample_num}")
    if not tolerance > 0:
        raise SearchError(f"Tolerance shall be positive, got {tolerance}")
    if not (math.isfinite(lower) and math.isfinite(upper)) or lower > upper:
        raise SearchError(f"Invalid bracket [{lower}, {upper}]")
    mapper: Callable[..., Any] = executor.map if executor is not None else map
    iterations: list[SearchIteration] = []
    while True:
        candidates = linspace(lower, upper, sample_num)
        evaluations: Sequence[Evaluation] = list(mapper(objective, candidates))
        values = tuple(float(e.fitness) for e in evaluations)
        best_index = _pick_best(candidates, values, admissible)
        step = (upper - lower) / (sample_num - 1)
        it = SearchIteration(
            lower=lower,
            upper=upper,
            step=step,
            candidates=tuple(candidates),
            values=values,
            shoreline_sizes=tuple(int(e.shoreline_size) for e in evaluations),
            best_level=_project(candidates[best_index], admissible),
        )
        iterations.append(it)
        _logger.debug(
            "Iteration %d: [%.6f, %.6f] step %.6g, best level %.6f (fitness %.6g)",
            len(iterations),
            lower,
            upper,
            step,
            it.best_level,
            values[best_index],
        )
        if step <= tolerance * (1 + _STEP_RTOL):
            break
        if sample_num == 3:
            raise SearchError(
                f"Three samples per iteration cannot narrow the bracket below step {step} "
                f"to reach tolerance {tolerance}"
            )
        lower, upper = it.best_level - step, it.best_level + step
    return FitnessTrace(tuple(iterations))


def _pick_best(candidates: Sequence[float], values: Sequence[float], admissible: Optional[tuple[float, float]]) -> int:
    """
    >>> flat = [0.0, 0.0, 0.0]
    >>> _pick_best([9.0, 10.0, 11.0], flat, None), _pick_best([9.0, 10.0, 11.0], flat, (10.0, 12.0))
    (0, 1)
    """
    if admissible is None:
        return max(range(len(values)), key=lambda i: (values[i], -i))
    lo, hi = admissible
    slack = _STEP_RTOL * max(1.0, abs(lo), abs(hi))
    inside = [lo - slack <= c <= hi + slack for c in candidates]
    return max(range(len(values)), key=lambda i: (values[i], inside[i], -i))


def _project(level: float, admissible: Optional[tuple[float, float]]) -> float:
    if admissible is None:
        return level
    return min(max(level, admissible[0]), admissible[1])


_STEP_RTOL = 1e-9

_logger = logging.getLogger(__name__)


def _unittest_search_replay() -> None:
    scripted = {205.0: 1.0, 191.75: 1.0, 191.3359375: 1.0}
    trace = search(152.0, 364.0, lambda x: Evaluation(scripted.get(x, 0.0)), 9, 1.0)
    assert len(trace.iterations) == 4
    first, second, _, last = trace.iterations
    assert first.step == 26.5 and first.best_level == 205.0
    assert (second.lower, second.upper) == (178.5, 231.5)
    assert second.step == 6.625 and second.best_level == 191.75
    assert last.step == 0.4140625
    assert trace.level == 191.3359375
    assert FitnessTrace.loads(trace.dumps()) == trace


def _unittest_search_edge_cases() -> None:
    import pytest

    flat = search(50.0, 50.0, lambda x: Evaluation(0.0), 9, 1.0)
    assert len(flat.iterations) == 1 and flat.level == 50.0

    # All ties resolve to the lowest candidate.
    assert search(0.0, 8.0, lambda x: Evaluation(1.0), 9, 1.0).level == 0.0

    with pytest.raises(SearchError):
        search(0.0, 100.0, lambda x: Evaluation(-abs(x - 30)), 3, 1.0)
    assert search(0.0, 2.0, lambda x: Evaluation(-abs(x - 1)), 3, 1.0).level == 1.0

    with pytest.raises(SearchError):
        search(1.0, 0.0, lambda x: Evaluation(0.0), 9, 1.0)
    with pytest.raises(SearchError):
        iteration_bound(10.0, 3, 1.0)
    with pytest.raises(SearchError):
        linspace(0, 1, 1)


def _unittest_search_admissible_interval() -> None:
    def nothing(_: float) -> Evaluation:
        return Evaluation(0.0)

    # Without the interval the unclipped bracket lets ties drift below the initial lower bound.
    assert search(10.0, 12.2, nothing, 9, 0.1).level < 10.0
    trace = search(10.0, 12.2, nothing, 9, 0.1, admissible=(10.0, 12.2))
    assert trace.level == 10.0
    assert all(10.0 <= it.best_level <= 12.2 for it in trace.iterations)

    # Saturating above the upper bound: the winner is kept within the interval.
    trace = search(10.0, 12.2, lambda x: Evaluation(min(x, 12.2)), 9, 0.1, admissible=(10.0, 12.2))
    assert 10.0 <= trace.level <= 12.2
    assert abs(trace.level - 12.2) <= trace.iterations[-1].step


def _unittest_search_parallel() -> None:
    from concurrent.futures import ThreadPoolExecutor

    def objective(x: float) -> Evaluation:
        return Evaluation(-((x - 123.456) ** 2), int(x))

    sequential = search(0.0, 1000.0, objective, 9, 0.01)
    with ThreadPoolExecutor(max_workers=4) as ex:
        parallel = search(0.0, 1000.0, objective, 9, 0.01, executor=ex)
    assert sequential == parallel
    assert abs(sequential.level - 123.456) <= sequential.iterations[-1].step
