# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import math
import numpy as np
from sarlevel.estimator import Evaluation, search, iteration_bound


def _unittest_scripted_replay() -> None:
    """
    A fitness that peaks at 205, then 191.75 (twice), then 191.3359375 reproduces the whole refinement
    bit for bit, because every bracket end and step is a dyadic rational.
    """
    peaks = (205.0, 191.75, 191.3359375)
    trace = search(152.0, 364.0, lambda x: Evaluation(1.0 if x in peaks else 0.0), 9, 1.0)
    assert [it.best_level for it in trace.iterations] == [205.0, 191.75, 191.75, 191.3359375]
    assert [it.step for it in trace.iterations] == [26.5, 6.625, 1.65625, 0.4140625]
    assert [(it.lower, it.upper) for it in trace.iterations[1:]] == [
        (178.5, 231.5),
        (185.125, 198.375),
        (190.09375, 193.40625),
    ]
    assert trace.level == 191.3359375
    assert len(trace.iterations) == iteration_bound(212.0, 9, 1.0) == 4
    for it in trace.iterations:
        assert it.candidates[0] == it.lower and it.candidates[-1] == it.upper
        assert len(it.candidates) == 9


def _unittest_iteration_count_is_bounded() -> None:
    rng = np.random.default_rng(2001)
    for case in range(1000):
        lower = float(rng.uniform(-500, 500))
        span = float(rng.choice([0.0, rng.uniform(0, 1), rng.uniform(0, 1000)]))
        tol = float(10 ** rng.uniform(-3, 1))
        n = int(rng.integers(4, 40))
        # A random multimodal objective so that the bracket wanders.
        freq, phase, center = rng.uniform(0.01, 2.0), rng.uniform(0, 2 * math.pi), lower + span * rng.random()

        def objective(x: float) -> Evaluation:
            return Evaluation(math.sin(freq * x + phase) - 1e-3 * abs(x - center))

        trace = search(lower, lower + span, objective, n, tol)
        assert len(trace.iterations) <= iteration_bound(span, n, tol), f"case {case}"
        assert trace.iterations[-1].step <= tol * (1 + 1e-9)
        # Every iteration but the first is centered on the previous best level.
        for prev, cur in zip(trace.iterations, trace.iterations[1:]):
            assert cur.lower == prev.best_level - prev.step and cur.upper == prev.best_level + prev.step


def _unittest_best_is_argmax_of_last_iteration() -> None:
    rng = np.random.default_rng(2002)
    for _ in range(100):
        peak = float(rng.uniform(0, 100))
        trace = search(0.0, 100.0, lambda x: Evaluation(-((x - peak) ** 2)), 9, 0.01)
        last = trace.iterations[-1]
        assert trace.level == last.candidates[int(np.argmax(last.values))]
        assert abs(trace.level - peak) <= last.step
