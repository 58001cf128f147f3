# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import datetime
from concurrent.futures import ThreadPoolExecutor
import numpy as np
import pytest
from sarlevel.synth import SynthParams, make_scene
from sarlevel.estimator import EstimatorConfig, estimate_level
from sarlevel.metrics import MetricsError, calibrate_kernel, score_kernels, select_calibration_dates
from sarlevel.scene import Scene

_CONFIG = EstimatorConfig(sample_num=129, tolerance=0.05)


def _salted_scenes(count: int) -> list[Scene]:
    return [
        make_scene(
            SynthParams(
                size=72,
                true_level=11.2 + 0.15 * k,
                salt_probability=0.05,
                seed=500 + k,
                date=datetime.date(2022, 1, 1 + k),
            )
        )
        for k in range(count)
    ]


def _unittest_calibrate_kernel_minimizes_mae() -> None:
    scenes = _salted_scenes(4)
    radii = [0, 2]
    explicit = {}
    for r in radii:
        config = _CONFIG.replace(speckle_radius=r)
        explicit[r] = float(np.mean([abs(estimate_level(s, config).level - s.reference) for s in scenes]))
    with ThreadPoolExecutor(4) as executor:
        scores = score_kernels(scenes, radii, _CONFIG, executor)
    assert scores == pytest.approx(explicit, abs=1e-12)
    best = calibrate_kernel(scenes, radii, _CONFIG)
    assert best == min(radii, key=lambda r: (explicit[r], r))
    assert best == 2  # The median filter removes the salt that misleads the unfiltered edges.
    assert calibrate_kernel(scenes, [2], _CONFIG) == 2


def _unittest_calibrate_kernel_errors() -> None:
    scenes = _salted_scenes(1)
    unreferenced = [Scene(s.vv, s.vh, s.dem, s.aoi, s.date, None) for s in scenes]
    with pytest.raises(MetricsError):
        calibrate_kernel(unreferenced, [0, 1], _CONFIG)
    with pytest.raises(MetricsError):
        calibrate_kernel(scenes, [], _CONFIG)


def _unittest_calibration_date_selection() -> None:
    dates = [datetime.date(2020, 1, 1) + datetime.timedelta(days=7 * k) for k in range(30)]
    chosen = select_calibration_dates(dates, 8, seed=3)
    assert len(chosen) == 8 == len(set(chosen))
    assert chosen == sorted(chosen) and set(chosen) <= set(dates)
    assert chosen == select_calibration_dates(dates, 8, seed=3)
    assert chosen != select_calibration_dates(dates, 8, seed=4)
    assert select_calibration_dates(dates[:5], 8) == dates[:5]
    expected = np.random.default_rng(3).choice(len(dates), 8, replace=False)
    assert chosen == sorted(dates[i] for i in expected)
    assert select_calibration_dates(dates, 0) == []
    with pytest.raises(MetricsError):
        select_calibration_dates(dates, -1)
