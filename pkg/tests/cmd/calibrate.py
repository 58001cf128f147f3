# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
from pathlib import Path
import simplejson as json  # type: ignore
from tests.subprocess import execute_cli
from tests.conftest import SceneFactory


def _unittest_calibrate(scene_factory: SceneFactory, tmp_path: Path) -> None:
    for day in (1, 2, 3):
        scene_factory(day, level=11.5 + 0.25 * day)
    dates = tmp_path / "calibration-dates.csv"
    _, stdout, stderr = execute_cli(
        "--json",
        "calibrate",
        str(scene_factory.manifest),
        *("-r", str(scene_factory.reference), "--radii", "0,1", "--count", "2", "--seed", "7"),
        *("-N", "17", "-T", "0.1", "--dates-out", str(dates), "-j", "4"),
        timeout=300,
    )
    record = json.loads(stdout)
    assert record["kernel_radius"] in (0, 1)
    assert record["n_dates"] == 2
    assert record["mae"] >= 0
    assert "radius 0 px" in stderr and "radius 1 px" in stderr
    chosen = dates.read_text().splitlines()
    assert chosen[0] == "date" and len(chosen) == 3

    # The same seed selects the same dates.
    again = tmp_path / "again.csv"
    execute_cli(
        "cal",
        str(scene_factory.manifest),
        *("-r", str(scene_factory.reference), "--radii", "1", "--count", "2", "--seed", "7"),
        *("-N", "17", "-T", "0.1", "--dates-out", str(again)),
        timeout=300,
    )
    assert again.read_bytes() == dates.read_bytes()


def _unittest_calibrate_errors(scene_factory: SceneFactory, tmp_path: Path) -> None:
    scene_factory(1)
    unrelated = tmp_path / "unrelated.csv"
    unrelated.write_text("date,level_m\n1999-01-01,12\n")
    code, _, stderr = execute_cli(
        "calibrate", str(scene_factory.manifest), "-r", str(unrelated), ensure_success=False, timeout=60
    )
    assert code == 2
    assert "None of the manifest dates has a reference level" in stderr

    for radii in ("x", "3-1", "-1"):
        code, _, _ = execute_cli(
            "calibrate",
            str(scene_factory.manifest),
            *("-r", str(scene_factory.reference), f"--radii={radii}"),
            ensure_success=False,
            timeout=60,
        )
        assert code == 1
