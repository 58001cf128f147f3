# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
from pathlib import Path
import pytest
import simplejson as json  # type: ignore
from tests.subprocess import execute_cli


def _write(path: Path, rows: dict[str, float]) -> Path:
    path.write_text("date,level_m\n" + "".join(f"{d},{v}\n" for d, v in rows.items()))
    return path


@pytest.fixture()
def worked_example(tmp_path: Path) -> tuple[Path, Path]:
    est = _write(tmp_path / "est.csv", {"2020-01-03": 2.5, "2020-01-01": 1.5, "2020-01-02": 2.0, "2020-02-01": 9.0})
    ref = _write(tmp_path / "ref.csv", {"2020-01-01": 1.0, "2020-01-02": 2.0, "2020-01-03": 3.0})
    return est, ref


def _unittest_evaluate_worked_example(worked_example: tuple[Path, Path]) -> None:
    est, ref = worked_example
    _, stdout, stderr = execute_cli("--json", "evaluate", "-e", str(est), "-r", str(ref), timeout=30)
    record = json.loads(stdout)
    assert record["r2"] == pytest.approx(0.75, abs=1e-6)
    assert record["rmse"] == pytest.approx(0.4082, abs=1e-4)
    assert record["mae"] == pytest.approx(0.3333, abs=1e-4)
    assert record["n_dates"] == 3
    assert record["excluded_below_floor"] == 0
    assert "RMSE, m" in stderr and "0.41" in stderr

    _, stdout, _ = execute_cli("ev", "-e", str(est), "-r", str(ref), "--dem-floor", "1.5", timeout=30)
    assert "n_dates: 2\n" in stdout
    assert "excluded_below_floor: 1\n" in stdout

    _, stdout, _ = execute_cli("--tsvh", "ev", "-e", str(est), "-r", str(ref), timeout=30)
    header, values = stdout.splitlines()
    assert header.split("\t") == ["r2", "rmse", "mae", "n_dates", "excluded_below_floor"]
    assert values.split("\t")[3] == "3"


def _unittest_evaluate_perfect(tmp_path: Path) -> None:
    series = {"2020-01-01": 330.25, "2020-01-05": 331.0, "2020-01-09": 329.5}
    est = _write(tmp_path / "est.csv", series)
    ref = _write(tmp_path / "ref.csv", series)
    _, stdout, stderr = execute_cli("--json", "evaluate", "-e", str(est), "-r", str(ref), timeout=30)
    record = json.loads(stdout)
    assert (record["r2"], record["rmse"], record["mae"]) == (1.0, 0.0, 0.0)
    assert "1.00" in stderr and "0.00" in stderr


def _unittest_evaluate_constant_reference(tmp_path: Path) -> None:
    est = _write(tmp_path / "est.csv", {"2020-01-01": 1.0, "2020-01-02": 1.0})
    ref = _write(tmp_path / "ref.csv", {"2020-01-01": 0.0, "2020-01-02": 0.0})
    _, stdout, stderr = execute_cli("--json", "evaluate", "-e", str(est), "-r", str(ref), timeout=30)
    record = json.loads(stdout)
    assert record["r2"] is None
    assert record["mae"] == 1.0
    assert "n/a" in stderr


def _unittest_evaluate_exclusions(worked_example: tuple[Path, Path], tmp_path: Path) -> None:
    est, ref = worked_example
    dates = tmp_path / "calibration-dates.csv"
    dates.write_text("date\n2020-01-02\n")
    _, stdout, _ = execute_cli("--json", "ev", "-e", str(est), "-r", str(ref), "--exclude-dates", str(dates))
    record = json.loads(stdout)
    assert record["n_dates"] == 2
    assert record["mae"] == pytest.approx(0.5)


def _unittest_evaluate_errors(worked_example: tuple[Path, Path], tmp_path: Path) -> None:
    est, ref = worked_example
    code, stdout, stderr = execute_cli(
        "evaluate", "-e", str(est), "-r", str(ref), "--dem-floor", "100", ensure_success=False, timeout=30
    )
    assert code == 2
    assert "evaluate:" in stderr and "No evaluable dates" in stderr
    assert stdout == ""

    other = _write(tmp_path / "other.csv", {"1999-01-01": 1.0})
    code, _, stderr = execute_cli("evaluate", "-e", str(est), "-r", str(other), ensure_success=False, timeout=30)
    assert code == 2
    assert "no dates in common" in stderr

    malformed = tmp_path / "malformed.csv"
    malformed.write_text("when,level\n2020-01-01,1\n")
    code, _, stderr = execute_cli("evaluate", "-e", str(malformed), "-r", str(ref), ensure_success=False, timeout=30)
    assert code == 2
    assert "load:" in stderr

    code, _, _ = execute_cli("evaluate", "-e", str(est), ensure_success=False, timeout=30)
    assert code == 1
