# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
from pathlib import Path
import simplejson as json  # type: ignore
from sarlevel.raster import Polygon, write_polygon
from sarlevel.estimator import FitnessTrace
from tests.subprocess import execute_cli
from tests.conftest import SceneFactory


def _scene_args(scene_factory: SceneFactory) -> list[str]:
    row = scene_factory(1)
    return ["--vv", str(row.vv_path), "--vh", str(row.vh_path), "--dem", str(row.dem_path), "--aoi", str(row.aoi_path)]


def _unittest_estimate(scene_factory: SceneFactory, tmp_path: Path) -> None:
    args = _scene_args(scene_factory)
    trace = tmp_path / "trace.json"
    _, stdout, _ = execute_cli("estimate", *args, "--date", "2021-01-01", "--trace", str(trace), timeout=60)
    header, record = stdout.splitlines()
    assert header == "date,level_m"
    date, level = record.split(",")
    assert date == "2021-01-01"
    assert len(level.split(".")[1]) == 4

    doc = json.loads(trace.read_text())
    assert doc["method"] == "fitness"
    assert doc["config"]["sample_num"] == 9
    assert doc["dem_min"] <= float(level) <= doc["dem_max"]
    parsed = FitnessTrace.loads(trace.read_text())
    assert len(parsed.iterations) >= 1
    assert f"{parsed.level:.4f}" == level
    assert all(len(it.candidates) == 9 == len(it.values) == len(it.shoreline_sizes) for it in parsed.iterations)

    # The alias, a finer search, and no date.
    _, stdout, _ = execute_cli("est", *args, "-N", "17", "-T", "0.05", timeout=60)
    assert stdout.splitlines()[1].startswith(",")

    # Same input, same output.
    _, again, _ = execute_cli("est", *args, "-N", "17", "-T", "0.05", timeout=60)
    assert again == stdout


def _unittest_estimate_otsu(scene_factory: SceneFactory) -> None:
    _, stdout, _ = execute_cli("estimate", *_scene_args(scene_factory), "--method", "otsu", timeout=60)
    level = float(stdout.splitlines()[1].split(",")[1])
    # The flooded area of the default bowl is delimited by the 12 m contour.
    assert abs(level - 12.0) < 0.5


def _unittest_estimate_validation(scene_factory: SceneFactory, tmp_path: Path) -> None:
    args = _scene_args(scene_factory)
    code, stdout, stderr = execute_cli("estimate", *args[:4], *args[6:], ensure_success=False, timeout=30)
    assert code == 1
    assert "--dem" in stderr
    assert stdout == ""

    trace = tmp_path / "never.json"
    code, stdout, stderr = execute_cli(
        "estimate", *args, "--tolerance", "0", "--trace", str(trace), ensure_success=False, timeout=30
    )
    assert code == 1
    assert "Tolerance shall be positive" in stderr
    assert stdout == "" and not trace.exists()

    code, _, _ = execute_cli("estimate", *args, "--sample-num", "2", ensure_success=False, timeout=30)
    assert code == 1


def _unittest_estimate_runtime_errors(scene_factory: SceneFactory, tmp_path: Path) -> None:
    args = _scene_args(scene_factory)

    far = tmp_path / "far.geojson"
    write_polygon(Polygon.rectangle(0.0, 0.0, 100.0, 100.0), far)
    code, stdout, stderr = execute_cli("estimate", *args[:6], "--aoi", str(far), ensure_success=False, timeout=30)
    assert code == 2
    assert "region:" in stderr
    assert stdout == ""

    broken = tmp_path / "broken.tif"
    broken.write_bytes(b"definitely not a GeoTIFF")
    code, _, stderr = execute_cli("estimate", "--vv", str(broken), *args[2:], ensure_success=False, timeout=30)
    assert code == 2
    assert "load:" in stderr
