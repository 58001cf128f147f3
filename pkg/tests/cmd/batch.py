# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import shutil
from pathlib import Path
from sarlevel.scene import load_manifest, write_manifest
from sarlevel.estimator import FitnessTrace
from tests.subprocess import execute_cli
from tests.conftest import SceneFactory


def _unittest_batch(scene_factory: SceneFactory, tmp_path: Path) -> None:
    scene_factory(2, level=12.5)
    scene_factory(1, level=11.5)
    out = tmp_path / "levels.csv"
    _, stdout, _ = execute_cli("batch", str(scene_factory.manifest), "--out", str(out), timeout=120)
    assert stdout == ""
    lines = out.read_text().splitlines()
    assert lines[0] == "date,level_m"
    assert [x.split(",")[0] for x in lines[1:]] == ["2021-01-01", "2021-01-02"]  # Sorted despite manifest order

    # Batch rows agree with single-scene runs.
    row = load_manifest(scene_factory.manifest)[0]
    _, single, _ = execute_cli(
        "estimate",
        *("--vv", str(row.vv_path), "--vh", str(row.vh_path), "--dem", str(row.dem_path), "--aoi", str(row.aoi_path)),
        *("--date", row.date.isoformat()),
        timeout=60,
    )
    assert single.splitlines()[1] in lines

    # The alias, writing to stdout.
    _, stdout, _ = execute_cli("bat", str(scene_factory.manifest.resolve()), timeout=120)
    assert stdout.splitlines() == lines


def _unittest_batch_concurrency_is_invisible(scene_factory: SceneFactory, tmp_path: Path) -> None:
    for day in range(1, 7):
        scene_factory(day, level=11.0 + 0.3 * day, salt_probability=0.02)
    serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
    args = [str(scene_factory.manifest), "-N", "33", "-T", "0.05"]
    execute_cli("batch", *args, "--jobs", "1", "--out", str(serial), timeout=300)
    execute_cli("batch", *args, "--jobs", "8", "--out", str(parallel), timeout=300)
    assert serial.read_bytes() == parallel.read_bytes()
    assert len(serial.read_text().splitlines()) == 7


def _unittest_batch_partial_failure(scene_factory: SceneFactory, tmp_path: Path) -> None:
    scene_factory(1)
    broken = scene_factory(2)
    scene_factory(3)
    broken.dem_path.write_bytes(b"garbage")
    traces = tmp_path / "traces"
    code, stdout, stderr = execute_cli(
        "batch", str(scene_factory.manifest), "--trace-dir", str(traces), "--jobs", "3", timeout=120
    )
    assert code == 0
    assert [x.split(",")[0] for x in stdout.splitlines()] == ["date", "2021-01-01", "2021-01-03"]
    assert "2021-01-02" in stderr and "load:" in stderr
    assert sorted(p.name for p in traces.iterdir()) == ["2021-01-01.json", "2021-01-03.json"]
    assert FitnessTrace.loads((traces / "2021-01-01.json").read_text()).iterations


def _unittest_batch_all_failed(scene_factory: SceneFactory) -> None:
    scene_factory(1).vv_path.unlink()
    code, stdout, stderr = execute_cli("batch", str(scene_factory.manifest), ensure_success=False, timeout=60)
    assert code == 2
    assert stdout == "date,level_m\n"
    assert "All 1 scenes have failed" in stderr


def _unittest_batch_degenerate_manifests(tmp_path: Path) -> None:
    empty = tmp_path / "empty.csv"
    write_manifest(empty, [])
    _, stdout, _ = execute_cli("batch", str(empty), timeout=30)
    assert stdout == "date,level_m\n"

    blank = tmp_path / "blank.yaml"
    blank.write_text("")
    _, stdout, _ = execute_cli("batch", str(blank), timeout=30)
    assert stdout == "date,level_m\n"

    bad = tmp_path / "bad.csv"
    bad.write_text("date,vv_path\n2021-01-01,a.tif\n")
    code, _, stderr = execute_cli("batch", str(bad), ensure_success=False, timeout=30)
    assert code == 2
    assert "manifest:" in stderr and "missing columns" in stderr


def _unittest_batch_yaml_manifest(scene_factory: SceneFactory, tmp_path: Path) -> None:
    row = scene_factory(5)
    moved = tmp_path / "elsewhere"
    shutil.copytree(row.vv_path.parent, moved)
    manifest = moved / "scenes.yaml"
    manifest.write_text(
        "- date: 2021-01-05\n"
        "  vv_path: 2021-01-05_vv.tif\n"
        "  vh_path: 2021-01-05_vh.tif\n"
        "  dem_path: 2021-01-05_dem.tif\n"
        "  aoi_path: 2021-01-05_aoi.geojson\n"
    )
    _, stdout, _ = execute_cli("batch", str(manifest), timeout=60)
    assert stdout.splitlines()[1].startswith("2021-01-05,")
