# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
from pathlib import Path
import numpy as np
from sarlevel.raster import load_raster
from sarlevel.scene import load_manifest
from sarlevel.metrics import load_series
from sarlevel.yaml import Loader
from tests.subprocess import execute_cli


def _unittest_synth(tmp_path: Path) -> None:
    out_dir = tmp_path / "scenes"
    manifest, reference = tmp_path / "scenes.csv", tmp_path / "ref.csv"
    common = ["-O", str(out_dir), "--manifest", str(manifest), "--reference", str(reference), "--size", "40"]
    _, stdout, _ = execute_cli("synth", *common, "--date", "2020-01-02", "--level", "12.25", "--seed", "2")
    record = Loader().load(stdout)
    assert record["date"] == "2020-01-02"
    assert record["vv_path"] == "scenes/2020-01-02_vv.tif"
    execute_cli("syn", *common, "--date", "2020-01-01", "--level", "11.5", "--salt-probability", "0.02")

    rows = load_manifest(manifest)
    assert [r.date.isoformat() for r in rows] == ["2020-01-02", "2020-01-01"]
    assert all(p.is_file() for r in rows for p in (r.vv_path, r.vh_path, r.dem_path, r.aoi_path))
    assert load_series(reference).values == (11.5, 12.25)

    dem = load_raster(rows[0].dem_path)
    assert dem.values.shape == (40, 40)
    vv = load_raster(rows[0].vv_path)
    assert np.count_nonzero(vv.values < -13) == np.count_nonzero(dem.values <= 12.25)

    # Identical options produce identical rasters.
    execute_cli(
        "synth", "-O", str(tmp_path / "copy"), "--date", "2020-01-02", "--level", "12.25", "--seed", "2", "--size", "40"
    )
    copy = load_raster(tmp_path / "copy" / "2020-01-02_vv.tif")
    assert np.array_equal(copy.values, vv.values)


def _unittest_synth_errors(tmp_path: Path) -> None:
    for args in (["--level", "1000"], ["--slope", "0"], ["--size", "2"], ["--salt-probability", "2"]):
        code, _, stderr = execute_cli("synth", "-O", str(tmp_path), *args, ensure_success=False, timeout=30)
        assert code == 1
        assert "Invalid scene parameters" in stderr
    assert not list(tmp_path.iterdir())

    ref = tmp_path / "ref.csv"
    execute_cli("synth", "-O", str(tmp_path), "--reference", str(ref))
    code, _, stderr = execute_cli("synth", "-O", str(tmp_path), "--reference", str(ref), ensure_success=False)
    assert code == 2
    assert "already listed" in stderr
