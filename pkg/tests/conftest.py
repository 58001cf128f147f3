# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import datetime
import dataclasses
from pathlib import Path
from typing import Any
import pytest
from sarlevel.synth import SynthParams, make_scene, write_scene
from sarlevel.scene import ManifestRow, append_manifest_row
from sarlevel.metrics import append_series_row


@dataclasses.dataclass()
class SceneFactory:
    """
    Writes synthetic scenes into a directory, listing each in ``manifest.csv`` and its true level in ``reference.csv``.
    """

    directory: Path

    @property
    def manifest(self) -> Path:
        return self.directory / "manifest.csv"

    @property
    def reference(self) -> Path:
        return self.directory / "reference.csv"

    def __call__(self, day: int, level: float = 12.0, **params: Any) -> ManifestRow:
        date = datetime.date(2021, 1, day)
        p = SynthParams(size=48, true_level=level, seed=day, date=date).replace(**params)
        row = write_scene(make_scene(p), self.directory / "scenes")
        append_manifest_row(self.manifest, row)
        append_series_row(self.reference, date, level)
        return row


@pytest.fixture()
def scene_factory(tmp_path: Path) -> SceneFactory:
    return SceneFactory(tmp_path)
