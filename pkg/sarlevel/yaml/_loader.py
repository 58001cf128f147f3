# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import datetime
from typing import Any, TextIO
import ruamel.yaml


class Loader:
    """
    YAML parsing facade. The output consists of builtin containers and scalars only.
    Unquoted ISO dates are returned as strings so that manifests look the same regardless of quoting.
    """

    def __init__(self) -> None:
        self._impl = ruamel.yaml.YAML(typ="safe", pure=True)

    def load(self, text: str | TextIO) -> Any:
        return _to_builtin(self._impl.load(text))


def _to_builtin(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_to_builtin(x) for x in obj]
    if isinstance(obj, (datetime.date, datetime.datetime)):
        return obj.isoformat()
    return obj


def _unittest_yaml_loader() -> None:
    doc = Loader().load(
        """
- date: 2021-03-04
  vv_path: a/vv.tif
- {date: "2021-03-16", vv_path: b/vv.tif, level: 12.5}
"""
    )
    assert doc == [
        {"date": "2021-03-04", "vv_path": "a/vv.tif"},
        {"date": "2021-03-16", "vv_path": "b/vv.tif", "level": 12.5},
    ]
    assert Loader().load("") is None
