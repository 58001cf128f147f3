# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

import io
from typing import Any, TextIO
import numpy as np
import ruamel.yaml


class Dumper:
    """
    YAML generation facade. Mapping order is retained. NumPy scalars are emitted as plain numbers.
    """

    def __init__(self, explicit_start: bool = False, prefer_block_style: bool = True):
        self._impl = ruamel.yaml.YAML(typ="rt")
        self._impl.explicit_start = explicit_start
        self._impl.default_flow_style = False if prefer_block_style else None
        self._impl.width = 2**31  # Unlimited width

    def dump(self, data: Any, stream: TextIO) -> None:
        self._impl.dump(_to_builtin(data), stream)

    def dumps(self, data: Any) -> str:
        s = io.StringIO()
        self.dump(data, s)
        out = s.getvalue()
        # Scalar documents end with an explicit document end marker that is of no use here.
        suf = "\n...\n"
        return out[:-4] if out.endswith(suf) else out


def _to_builtin(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(x) for x in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _unittest_yaml_dumper() -> None:
    ref = Dumper(explicit_start=True).dumps({"r2": np.float64(0.75), "n_dates": np.int64(3), "excluded": [1, 2]})
    assert (
        ref
        == """---
r2: 0.75
n_dates: 3
excluded:
- 1
- 2
"""
    )
    assert Dumper().dumps({"r2": None}) == "r2:\n"
