# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import math
import dataclasses
from typing import Any


class ConfigError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class EstimatorConfig:
    """
    Parameters of the shoreline-fitness search and of the preprocessing that feeds it.

    >>> c = EstimatorConfig()
    >>> c.sample_num, c.tolerance, c.speckle_radius, c.buffer_distance, c.connectivity
    (9, 1.0, 3, 500.0, 8)
    >>> EstimatorConfig(tolerance=0)
    Traceback (most recent call last):
    ...
    sarlevel.estimator._config.ConfigError: Tolerance shall be positive, got 0
    """

    sample_num: int = 9
    """Candidate levels per search iteration, endpoints included."""

    tolerance: float = 1.0
    """Meters. The search stops once the spacing between candidates does not exceed this."""

    speckle_radius: int = 3
    """Pixels. Radius of the circular focal-median window; zero disables the filter."""

    gaussian_sigma: float = 1.0

    buffer_distance: float = 500.0
    """Meters by which the reservoir outline is expanded to admit levels above the nominal extent."""

    connectivity: int = 8
    """Pixel adjacency used to delimit water bodies; the shoreline always uses 4-adjacency."""

    def __post_init__(self) -> None:
        if not isinstance(self.sample_num, int) or self.sample_num < 3:
            raise ConfigError(f"Sample count shall be an integer not less than 3, got {self.sample_num}")
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ConfigError(f"Tolerance shall be positive, got {self.tolerance}")
        if not isinstance(self.speckle_radius, int) or self.speckle_radius < 0:
            raise ConfigError(f"Speckle kernel radius shall be a non-negative integer, got {self.speckle_radius}")
        if not (self.gaussian_sigma > 0 and math.isfinite(self.gaussian_sigma)):
            raise ConfigError(f"Gaussian sigma shall be positive, got {self.gaussian_sigma}")
        if not (self.buffer_distance >= 0 and math.isfinite(self.buffer_distance)):
            raise ConfigError(f"Buffer distance shall be non-negative, got {self.buffer_distance}")
        if self.connectivity not in (4, 8):
            raise ConfigError(f"Connectivity shall be 4 or 8, got {self.connectivity}")
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "gaussian_sigma", float(self.gaussian_sigma))
        object.__setattr__(self, "buffer_distance", float(self.buffer_distance))

    def replace(self, **changes: Any) -> EstimatorConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _unittest_config() -> None:
    import pytest

    cfg = EstimatorConfig()
    assert cfg.replace(speckle_radius=0).speckle_radius == 0
    assert cfg.to_dict()["buffer_distance"] == 500.0
    for bad in (
        {"sample_num": 2},
        {"tolerance": -1.0},
        {"tolerance": math.inf},
        {"speckle_radius": -1},
        {"gaussian_sigma": 0.0},
        {"buffer_distance": -0.5},
        {"connectivity": 6},
    ):
        with pytest.raises(ConfigError):
            EstimatorConfig(**bad)  # type: ignore
