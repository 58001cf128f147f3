# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.
# pylint: disable=wrong-import-position

"""
Reservoir water level estimation from SAR imagery and a DEM by shoreline edge fitness maximization.
"""

from importlib.resources import files


__version__: str = (files(__name__) / "VERSION").read_text(encoding="utf8").strip()
__version_info__: tuple[int, ...] = tuple(map(int, __version__.split(".")[:3]))
__license__ = "MIT"

from .main import main as main, subcommand as subcommand, Purser as Purser, pass_purser as pass_purser
from .main import get_logger as get_logger
from . import cmd as cmd
