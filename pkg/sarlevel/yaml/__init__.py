# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Thin facade over ruamel.yaml so that the rest of the package does not depend on its unstable API.
Used for YAML manifests and for YAML-formatted records on stdout.
"""

from ._dumper import Dumper as Dumper
from ._loader import Loader as Loader
