# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

import pkgutil
import importlib

# BY CONVENTION, the COMMAND and the MODULE it is defined in should be NAMED IDENTICALLY.
for _info in pkgutil.iter_modules(__path__):
    importlib.import_module(f"{__name__}.{_info.name}")
