#!/usr/bin/env python3
#
# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

import setuptools

setuptools.setup()
