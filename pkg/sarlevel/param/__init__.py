# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.
