# Copyright 2026 The asymflow authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the asymflow C++ core."""

from ._asymflow import *  # noqa: F401,F403
from ._asymflow import __version__  # noqa: F401
