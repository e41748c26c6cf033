"""Hot-kernel backend: compiled extension when built, NumPy otherwise.

Set ``IRREGFLOW_PURE_PYTHON=1`` to force the fallback (used by the parity
tests and the benchmark).
"""
from __future__ import annotations

import os

from .tables import BallTable, build_table

if os.environ.get("IRREGFLOW_PURE_PYTHON"):
    from . import pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "cython"
    except ImportError:
        from . import pykernels as _impl

        BACKEND = "python"

stretch_apply = _impl.stretch_apply
stretch_apply_tan = _impl.stretch_apply_tan
annulus_apply = _impl.annulus_apply
annulus_apply_tan = _impl.annulus_apply_tan
balls_apply = _impl.balls_apply
balls_apply_tan = _impl.balls_apply_tan
lookup = _impl.lookup
bad_bands = _impl.bad_bands

__all__ = [
    "BACKEND",
    "BallTable",
    "build_table",
    "stretch_apply",
    "stretch_apply_tan",
    "annulus_apply",
    "annulus_apply_tan",
    "balls_apply",
    "balls_apply_tan",
    "lookup",
    "bad_bands",
]
