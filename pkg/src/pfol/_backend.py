"""Kernel backend selection.

Prefers the compiled extension pfol._kernels when present, else falls back
to the numpy module pfol._kernels_py. PFOL_BACKEND=python forces the
fallback; PFOL_BACKEND=c requires the extension and fails loudly if it is
missing. Both backends implement identical signatures and update order.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from .geometry import BALL, BOX, FeasibleSet

_choice = os.environ.get("PFOL_BACKEND", "auto").strip().lower()

if _choice in ("python", "py", "pure"):
    kernels = _kernels_py
    BACKEND = "python"
elif _choice in ("c", "compiled", "cython"):
    from . import _kernels  # noqa: F401

    kernels = _kernels
    BACKEND = "c"
elif _choice in ("auto", ""):
    try:
        from . import _kernels  # noqa: F401

        kernels = _kernels
        BACKEND = "c"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
else:
    raise RuntimeError(f"unrecognized PFOL_BACKEND value {_choice!r}")


def backend_name() -> str:
    return BACKEND


def set_code(set_: FeasibleSet) -> tuple[int, np.ndarray]:
    """Encode a set as (kind code, parameter vector) for the kernels."""
    if set_.kind == BALL:
        return _kernels_py.KIND_BALL, np.array([set_.rho])
    if set_.kind == BOX:
        return _kernels_py.KIND_BOX, set_.widths.copy()
    return _kernels_py.KIND_L1, np.array([set_.rho])
