"""Kernel backend selection.

SIGNBALANCE_BACKEND=numpy forces the pure-numpy fallback,
SIGNBALANCE_BACKEND=numba forces the compiled kernels (error if numba is
missing).  Unset, the compiled kernels are used when numba imports.
Both backends produce bit-identical trajectories.
"""

from __future__ import annotations

import os

from . import kernels_numpy

ENV_VAR = "SIGNBALANCE_BACKEND"

try:
    from . import kernels_numba

    HAS_NUMBA = True
except ImportError:
    kernels_numba = None
    HAS_NUMBA = False


def backend_name(override: str | None = None) -> str:
    choice = override or os.environ.get(ENV_VAR, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("SIGNBALANCE_BACKEND=numba but numba is not importable")
        return "numba"
    if choice not in ("", None):
        raise ValueError(f"unknown backend {choice!r}; expected numba or numpy")
    return "numba" if HAS_NUMBA else "numpy"


def get_kernels(override: str | None = None):
    return kernels_numba if backend_name(override) == "numba" else kernels_numpy
