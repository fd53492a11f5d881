"""Kernel backend selection.

The hot numeric kernels exist twice: as plain loop functions that numba can
compile, and as vectorized numpy fallbacks. The environment variable
``FERMIREP_BACKEND`` picks the path at import time:

* ``auto`` (default) -- use numba when importable, else numpy
* ``numba``          -- require numba, raise if unavailable
* ``numpy``          -- force the pure-numpy fallback
"""
from __future__ import annotations

import os

ENV_VAR = "FERMIREP_BACKEND"

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def _resolve() -> str:
    requested = os.environ.get(ENV_VAR, "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be 'auto', 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not HAVE_NUMBA:
            raise ImportError(f"{ENV_VAR}=numba but numba is not importable")
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


#: backend active for this process ("numba" or "numpy")
ACTIVE = _resolve()


def active_backend() -> str:
    """Name of the kernel path in use: "numba" or "numpy"."""
    return ACTIVE


def using_numba() -> bool:
    return ACTIVE == "numba"
