"""Kernel backend selection: compiled extension if available, else pure Python.

Set ``LAPBOUND_PURE=1`` in the environment to force the fallback, e.g. for
benchmarking or debugging.  The choice is made once at import time.
"""

import os

from . import _kernels_py

__all__ = [
    "HAVE_COMPILED",
    "USING_COMPILED",
    "backend_name",
    "schwarz_sweep_kernel",
    "gauss_seidel_kernel",
]

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None
USING_COMPILED = HAVE_COMPILED and os.environ.get("LAPBOUND_PURE", "") != "1"

if USING_COMPILED:
    schwarz_sweep_kernel = _compiled.schwarz_sweep_kernel
    gauss_seidel_kernel = _compiled.gauss_seidel_kernel
else:
    schwarz_sweep_kernel = _kernels_py.schwarz_sweep_kernel
    gauss_seidel_kernel = _kernels_py.gauss_seidel_kernel


def backend_name() -> str:
    return "compiled" if USING_COMPILED else "pure-python"
