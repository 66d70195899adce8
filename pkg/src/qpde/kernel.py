"""Hot integer kernels, compiled when available.

The compiled module is picked at import time; setting ``QPDE_PURE_PYTHON=1``
forces the pure-Python implementation.
"""

import os

from . import _pykernel

BACKEND = "python"

if os.environ.get("QPDE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernel as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernel
else:
    _impl = _pykernel

convolve = _impl.convolve
reduce_cyclotomic = _impl.reduce_cyclotomic

__all__ = ["BACKEND", "convolve", "reduce_cyclotomic"]
