"""Optional numba acceleration.

Kernels in :mod:`lambekws.kernels` are written in the numba-compatible subset
of Python/numpy.  They are compiled with ``numba.njit`` unless the environment
variable ``LAMBEKWS_NO_JIT`` is set to a non-empty value other than ``0``, or
numba cannot be imported; in that case the very same functions run under the
interpreter.
"""

import os

_flag = os.environ.get("LAMBEKWS_NO_JIT", "")
JIT_DISABLED = _flag not in ("", "0")

try:
    if JIT_DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def jit(fn):
    """Compile ``fn`` with numba when available; keep ``fn.py_func`` either way."""
    if HAS_NUMBA:
        compiled = _njit(cache=True)(fn)
        return compiled
    fn.py_func = fn
    return fn


def backend_name():
    return "numba" if HAS_NUMBA else "python"
