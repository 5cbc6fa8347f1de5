"""Kernel decorator: numba ``njit`` when available, plain Python otherwise.

Set ``LEAFSELECT_NO_JIT=1`` to force the pure Python path (same code, no
compilation).  The flag is read once, at import time.
"""
import os

NO_JIT = os.environ.get("LEAFSELECT_NO_JIT", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_ENABLED = numba is not None and not NO_JIT


def kernel(fn):
    if JIT_ENABLED:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend():
    return "numba" if JIT_ENABLED else "python"
