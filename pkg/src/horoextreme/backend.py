"""Kernel backend selection.

Two interchangeable kernel modules exist: a numba build and a pure numpy
build.  They implement the same functions over the same dtypes and are kept
bit-for-bit identical by construction (see the kernel module docstrings), so
switching backends can never change a result, only its speed.

Selection happens once at import time from the HOROEXTREME_BACKEND
environment variable:

    auto   use numba if it imports, else fall back to numpy (default)
    numba  require the numba build, raise if numba is unavailable
    numpy  force the pure numpy build

The chosen module is exposed as ``backend.kernels``.
"""

from __future__ import annotations

import os

_ENV_VAR = "HOROEXTREME_BACKEND"
_CHOICES = ("auto", "numba", "numpy")


def _load(choice: str):
    if choice not in _CHOICES:
        raise ValueError(
            f"{_ENV_VAR} must be one of {', '.join(_CHOICES)}; got {choice!r}"
        )
    if choice == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    if choice == "numba":
        from . import _kernels_numba

        return _kernels_numba
    try:
        from . import _kernels_numba

        return _kernels_numba
    except ImportError:
        from . import _kernels_numpy

        return _kernels_numpy


kernels = _load(os.environ.get(_ENV_VAR, "auto"))


def backend_name() -> str:
    """Name of the active kernel build, 'numba' or 'numpy'."""
    return kernels.BACKEND


def set_workers(n: int) -> int:
    """Set the kernel thread count, returning the count actually in effect.

    The numpy build is single threaded, so there the call is a no-op that
    returns 1.  Under numba the request is clamped to the thread pool size
    fixed at process start.
    """
    if n < 1:
        raise ValueError("worker count must be at least 1")
    if kernels.BACKEND != "numba":
        return 1
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    n = min(n, limit)
    numba.set_num_threads(n)
    return n
