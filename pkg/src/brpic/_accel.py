"""Optional numba acceleration.

Hot kernels exist twice: a scalar-loop version compiled with numba and a
vectorized numpy version.  ``BRPIC_DISABLE_NUMBA=1`` (or a missing numba)
makes the numpy path the default; either path can still be requested
explicitly with ``backend="numba"`` / ``backend="numpy"``.
"""

import os

try:
    from numba import njit as _njit
    numba_installed = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    numba_installed = False


def _env_disabled():
    return os.environ.get("BRPIC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


def optional_njit(func):
    """Compile ``func`` lazily with numba when available, else return it unchanged."""
    if numba_installed:
        return _njit(nogil=True, cache=True)(func)
    return func


def default_backend():
    if numba_installed and not _env_disabled():
        return "numba"
    return "numpy"


def resolve_backend(backend=None):
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not numba_installed:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
