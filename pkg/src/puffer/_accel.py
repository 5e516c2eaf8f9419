"""Backend selection for the hot kernels.

Numba is used when importable unless ``PUFFER_BACKEND=numpy`` (or the legacy
``PUFFER_DISABLE_NUMBA=1``) is set in the environment at import time.
"""
import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False


def _requested_backend():
    backend = os.environ.get("PUFFER_BACKEND", "").strip().lower()
    if os.environ.get("PUFFER_DISABLE_NUMBA", "").strip() in ("1", "true", "yes"):
        backend = "numpy"
    if backend not in ("", "numba", "numpy"):
        raise ValueError(f"PUFFER_BACKEND must be 'numba' or 'numpy', got {backend!r}")
    return backend or "numba"


USE_NUMBA = HAS_NUMBA and _requested_backend() == "numba"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise."""
    if not HAS_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)
