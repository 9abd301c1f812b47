"""Backend selection for the pair-sum kernels.

The compiled extension is preferred; DELTABOLT_PURE=1 forces the NumPy
fallback (and the fallback is used silently when the extension failed to
build). DELTABOLT_THREADS sets the OpenMP thread count, default 1 so that
results are reproducible out of the box.
"""

from __future__ import annotations

import math
import os

if os.environ.get("DELTABOLT_PURE", "") == "1":
    from . import _corepy as kernels

    _BACKEND = "numpy"
else:
    try:
        from . import _core as kernels

        _BACKEND = "compiled"
    except ImportError:
        from . import _corepy as kernels

        _BACKEND = "numpy"


def backend_name() -> str:
    return _BACKEND


def num_threads() -> int:
    raw = os.environ.get("DELTABOLT_THREADS", "1")
    try:
        nt = int(raw)
    except ValueError as exc:
        raise ValueError(f"DELTABOLT_THREADS must be an integer, got {raw!r}") from exc
    if nt < 1:
        raise ValueError(f"DELTABOLT_THREADS must be >= 1, got {nt}")
    return nt


def pad_width(n: int) -> int:
    """Zero-padding that keeps every post-collision read in bounds.

    Both interpolation reads live within |offset| <= sqrt(3)*(n-1) cells of
    the box; +2 covers the floor/ceil corner.
    """
    return int(math.ceil(math.sqrt(3.0) * (n - 1))) + 2
