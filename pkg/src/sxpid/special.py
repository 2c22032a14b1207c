"""Digamma on positive integers and worker-count plumbing."""
from __future__ import annotations

import os

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286060651209008240243


def digamma(x):
    """Digamma function on positive integers (scalar or array).

    Raises
    ------
    ValueError
        If any argument is below 1 or not integral.
    """
    arr = np.asarray(x)
    if arr.dtype.kind not in "iu":
        as_float = arr.astype(float)
        if not np.all(np.isfinite(as_float)) or np.any(as_float != np.round(as_float)):
            raise ValueError("digamma is defined here for positive integers only")
    if np.any(arr < 1):
        raise ValueError("digamma argument must be >= 1")
    out = special.digamma(arr.astype(float))
    return float(out) if out.ndim == 0 else out


def n_workers(workers: int | None = None) -> int:
    """Resolve a worker count; ``PID_SX_THREADS`` caps the default of all cores."""
    if workers is not None:
        return int(workers)
    env = os.environ.get("PID_SX_THREADS")
    if env:
        value = int(env)
        if value < 1:
            raise ValueError(f"PID_SX_THREADS must be >= 1, got {env!r}")
        return value
    return -1


def thread_count(workers: int | None = None) -> int:
    """Like :func:`n_workers` but as a positive thread count."""
    w = n_workers(workers)
    if w == -1:
        return os.cpu_count() or 1
    return max(1, w)
