"""Column-wise pretransformations applied before estimation.

The redundancy measure compares neighbourhoods across variables, so the
relative scale of the columns matters. Three modes are offered: ``none``,
``standardize`` (population standard deviation) and ``copula`` (ranks
mapped to ``(rank - 0.5) / N``, ties get their average rank).
"""
from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateColumnError

if TYPE_CHECKING:
    from .knn import SampleSet

MODES = ("none", "standardize", "copula")


def _as_2d(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def standardize_array(x) -> np.ndarray:
    """Shift every column to mean 0 and scale it to unit population std."""
    arr = _as_2d(x)
    mean = arr.mean(axis=0)
    std = arr.std(axis=0)
    bad = np.flatnonzero(~(std > 0))
    if bad.size:
        raise DegenerateColumnError(f"column(s) {bad.tolist()} have zero standard deviation")
    out = (arr - mean) / std
    return out.reshape(np.shape(x))


def copula_array(x) -> np.ndarray:
    """Replace every column by its empirical CDF values ``(rank - 0.5) / N``."""
    arr = _as_2d(x)
    n = arr.shape[0]
    if n < 2:
        raise ValueError("copula transform needs at least two samples")
    out = (rankdata(arr, method="average", axis=0) - 0.5) / n
    return out.reshape(np.shape(x))


def _map_samples(samples: "SampleSet", func) -> "SampleSet":
    from .knn import SampleSet

    return SampleSet(func(samples.target), [func(s) for s in samples.sources])


def standardize(samples):
    """Standardize a :class:`~sxpid.knn.SampleSet` or a plain array, column by column.

    Raises
    ------
    DegenerateColumnError
        If any column is constant.
    """
    if hasattr(samples, "sources"):
        return _map_samples(samples, standardize_array)
    return standardize_array(samples)


def copula_transform(samples):
    """Rank-transform a :class:`~sxpid.knn.SampleSet` or a plain array, column by column."""
    if hasattr(samples, "sources"):
        return _map_samples(samples, copula_array)
    return copula_array(samples)


def preprocess(samples, mode: str):
    """Apply one of :data:`MODES`."""
    if mode == "none":
        return samples
    if mode == "standardize":
        return standardize(samples)
    if mode == "copula":
        return copula_transform(samples)
    raise ValueError(f"unknown preprocessing mode {mode!r}; choose from {MODES}")
