"""k-nearest-neighbour estimator of shared-exclusion redundancy.

For an antichain ``alpha`` the joint search region around sample ``i`` is a
union over collections ``a`` of max-norm balls in ``T x S_a``. Its radius
``eps_i`` is the distance to the k-th neighbour under

    d_alpha(i, j) = max(d_T, min_a max_{j in a} d_{S_j}) = min_a d_{T x S_a}.

The same radius is then used to count neighbours in the union of source
balls (``n_alpha``) and in the target ball (``n_T``), and

    I = psi(k) + psi(N) - <psi(n_alpha)> - <psi(n_T)>

in nats, reported in bits. Counts include the query point itself and use
a strict ``distance < eps_i``. With this convention the formula has no
``+1`` inside the digamma terms (the classical KSG ``psi(n + 1)`` counts
neighbours excluding the query point).
"""
from __future__ import annotations

import itertools
import math
import warnings
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .decomposition import PidDecomposition
from .errors import DegenerateGeometryWarning, InsufficientSamplesError
from .lattice import Antichain, as_antichain, redundancy_lattice
from .preprocessing import preprocess as _preprocess
from .special import digamma, n_workers

DEFAULT_K = 4


def _block(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 1-d or 2-d array")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    arr.setflags(write=False)
    return arr


class SampleSet:
    """``N`` joint realizations of a target block and ``n`` source blocks.

    Parameters
    ----------
    target : array_like, shape (N,) or (N, d_T)
    sources : sequence of array_like, each shape (N,) or (N, d_i)
    """

    def __init__(self, target, sources: Sequence):
        self.target = _block(target, "target")
        self.sources = tuple(_block(s, f"source {i + 1}") for i, s in enumerate(sources))
        if not self.sources:
            raise ValueError("at least one source is required")
        n = self.target.shape[0]
        for i, s in enumerate(self.sources, start=1):
            if s.shape[0] != n:
                raise ValueError(f"source {i} has {s.shape[0]} rows, target has {n}")

    @classmethod
    def from_columns(cls, data, target_cols: Sequence[int], source_cols: Sequence[Sequence[int]]) -> "SampleSet":
        """Build from a 2-d array and 0-based column groups."""
        data = np.asarray(data, dtype=float)
        return cls(data[:, list(target_cols)], [data[:, list(c)] for c in source_cols])

    @property
    def n_samples(self) -> int:
        return self.target.shape[0]

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    def source_block(self, collection: Sequence[int]) -> np.ndarray:
        """Concatenated columns of the sources in ``collection`` (1-based)."""
        return np.hstack([self.sources[i - 1] for i in collection])

    def joint_block(self, collection: Sequence[int]) -> np.ndarray:
        return np.hstack([self.target] + [self.sources[i - 1] for i in collection])

    def as_array(self) -> np.ndarray:
        return np.hstack((self.target,) + self.sources)

    def with_target(self, target) -> "SampleSet":
        return SampleSet(target, self.sources)

    def __repr__(self) -> str:
        dims = ", ".join(str(s.shape[1]) for s in self.sources)
        return f"SampleSet(N={self.n_samples}, target_dim={self.target.shape[1]}, source_dims=({dims}))"


def jitter(samples: SampleSet, seed=None, scale: float = 1e-10) -> SampleSet:
    """Add uniform noise of half-width ``scale * column std`` to break exact ties."""
    rng = np.random.default_rng(seed)

    def noisy(block):
        width = scale * block.std(axis=0)
        return block + rng.uniform(-1.0, 1.0, size=block.shape) * width

    return SampleSet(noisy(samples.target), [noisy(s) for s in samples.sources])


class _Trees:
    """Lazily built kd-trees over target, source and joint subspaces."""

    def __init__(self, samples: SampleSet, workers: int | None = None):
        self.samples = samples
        self.workers = n_workers(workers)
        self._cache: dict[tuple, tuple[cKDTree, np.ndarray]] = {}

    def get(self, collection: tuple[int, ...], with_target: bool):
        key = (tuple(collection), with_target)
        if key not in self._cache:
            if with_target:
                data = self.samples.joint_block(collection) if collection else self.samples.target
            else:
                data = self.samples.source_block(collection)
            data = np.ascontiguousarray(data)
            self._cache[key] = (cKDTree(data), data)
        return self._cache[key]

    def count_within(self, collection: tuple[int, ...], with_target: bool, radius: np.ndarray) -> np.ndarray:
        tree, data = self.get(collection, with_target)
        return np.asarray(
            tree.query_ball_point(data, radius, p=np.inf, return_length=True, workers=self.workers),
            dtype=np.int64,
        )


def region_distance(query: Sequence, other: Sequence, alpha: Antichain) -> float:
    """Smallest radius whose ``alpha``-shaped region around ``query`` contains ``other``.

    ``query`` and ``other`` are sequences ``(t, s_1, ..., s_n)`` of blocks
    (scalars or 1-d arrays).
    """
    def cheb(u, v):
        return float(np.max(np.abs(np.atleast_1d(np.asarray(u, float)) - np.atleast_1d(np.asarray(v, float)))))

    d_t = cheb(query[0], other[0])
    d_s = [cheb(q, o) for q, o in zip(query[1:], other[1:])]
    return max(d_t, min(max(d_s[j - 1] for j in a) for a in alpha.sets))


def _check_k(samples: SampleSet, k: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k >= samples.n_samples:
        raise InsufficientSamplesError(f"k={k} needs at least {k + 1} samples, got {samples.n_samples}")


def compute_epsilons(samples: SampleSet, alpha, k: int = DEFAULT_K, *, workers=None, _trees=None) -> np.ndarray:
    """Distance from every sample to its k-th neighbour in the ``alpha`` region.

    The k nearest neighbours are found separately in each joint subspace
    ``T x S_a`` and the candidate lists are merged: duplicates keep their
    smallest distance and the k-th smallest distance over the merged list is
    returned. This equals the brute-force k-th smallest region distance.
    """
    alpha = as_antichain(alpha, samples.n_sources)
    _check_k(samples, k)
    trees = _trees or _Trees(samples, workers)
    n = samples.n_samples
    dist_parts, idx_parts = [], []
    for a in alpha.sets:
        tree, data = trees.get(a, True)
        d, j = tree.query(data, k=k + 1, p=np.inf, workers=trees.workers)
        dist_parts.append(d.reshape(n, -1))
        idx_parts.append(j.reshape(n, -1))
    dist = np.hstack(dist_parts)
    idx = np.hstack(idx_parts)
    dist = np.where(idx == np.arange(n)[:, None], np.inf, dist)
    # candidates sorted by (index, distance): repeated indices after the first are dropped
    order = np.lexsort((dist, idx), axis=-1)
    idx = np.take_along_axis(idx, order, axis=1)
    dist = np.take_along_axis(dist, order, axis=1)
    repeat = np.zeros_like(idx, dtype=bool)
    repeat[:, 1:] = idx[:, 1:] == idx[:, :-1]
    dist[repeat] = np.inf
    return np.partition(dist, k - 1, axis=1)[:, k - 1]


def _strict_radius(eps: np.ndarray) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    # largest float below eps turns "<= r" queries into "< eps"; eps == 0 counts exact duplicates
    return np.where(eps > 0, np.nextafter(eps, 0.0), 0.0)


def count_marginal(samples: SampleSet, alpha, eps, *, workers=None, _trees=None) -> np.ndarray:
    """Number of samples inside the union of source balls of radius ``eps_i``.

    Counts are strict (``distance < eps_i``) and include the query point. The
    union is counted exactly by inclusion-exclusion over sub-families of
    ``alpha``; the intersection of max-norm balls over several collections is
    a single ball in the subspace of their union.
    """
    alpha = as_antichain(alpha, samples.n_sources)
    trees = _trees or _Trees(samples, workers)
    radius = _strict_radius(eps)
    counts: dict[tuple[int, ...], np.ndarray] = {}
    total = np.zeros(samples.n_samples, dtype=np.int64)
    for size in range(1, len(alpha.sets) + 1):
        sign = 1 if size % 2 else -1
        for family in itertools.combinations(alpha.sets, size):
            union = tuple(sorted(set().union(*family)))
            if union not in counts:
                counts[union] = trees.count_within(union, False, radius)
            total += sign * counts[union]
    return total


def count_target(samples: SampleSet, eps, *, workers=None, _trees=None) -> np.ndarray:
    """Number of samples with target distance ``< eps_i``, query point included."""
    trees = _trees or _Trees(samples, workers)
    return trees.count_within((), True, _strict_radius(eps))


def _mean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / len(values)


def _redundancy_from_counts(k: int, n: int, n_alpha: np.ndarray, n_t: np.ndarray) -> float:
    nats = digamma(k) + digamma(n) - _mean(digamma(n_alpha)) - _mean(digamma(n_t))
    return nats / math.log(2)


def _estimate(samples: SampleSet, alpha: Antichain, k: int, trees: _Trees) -> tuple[float, bool]:
    eps = compute_epsilons(samples, alpha, k, _trees=trees)
    degenerate = bool(np.any(eps == 0))
    n_alpha = count_marginal(samples, alpha, eps, _trees=trees)
    n_t = count_target(samples, eps, _trees=trees)
    return _redundancy_from_counts(k, samples.n_samples, n_alpha, n_t), degenerate


def _degenerate_warning() -> None:
    warnings.warn(
        "some k-th neighbour distances are zero (exact duplicate points); "
        "neighbour counts fall back to counting duplicates",
        DegenerateGeometryWarning,
        stacklevel=3,
    )


def estimate_redundancy(
    samples: SampleSet,
    alpha,
    k: int = DEFAULT_K,
    *,
    workers: int | None = None,
) -> float:
    """Estimate the shared-exclusion redundancy ``I_cap(T : alpha)`` in bits.

    Parameters
    ----------
    samples : SampleSet
    alpha : Antichain or str
        Lattice node, e.g. ``"{1}{2}"``.
    k : int
        Neighbour order (default 4).
    workers : int, optional
        Threads for tree queries; defaults to ``PID_SX_THREADS`` or all cores.
        The result does not depend on it.
    """
    alpha = as_antichain(alpha, samples.n_sources)
    _check_k(samples, k)
    value, degenerate = _estimate(samples, alpha, k, _Trees(samples, workers))
    if degenerate:
        _degenerate_warning()
    return value


def estimate_pid(
    samples: SampleSet,
    n_sources: int | None = None,
    k: int = DEFAULT_K,
    *,
    preprocess: str = "none",
    jitter_seed=None,
    workers: int | None = None,
) -> PidDecomposition:
    """Estimate every lattice redundancy and the corresponding atoms.

    ``preprocess`` is applied to all columns first (see
    :mod:`sxpid.preprocessing`). Passing ``jitter_seed`` adds tie-breaking
    noise of relative size 1e-10 before estimation; by default data are used
    exactly as given.
    """
    n = samples.n_sources if n_sources is None else n_sources
    if n != samples.n_sources:
        raise ValueError(f"n_sources={n} but the sample set has {samples.n_sources} sources")
    lattice = redundancy_lattice(n)
    _check_k(samples, k)
    data = _preprocess(samples, preprocess)
    if jitter_seed is not None:
        data = jitter(data, jitter_seed)
    trees = _Trees(data, workers)
    i_cap = {}
    degenerate = False
    for alpha in lattice.nodes:
        i_cap[alpha], deg = _estimate(data, alpha, k, trees)
        degenerate |= deg
    if degenerate:
        _degenerate_warning()
    meta = {
        "method": "knn-estimator",
        "k": int(k),
        "n_samples": samples.n_samples,
        "preprocess": preprocess,
        "jitter_seed": jitter_seed,
        "warnings": ["degenerate-geometry"] if degenerate else [],
    }
    return PidDecomposition.from_redundancies(i_cap, meta)
