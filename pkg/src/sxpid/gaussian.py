"""Reference PID values for jointly Gaussian gates.

Mutual information terms come from the log-determinant formula; the
redundancies of multi-collection antichains are Monte-Carlo averages of the
local redundancy evaluated with exact Gaussian densities.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import log_ndtr, logsumexp

from .decomposition import PidDecomposition
from .errors import StepTooLargeError, UndefinedLocalValueError
from .lattice import Antichain, as_antichain, redundancy_lattice
from .preprocessing import MODES
from .special import thread_count

GATES = ("redundant", "copy", "unique", "sum", "skewed_sum")
REDUNDANT_DELTA = 1e-9
_CHUNK = 1 << 16
_LOG2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class GateSpec:
    """A zero-mean Gaussian system with a target block and source blocks.

    Coordinates are ordered ``(target..., source 1..., source 2..., ...)``;
    ``target`` and ``sources`` hold 0-based coordinate indices.
    """

    name: str
    covariance: np.ndarray
    target: tuple[int, ...]
    sources: tuple[tuple[int, ...], ...]
    sigma: float
    delta: float = 0.0

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "target", tuple(int(i) for i in self.target))
        object.__setattr__(self, "sources", tuple(tuple(int(i) for i in s) for s in self.sources))
        dim = cov.shape[0]
        if cov.shape != (dim, dim) or not np.allclose(cov, cov.T, rtol=0, atol=0):
            raise ValueError("covariance must be a symmetric square matrix")
        used = sorted(self.target + sum(self.sources, ()))
        if used != list(range(dim)):
            raise ValueError("target and sources must partition the coordinates")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        np.linalg.cholesky(cov)

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    def coords(self, collection: Sequence[int], with_target: bool = False) -> tuple[int, ...]:
        """Coordinate indices for a collection of 1-based source indices."""
        idx = sum((self.sources[i - 1] for i in collection), ())
        return (self.target + idx) if with_target else idx

    def sample(self, n: int, seed=None) -> np.ndarray:
        """``n`` draws as an ``(n, dim)`` array."""
        rng = np.random.default_rng(seed)
        chol = np.linalg.cholesky(self.covariance)
        return rng.standard_normal((n, self.dim)) @ chol.T

    def sample_set(self, n: int, seed=None):
        from .knn import SampleSet

        x = self.sample(n, seed)
        return SampleSet(x[:, list(self.target)], [x[:, list(s)] for s in self.sources])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "sigma": self.sigma,
            "delta": self.delta,
            "target": list(self.target),
            "sources": [list(s) for s in self.sources],
            "covariance": self.covariance.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "GateSpec":
        return cls(
            name=data["name"],
            covariance=np.array(data["covariance"], dtype=float),
            target=tuple(data["target"]),
            sources=tuple(tuple(s) for s in data["sources"]),
            sigma=float(data["sigma"]),
            delta=float(data.get("delta", 0.0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "GateSpec":
        return cls.from_dict(json.loads(text))


def make_gate(name: str, sigma: float = 0.01) -> GateSpec:
    """Covariance of one of the continuous toy gates.

    Sources are standard normal. ``redundant``: ``S2 = S1``, ``T = S1 + noise``
    (off-diagonals shrunk by ``1e-9`` to keep the matrix regular); ``copy``:
    ``T = (S1, S2) + noise``; ``unique``: ``T = S1 + noise`` with ``S2``
    independent; ``sum``: ``T = S1 + S2 + noise``; ``skewed_sum``: ``S1`` has
    variance 1.2 and ``T = S1 + S2 + noise``. ``sigma`` is the noise std.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    v = sigma**2
    delta = 0.0
    if name == "redundant":
        delta = REDUNDANT_DELTA
        c = 1 - delta
        cov = [[1 + v, c, c], [c, 1, c], [c, c, 1]]
    elif name == "copy":
        cov = [
            [1 + v, 0, 1, 0],
            [0, 1 + v, 0, 1],
            [1, 0, 1, 0],
            [0, 1, 0, 1],
        ]
        return GateSpec(name, np.array(cov, float), (0, 1), ((2,), (3,)), sigma)
    elif name == "unique":
        cov = [[1 + v, 1, 0], [1, 1, 0], [0, 0, 1]]
    elif name == "sum":
        cov = [[2 + v, 1, 1], [1, 1, 0], [1, 0, 1]]
    elif name == "skewed_sum":
        cov = [[2.2 + v, 1.2, 1], [1.2, 1.2, 0], [1, 0, 1]]
    else:
        raise ValueError(f"unknown gate {name!r}; choose from {', '.join(GATES)}")
    return GateSpec(name, np.array(cov, float), (0,), ((1,), (2,)), sigma, delta)


def _logdet(cov: np.ndarray) -> float:
    chol = np.linalg.cholesky(cov)
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def gaussian_mi(gate: GateSpec, collection: Sequence[int]) -> float:
    """``I(T : S_collection)`` in bits from the log-determinant formula.

    Raises
    ------
    numpy.linalg.LinAlgError
        If a sub-covariance is not positive definite.
    """
    cov = gate.covariance
    t = list(gate.target)
    s = list(gate.coords(collection))
    ts = t + s
    nats = 0.5 * (
        _logdet(cov[np.ix_(t, t)]) + _logdet(cov[np.ix_(s, s)]) - _logdet(cov[np.ix_(ts, ts)])
    )
    return nats / _LOG2


class _LogDensity:
    """Log density of a Gaussian marginal, optionally of transformed coordinates."""

    def __init__(self, gate: GateSpec, coords: Sequence[int], preprocess: str):
        self.coords = list(coords)
        sub = gate.covariance[np.ix_(self.coords, self.coords)]
        self.chol = np.linalg.cholesky(sub)
        self.const = -0.5 * (len(self.coords) * math.log(2 * math.pi) + _logdet(sub))
        self.scales = np.sqrt(np.diag(sub))
        self.preprocess = preprocess

    def __call__(self, x: np.ndarray) -> np.ndarray:
        from scipy.linalg import solve_triangular

        y = x[:, self.coords]
        z = solve_triangular(self.chol, y.T, lower=True)
        out = self.const - 0.5 * np.einsum("ij,ij->j", z, z)
        # change of variables for per-coordinate transforms
        if self.preprocess == "standardize":
            out = out + float(np.sum(np.log(self.scales)))
        elif self.preprocess == "copula":
            u = y / self.scales
            out = out - np.sum(-0.5 * u * u - 0.5 * math.log(2 * math.pi) - np.log(self.scales), axis=1)
        return out


def gaussian_log_density(gate: GateSpec, coords: Sequence[int], x, preprocess: str = "none") -> np.ndarray:
    """Natural-log density of the marginal on ``coords`` at rows of ``x`` (full coordinates)."""
    return _LogDensity(gate, coords, preprocess)(np.atleast_2d(np.asarray(x, float)))


def transform_draws(gate: GateSpec, x: np.ndarray, preprocess: str) -> np.ndarray:
    """Map raw draws to the preprocessed variables (exact marginal CDFs for copula)."""
    scales = np.sqrt(np.diag(gate.covariance))
    if preprocess == "none":
        return x
    if preprocess == "standardize":
        return x / scales
    if preprocess == "copula":
        return np.exp(log_ndtr(x / scales))
    raise ValueError(f"unknown preprocessing mode {preprocess!r}")


@dataclass
class DensityPoint:
    """Densities at one point for the terms of the local redundancy.

    ``f_s`` and ``f_ts`` map a collection (tuple of 1-based source indices)
    to ``f_{S_a}`` and ``f_{T,S_a}``.
    """

    f_t: float
    f_s: dict[tuple[int, ...], float] = field(default_factory=dict)
    f_ts: dict[tuple[int, ...], float] = field(default_factory=dict)

    def scaled(self, other: "DensityPoint", h: float) -> "DensityPoint":
        """Componentwise ``self + h * other``."""
        return DensityPoint(
            self.f_t + h * other.f_t,
            {a: v + h * other.f_s.get(a, 0.0) for a, v in self.f_s.items()},
            {a: v + h * other.f_ts.get(a, 0.0) for a, v in self.f_ts.items()},
        )

    def values(self) -> list[float]:
        return [self.f_t, *self.f_s.values(), *self.f_ts.values()]


def _alpha_from_point(dens: DensityPoint, alpha) -> Antichain:
    if isinstance(alpha, Antichain):
        return alpha
    n = max(max(a) for a in dens.f_s)
    return as_antichain(alpha, n)


def local_isx_continuous(dens: DensityPoint, alpha) -> float:
    """Continuous local redundancy ``log2[sum f_TSa / (f_T * sum f_Sa)]`` in bits.

    Raises
    ------
    UndefinedLocalValueError
        If the target density or the summed source density is not positive.
    """
    alpha = _alpha_from_point(dens, alpha)
    num = math.fsum(dens.f_ts[a] for a in alpha.sets)
    den = math.fsum(dens.f_s[a] for a in alpha.sets)
    if not (dens.f_t > 0 and den > 0 and num > 0):
        raise UndefinedLocalValueError(f"non-positive density (f_T={dens.f_t}, sum f_S={den}, sum f_TS={num})")
    return math.log2(num / (dens.f_t * den))


def density_point(gate: GateSpec, x, alpha, preprocess: str = "none") -> DensityPoint:
    """Exact densities of ``gate`` at the full-coordinate point ``x``."""
    alpha = as_antichain(alpha, gate.n_sources)
    x = np.atleast_2d(np.asarray(x, float))
    f_t = float(np.exp(gaussian_log_density(gate, gate.target, x, preprocess))[0])
    f_s = {a: float(np.exp(gaussian_log_density(gate, gate.coords(a), x, preprocess))[0]) for a in alpha.sets}
    f_ts = {
        a: float(np.exp(gaussian_log_density(gate, gate.coords(a, True), x, preprocess))[0]) for a in alpha.sets
    }
    return DensityPoint(f_t, f_s, f_ts)


@dataclass(frozen=True)
class MCResult:
    """Monte-Carlo mean and standard error of the mean, in bits."""

    mean: float
    stderr: float
    n_samples: int

    def __iter__(self):
        return iter((self.mean, self.stderr))


class _LocalEvaluator:
    def __init__(self, gate: GateSpec, alphas: Sequence[Antichain], preprocess: str):
        if preprocess not in MODES:
            raise ValueError(f"unknown preprocessing mode {preprocess!r}")
        self.gate = gate
        self.alphas = list(alphas)
        self.chol = np.linalg.cholesky(gate.covariance)
        collections = sorted({a for alpha in self.alphas for a in alpha.sets})
        self.log_t = _LogDensity(gate, gate.target, preprocess)
        self.log_s = {a: _LogDensity(gate, gate.coords(a), preprocess) for a in collections}
        self.log_ts = {a: _LogDensity(gate, gate.coords(a, True), preprocess) for a in collections}

    def chunk(self, seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
        """Sums ``(sum, sum of squares)`` of local values per antichain, shape (n_alpha, 2)."""
        rng = np.random.default_rng(seed_seq)
        x = rng.standard_normal((size, self.gate.dim)) @ self.chol.T
        lt = self.log_t(x)
        ls = {a: f(x) for a, f in self.log_s.items()}
        lts = {a: f(x) for a, f in self.log_ts.items()}
        out = np.empty((len(self.alphas), 2))
        for row, alpha in enumerate(self.alphas):
            num = logsumexp(np.stack([lts[a] for a in alpha.sets]), axis=0)
            den = logsumexp(np.stack([ls[a] for a in alpha.sets]), axis=0)
            local = (num - den - lt) / _LOG2
            out[row] = (math.fsum(local.tolist()), math.fsum((local * local).tolist()))
        return out


def _mc_many(gate: GateSpec, alphas, n_samples: int, seed, preprocess: str, workers=None) -> list[MCResult]:
    n_samples = int(n_samples)
    if n_samples < 2:
        raise ValueError("need at least two Monte-Carlo samples")
    evaluator = _LocalEvaluator(gate, alphas, preprocess)
    sizes = [_CHUNK] * (n_samples // _CHUNK)
    if n_samples % _CHUNK:
        sizes.append(n_samples % _CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    threads = min(thread_count(workers), len(sizes))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(evaluator.chunk, streams, sizes))
    else:
        parts = [evaluator.chunk(s, m) for s, m in zip(streams, sizes)]
    results = []
    for row in range(len(evaluator.alphas)):
        total = math.fsum(p[row, 0] for p in parts)
        total_sq = math.fsum(p[row, 1] for p in parts)
        mean = total / n_samples
        var = max(total_sq / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
        results.append(MCResult(mean, math.sqrt(var / n_samples), n_samples))
    return results


def mc_redundancy(
    gate: GateSpec,
    alpha,
    n_samples: int = 1_000_000,
    seed=0,
    *,
    preprocess: str = "none",
    workers: int | None = None,
) -> MCResult:
    """Monte-Carlo estimate of the continuous redundancy of ``gate`` for ``alpha``.

    Draws are split into fixed-size chunks with independent child seeds, so
    the result depends only on ``seed`` and ``n_samples`` and not on the
    number of worker threads.

    Returns
    -------
    MCResult
        Mean and standard error in bits; unpacks as ``mean, stderr``.
    """
    alpha = as_antichain(alpha, gate.n_sources)
    return _mc_many(gate, [alpha], n_samples, seed, preprocess, workers)[0]


def oracle_pid(
    gate: GateSpec,
    n_samples: int = 1_000_000,
    seed=0,
    *,
    preprocess: str = "none",
    workers: int | None = None,
) -> PidDecomposition:
    """Full PID of a Gaussian gate.

    Single-collection nodes use the closed-form mutual information (which no
    per-coordinate monotone transform changes); every other node is a
    Monte-Carlo average over one shared set of draws.
    """
    lattice = redundancy_lattice(gate.n_sources)
    mc_nodes = [a for a in lattice.nodes if not a.is_self_redundancy]
    mc = _mc_many(gate, mc_nodes, n_samples, seed, preprocess, workers) if mc_nodes else []
    i_cap = {a: gaussian_mi(gate, a.sets[0]) for a in lattice.nodes if a.is_self_redundancy}
    stderr = {}
    for a, res in zip(mc_nodes, mc):
        i_cap[a] = res.mean
        stderr[str(a)] = res.stderr
    meta = {
        "method": "gaussian-oracle",
        "gate": gate.name,
        "sigma": gate.sigma,
        "n_samples": int(n_samples),
        "seed": seed,
        "preprocess": preprocess,
        "mc_stderr_bits": stderr,
    }
    return PidDecomposition.from_redundancies(i_cap, meta)


def frechet_derivative(dens: DensityPoint, direction: DensityPoint, alpha=None) -> float:
    """Directional derivative of the local redundancy, in bits per unit step.

    ``sum g_TSa / sum f_TSa - sum g_Sa / sum f_Sa - g_T / f_T`` is the rate in
    nats; dividing by ``ln 2`` converts it to the log2-valued redundancy.
    """
    alpha = _alpha_from_point(dens, alpha if alpha is not None else list(dens.f_s))
    num_f = math.fsum(dens.f_ts[a] for a in alpha.sets)
    num_g = math.fsum(direction.f_ts.get(a, 0.0) for a in alpha.sets)
    den_f = math.fsum(dens.f_s[a] for a in alpha.sets)
    den_g = math.fsum(direction.f_s.get(a, 0.0) for a in alpha.sets)
    nats = num_g / num_f - den_g / den_f - direction.f_t / dens.f_t
    return nats / _LOG2


def frechet_derivative_check(dens: DensityPoint, direction: DensityPoint, h: float = 1e-5, alpha=None):
    """Analytic directional derivative and its central finite difference.

    Returns
    -------
    (analytic, finite_difference) : tuple of float
        Both in bits per unit step.

    Raises
    ------
    StepTooLargeError
        If ``f - h g`` or ``f + h g`` has a non-positive component.
    """
    alpha = _alpha_from_point(dens, alpha if alpha is not None else list(dens.f_s))
    if not all(v > 0 for v in dens.values()):
        raise UndefinedLocalValueError("all densities must be positive")
    plus, minus = dens.scaled(direction, h), dens.scaled(direction, -h)
    if not all(v > 0 for v in plus.values() + minus.values()):
        raise StepTooLargeError(f"step h={h} makes a density non-positive")
    fd = (local_isx_continuous(plus, alpha) - local_isx_continuous(minus, alpha)) / (2 * h)
    return frechet_derivative(dens, direction, alpha), fd
