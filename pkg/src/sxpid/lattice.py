"""Antichains, the redundancy lattice and Moebius inversion.

Antichains are written in the compact form ``{1}{2,3}``: one brace group per
collection of sources, indices 1-based and comma-joined, groups ordered by
size and then lexicographically.
"""
from __future__ import annotations

import itertools
import json
import math
import operator
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import (
    IncompleteLatticeError,
    LatticeMismatchError,
    UnsupportedOrderError,
)

MAX_SOURCES = 4

_GROUP_RE = re.compile(r"\{([^{}]*)\}")


def _canonical_sets(sets: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    unique = {tuple(sorted(set(int(i) for i in s))) for s in sets}
    return tuple(sorted(unique, key=lambda s: (len(s), s)))


@dataclass(frozen=True)
class Antichain:
    """A set of pairwise non-nested collections of source indices.

    Parameters
    ----------
    sets : iterable of iterables of int
        Collections of 1-based source indices. Order is irrelevant; the
        stored form is canonical.
    n : int
        Number of sources of the decomposition this node belongs to.
    """

    sets: tuple[tuple[int, ...], ...]
    n: int

    def __init__(self, sets: Iterable[Iterable[int]], n: int):
        canon = _canonical_sets(sets)
        if not canon:
            raise ValueError("an antichain needs at least one collection")
        for s in canon:
            if not s:
                raise ValueError("collections must be non-empty")
            if s[0] < 1 or s[-1] > n:
                raise ValueError(f"index out of range 1..{n} in {s}")
        for a, b in itertools.permutations(canon, 2):
            if set(a) <= set(b):
                raise ValueError(f"{a} is contained in {b}; not an antichain")
        object.__setattr__(self, "sets", canon)
        object.__setattr__(self, "n", int(n))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Antichain":
        """Parse ``"{1}{2,3}"``. ``n`` defaults to the largest index present."""
        stripped = "".join(text.split())
        groups = _GROUP_RE.findall(stripped)
        if not groups or "".join("{" + g + "}" for g in groups) != stripped:
            raise ValueError(f"malformed antichain string: {text!r}")
        sets = []
        for g in groups:
            if not g:
                raise ValueError(f"empty collection in {text!r}")
            sets.append([int(tok) for tok in g.split(",")])
        if n is None:
            n = max(max(s) for s in sets)
        return cls(sets, n)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, s)) + "}" for s in self.sets)

    def __repr__(self) -> str:
        return f"Antichain('{self}', n={self.n})"

    @property
    def is_top(self) -> bool:
        return self.sets == (tuple(range(1, self.n + 1)),)

    @property
    def is_bottom(self) -> bool:
        return self.sets == tuple((i,) for i in range(1, self.n + 1))

    @property
    def is_self_redundancy(self) -> bool:
        """True for single-collection nodes, whose redundancy is a mutual information."""
        return len(self.sets) == 1


def _check_order(n) -> int:
    try:
        value = operator.index(n)
    except TypeError:
        value = None
    if value is None or isinstance(n, bool) or not 1 <= value <= MAX_SOURCES:
        raise UnsupportedOrderError(
            f"number of sources must be an integer in 1..{MAX_SOURCES}, got {n!r}"
        )
    return value


@lru_cache(maxsize=None)
def _enumerate(n: int) -> tuple[Antichain, ...]:
    collections = [
        frozenset(c)
        for r in range(1, n + 1)
        for c in itertools.combinations(range(1, n + 1), r)
    ]
    found: list[Antichain] = []

    def extend(start: int, chosen: list[frozenset]) -> None:
        if chosen:
            found.append(Antichain(chosen, n))
        for idx in range(start, len(collections)):
            cand = collections[idx]
            if all(not (cand <= c or c <= cand) for c in chosen):
                chosen.append(cand)
                extend(idx + 1, chosen)
                chosen.pop()

    extend(0, [])
    return tuple(sorted(found, key=lambda a: (len(a.sets), [(len(s), s) for s in a.sets])))


def enumerate_antichains(n: int) -> list[Antichain]:
    """Return every antichain over the non-empty subsets of ``{1..n}``.

    Raises
    ------
    UnsupportedOrderError
        If ``n`` is not in ``1..4``.
    """
    return list(_enumerate(_check_order(n)))


def below(beta: Antichain, alpha: Antichain) -> bool:
    """Return whether ``beta`` precedes or equals ``alpha`` in the redundancy lattice.

    ``beta <= alpha`` iff every collection of ``alpha`` contains some
    collection of ``beta``.
    """
    if beta.n != alpha.n:
        raise LatticeMismatchError(f"antichains over {beta.n} and {alpha.n} sources")
    return all(any(set(b) <= set(a) for b in beta.sets) for a in alpha.sets)


class RedundancyLattice:
    """All antichains for ``n`` sources together with their partial order.

    ``nodes`` is a linear extension of the order, running from the full
    redundancy ``{1}{2}...{n}`` up to the full synergy ``{1,...,n}``.
    """

    def __init__(self, n: int):
        n = _check_order(n)
        self.n = n
        raw = _enumerate(n)
        below_sets = {a: frozenset(b for b in raw if below(b, a)) for a in raw}
        # strict inclusion of downsets refines the order, so sorting by size is topological
        self.nodes: tuple[Antichain, ...] = tuple(
            sorted(raw, key=lambda a: (len(below_sets[a]), str(a)))
        )
        self._downsets = below_sets
        self.index = {a: i for i, a in enumerate(self.nodes)}

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, item) -> bool:
        return item in self.index

    @property
    def top(self) -> Antichain:
        return self.nodes[-1]

    @property
    def bottom(self) -> Antichain:
        return self.nodes[0]

    def below(self, beta: Antichain, alpha: Antichain) -> bool:
        return beta in self._downsets[alpha]

    def downset(self, alpha: Antichain) -> list[Antichain]:
        return [b for b in self.nodes if b in self._downsets[alpha]]

    def cover_edges(self) -> list[tuple[Antichain, Antichain]]:
        """Pairs ``(beta, alpha)`` with ``beta < alpha`` and nothing in between."""
        edges = []
        for alpha in self.nodes:
            strict = self._downsets[alpha] - {alpha}
            for beta in strict:
                if not any(beta in self._downsets[g] for g in strict if g != beta):
                    edges.append((beta, alpha))
        edges.sort(key=lambda e: (self.index[e[0]], self.index[e[1]]))
        return edges

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_sources": self.n,
                "nodes": [str(a) for a in self.nodes],
                "cover_edges": [[str(b), str(a)] for b, a in self.cover_edges()],
            },
            indent=2,
        )


@lru_cache(maxsize=None)
def _cached_lattice(n: int) -> RedundancyLattice:
    return RedundancyLattice(n)


def redundancy_lattice(n: int) -> RedundancyLattice:
    """Cached lattice for ``n`` sources."""
    return _cached_lattice(_check_order(n))


def downset(alpha: Antichain) -> list[Antichain]:
    """All antichains below or equal to ``alpha``, in topological order."""
    return redundancy_lattice(alpha.n).downset(alpha)


def _lattice_for(values: Mapping[Antichain, float]) -> RedundancyLattice:
    if not values:
        raise IncompleteLatticeError("empty lattice function")
    ns = {a.n for a in values}
    if len(ns) != 1:
        raise LatticeMismatchError(f"mixed source counts {sorted(ns)}")
    lattice = redundancy_lattice(ns.pop())
    missing = [str(a) for a in lattice.nodes if a not in values]
    if missing:
        raise IncompleteLatticeError(f"missing antichains: {', '.join(missing)}")
    return lattice


def moebius_invert(i_cap: Mapping[Antichain, float]) -> dict[Antichain, float]:
    """Turn redundancies into atoms by Moebius inversion over the lattice.

    Atoms are computed bottom-up: each atom is its redundancy minus the sum
    of all atoms strictly below it.
    """
    lattice = _lattice_for(i_cap)
    pi: dict[Antichain, float] = {}
    for alpha in lattice.nodes:
        lower = [pi[b] for b in lattice.downset(alpha) if b != alpha]
        pi[alpha] = float(i_cap[alpha]) - math.fsum(lower)
    return pi


def resum_atoms(pi: Mapping[Antichain, float]) -> dict[Antichain, float]:
    """Inverse of :func:`moebius_invert`: sum atoms over each downset."""
    lattice = _lattice_for(pi)
    return {a: math.fsum(pi[b] for b in lattice.downset(a)) for a in lattice.nodes}


def bivariate_names() -> dict[str, Antichain]:
    """Conventional atom names for two sources."""
    return {
        "red": Antichain([[1], [2]], 2),
        "unq1": Antichain([[1]], 2),
        "unq2": Antichain([[2]], 2),
        "syn": Antichain([[1, 2]], 2),
    }


def as_antichain(value: Antichain | str | Sequence[Sequence[int]], n: int) -> Antichain:
    """Coerce a string or nested sequence to an :class:`Antichain` over ``n`` sources."""
    if isinstance(value, Antichain):
        if value.n != n:
            raise LatticeMismatchError(f"antichain over {value.n} sources, expected {n}")
        return value
    if isinstance(value, str):
        return Antichain.parse(value, n)
    return Antichain(value, n)
