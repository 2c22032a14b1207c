"""Plug-in shared-exclusion PID for finite probability mass functions.

This is the exact discrete counterpart of the continuous estimator and is
used as a ground-truth cross-check.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Mapping, Sequence

from .decomposition import PidDecomposition
from .errors import UndefinedLocalValueError
from .lattice import Antichain, redundancy_lattice

State = tuple[Hashable, ...]


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Joint pmf of a target and ``n`` sources.

    ``pmf`` maps state tuples ``(t, s_1, ..., s_n)`` to probability mass.
    Individual states may be any hashable value, so a two-dimensional target
    is simply a tuple-valued state.
    """

    pmf: Mapping[State, float]
    n_sources: int

    def __init__(self, pmf: Mapping[Sequence[Hashable], float], n_sources: int | None = None):
        cleaned: dict[State, float] = {}
        for state, mass in pmf.items():
            state = tuple(state)
            mass = float(mass)
            if mass < 0 or not math.isfinite(mass):
                raise ValueError(f"invalid probability {mass} for state {state}")
            if mass > 0:
                cleaned[state] = cleaned.get(state, 0.0) + mass
        if not cleaned:
            raise ValueError("pmf has no support")
        widths = {len(s) for s in cleaned}
        if len(widths) != 1:
            raise ValueError("all states must have the same length")
        width = widths.pop()
        if n_sources is None:
            n_sources = width - 1
        if width != n_sources + 1 or n_sources < 1:
            raise ValueError(f"states have {width} entries, expected {n_sources + 1}")
        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {total!r}, not 1")
        object.__setattr__(self, "pmf", cleaned)
        object.__setattr__(self, "n_sources", n_sources)

    @property
    def support(self) -> list[State]:
        return list(self.pmf)

    def alphabet_sizes(self) -> tuple[int, ...]:
        return tuple(len({s[i] for s in self.pmf}) for i in range(self.n_sources + 1))

    def _matches(self, state: State, reference: State, alpha: Antichain) -> bool:
        return any(all(state[i] == reference[i] for i in a) for a in alpha.sets)

    def disjunction_mass(self, alpha: Antichain, realization: State, target: bool = False) -> float:
        """Mass of the event ``OR_a AND_{i in a} S_i = s_i`` (optionally jointly with ``T = t``)."""
        return math.fsum(
            p
            for state, p in self.pmf.items()
            if self._matches(state, realization, alpha) and (not target or state[0] == realization[0])
        )

    def target_mass(self, t: Hashable) -> float:
        return math.fsum(p for state, p in self.pmf.items() if state[0] == t)

    def mutual_information(self, collection: Sequence[int]) -> float:
        """Plug-in ``I(T : S_a)`` in bits for a collection of 1-based source indices."""
        idx = tuple(collection)
        joint: dict[tuple, float] = {}
        ps: dict[tuple, float] = {}
        pt: dict[Hashable, float] = {}
        for state, p in self.pmf.items():
            s = tuple(state[i] for i in idx)
            joint[(state[0], s)] = joint.get((state[0], s), 0.0) + p
            ps[s] = ps.get(s, 0.0) + p
            pt[state[0]] = pt.get(state[0], 0.0) + p
        return math.fsum(p * math.log2(p / (pt[t] * ps[s])) for (t, s), p in joint.items())

    def permute_sources(self, order: Sequence[int]) -> "DiscreteJoint":
        """Relabel sources: new source ``j`` is old source ``order[j-1]``."""
        order = list(order)
        if sorted(order) != list(range(1, self.n_sources + 1)):
            raise ValueError(f"{order} is not a permutation of 1..{self.n_sources}")
        return DiscreteJoint(
            {(s[0],) + tuple(s[i] for i in order): p for s, p in self.pmf.items()},
            self.n_sources,
        )

    def to_rows(self) -> list[dict]:
        return [{"state": list(s), "p": p} for s, p in self.pmf.items()]


def discrete_local_redundancy(joint: DiscreteJoint, alpha: Antichain, realization: Sequence[Hashable]) -> float:
    """Local shared-exclusion redundancy at one realization, in bits.

    The disjunction event is ``exists a in alpha: S_i = s_i for all i in a``;
    its probability is summed over the explicit event set.
    """
    realization = tuple(realization)
    if alpha.n != joint.n_sources:
        raise ValueError(f"antichain over {alpha.n} sources, joint has {joint.n_sources}")
    p_t = joint.target_mass(realization[0])
    p_or = joint.disjunction_mass(alpha, realization)
    p_t_or = joint.disjunction_mass(alpha, realization, target=True)
    if p_t <= 0 or p_or <= 0 or p_t_or <= 0:
        raise UndefinedLocalValueError(
            f"zero probability at {realization} for {alpha} (p_t={p_t}, p_or={p_or}, p_t_or={p_t_or})"
        )
    return math.log2(p_t_or / (p_or * p_t))


def discrete_redundancy(joint: DiscreteJoint, alpha: Antichain) -> float:
    """pmf-weighted average of the local redundancy."""
    return math.fsum(p * discrete_local_redundancy(joint, alpha, s) for s, p in joint.pmf.items())


def discrete_pid(joint: DiscreteJoint, n: int | None = None) -> PidDecomposition:
    """Full shared-exclusion PID of a discrete joint distribution."""
    n = joint.n_sources if n is None else n
    if n != joint.n_sources:
        raise ValueError(f"requested {n} sources, joint has {joint.n_sources}")
    lattice = redundancy_lattice(n)
    i_cap = {a: discrete_redundancy(joint, a) for a in lattice.nodes}
    return PidDecomposition.from_redundancies(
        i_cap, {"method": "discrete", "support_size": len(joint.pmf)}
    )


def _uniform_binary_gate(func) -> DiscreteJoint:
    pmf: dict[State, float] = {}
    for s1, s2 in itertools.product((0, 1), repeat=2):
        state = (func(s1, s2), s1, s2)
        pmf[state] = pmf.get(state, 0.0) + 0.25
    return DiscreteJoint(pmf, 2)


def discrete_gate(name: str) -> DiscreteJoint:
    """Binary logic gates with uniform independent inputs.

    ``redundant`` has ``S1 = S2 = T`` uniform on ``{0, 1}``; the others take two
    independent uniform bits: ``copy`` (``T = (S1, S2)``), ``unique``
    (``T = S1``), ``sum`` (``T = S1 + S2``) and ``xor``.
    """
    if name == "redundant":
        return DiscreteJoint({(0, 0, 0): 0.5, (1, 1, 1): 0.5}, 2)
    gates = {
        "copy": lambda a, b: (a, b),
        "unique": lambda a, b: a,
        "sum": lambda a, b: a + b,
        "xor": lambda a, b: a ^ b,
    }
    if name not in gates:
        raise ValueError(f"unknown discrete gate {name!r}; choose from redundant, {', '.join(gates)}")
    return _uniform_binary_gate(gates[name])


def _decode_state(value):
    if isinstance(value, list):
        return tuple(_decode_state(v) for v in value)
    return value


def load_pmf(path: str | Path) -> DiscreteJoint:
    """Load a pmf from JSON or CSV.

    JSON: a list of ``{"state": [t, s1, ...], "p": mass}`` rows (nested lists
    become tuple states). CSV: header row, one column per variable with the
    probability in the last column.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        rows = json.loads(path.read_text())
        pmf = {tuple(_decode_state(v) for v in row["state"]): row["p"] for row in rows}
        return DiscreteJoint(pmf)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        pmf = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            state = tuple(_parse_scalar(v) for v in row[:-1])
            pmf[state] = pmf.get(state, 0.0) + float(row[-1])
    return DiscreteJoint(pmf)


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


def save_pmf(joint: DiscreteJoint, path: str | Path) -> None:
    """Write a pmf in the format :func:`load_pmf` reads; ``.csv`` needs scalar states."""
    path = Path(path)
    if path.suffix.lower() != ".csv":
        path.write_text(json.dumps(joint.to_rows(), indent=1))
        return
    if any(isinstance(v, tuple) for state in joint.pmf for v in state):
        raise ValueError("tuple-valued states can only be saved as JSON")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["T"] + [f"S{i}" for i in range(1, joint.n_sources + 1)] + ["p"])
        for state, p in joint.pmf.items():
            writer.writerow([*state, repr(p)])
