"""Container for a full PID result and its JSON form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .lattice import Antichain, bivariate_names, moebius_invert, redundancy_lattice

SCHEMA_VERSION = 1


@dataclass
class PidDecomposition:
    """Redundancies and atoms (in bits) for every node of one lattice.

    Attributes
    ----------
    n_sources : int
    i_cap : dict
        Antichain -> redundancy ``I_cap`` in bits.
    pi : dict
        Antichain -> atom ``Pi`` in bits.
    metadata : dict
        Provenance: ``method`` (estimator, oracle or discrete), ``k``,
        ``n_samples``, ``preprocess``, ``seed`` and anything else useful.
    """

    n_sources: int
    i_cap: dict[Antichain, float]
    pi: dict[Antichain, float]
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_redundancies(
        cls, i_cap: Mapping[Antichain, float], metadata: Mapping[str, Any] | None = None
    ) -> "PidDecomposition":
        pi = moebius_invert(i_cap)
        n = next(iter(pi)).n
        lattice = redundancy_lattice(n)
        return cls(
            n_sources=n,
            i_cap={a: float(i_cap[a]) for a in lattice.nodes},
            pi=pi,
            metadata=dict(metadata or {}),
        )

    @property
    def lattice(self):
        return redundancy_lattice(self.n_sources)

    @property
    def joint_mi(self) -> float:
        """Mutual information between the target and all sources jointly."""
        return self.i_cap[self.lattice.top]

    def atom(self, key: Antichain | str) -> float:
        if isinstance(key, str):
            key = Antichain.parse(key, self.n_sources)
        return self.pi[key]

    def redundancy(self, key: Antichain | str) -> float:
        if isinstance(key, str):
            key = Antichain.parse(key, self.n_sources)
        return self.i_cap[key]

    def bivariate(self) -> dict[str, float]:
        """Atoms under the names ``red``, ``unq1``, ``unq2``, ``syn`` (two sources only)."""
        if self.n_sources != 2:
            raise ValueError("named atoms exist only for two sources")
        return {name: self.pi[a] for name, a in bivariate_names().items()}

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "n_sources": self.n_sources,
            "antichains": {
                str(a): {"i_cap_bits": self.i_cap[a], "pi_bits": self.pi[a]}
                for a in self.lattice.nodes
            },
            "metadata": self.metadata,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PidDecomposition":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}")
        n = int(data["n_sources"])
        i_cap, pi = {}, {}
        for key, entry in data["antichains"].items():
            a = Antichain.parse(key, n)
            i_cap[a] = float(entry["i_cap_bits"])
            pi[a] = float(entry["pi_bits"])
        return cls(n_sources=n, i_cap=i_cap, pi=pi, metadata=dict(data.get("metadata", {})))

    @classmethod
    def from_json(cls, text: str) -> "PidDecomposition":
        return cls.from_dict(json.loads(text))

    def max_consistency_error(self) -> float:
        """Largest deviation between a redundancy and the sum of atoms in its downset."""
        lattice = self.lattice
        return max(
            abs(self.i_cap[a] - math.fsum(self.pi[b] for b in lattice.downset(a)))
            for a in lattice.nodes
        )

    def format_table(self) -> str:
        lattice = self.lattice
        width = max(len(str(a)) for a in lattice.nodes)
        lines = [f"{'antichain':<{width}}  {'Pi [bits]':>10}  {'I_cap [bits]':>12}"]
        for a in reversed(lattice.nodes):
            lines.append(f"{str(a):<{width}}  {self.pi[a]:>10.3f}  {self.i_cap[a]:>12.3f}")
        return "\n".join(lines)
