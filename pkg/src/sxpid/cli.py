"""Command-line interface: ``sxpid {estimate,gate-sample,oracle,convergence,lattice}``.

Exit codes: 0 success, 2 bad input (malformed CSV, bad column groups,
too few rows), 3 degenerate column under ``--preprocess standardize``.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import DegenerateColumnError, DegenerateGeometryWarning, InsufficientSamplesError
from .gaussian import GATES, make_gate, oracle_pid
from .knn import DEFAULT_K, SampleSet, estimate_pid
from .lattice import redundancy_lattice
from .preprocessing import MODES

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_DEGENERATE_COLUMN = 3


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


@dataclass
class RunConfig:
    subcommand: str
    input: Path | None = None
    output: Path | None = None
    sources: list[list[int]] = field(default_factory=list)
    target: list[int] = field(default_factory=list)
    k: int = DEFAULT_K
    preprocess: str = "none"
    seed: int | None = None
    n_samples: int | None = None
    jitter: bool = False


def parse_groups(text: str) -> list[list[int]]:
    """``"1,2;3"`` -> ``[[1, 2], [3]]`` (1-based column indices)."""
    groups = []
    for part in text.split(";"):
        try:
            cols = [int(tok) for tok in part.split(",")]
        except ValueError:
            raise InputError(f"bad column group {part!r} in {text!r}") from None
        if any(c < 1 for c in cols):
            raise InputError(f"column indices are 1-based, got {part!r}")
        groups.append(cols)
    return groups


def check_groups(target: list[int], sources: list[list[int]], n_columns: int) -> None:
    flat = target + [c for g in sources for c in g]
    if len(set(flat)) != len(flat):
        raise InputError("target and source column groups must be disjoint")
    missing = [c for c in flat if c > n_columns]
    if missing:
        raise InputError(f"column(s) {missing} do not exist; the file has {n_columns} columns")


def read_csv(path: Path) -> tuple[list[str], np.ndarray, int]:
    """Read a headed numeric CSV. Returns header, finite rows and the number of dropped rows."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputError(f"{path}: empty file, a header row is required")
    header = [h.strip() for h in rows[0]]
    width = len(header)
    data = []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != width:
            raise InputError(f"{path}: row {line} has {len(row)} fields, header has {width}")
        values = []
        for col, cell in enumerate(row, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise InputError(f"{path}: row {line}, column {col}: cannot parse {cell!r} as a number") from None
        data.append(values)
    arr = np.array(data, dtype=float).reshape(len(data), width)
    keep = np.all(np.isfinite(arr), axis=1)
    return header, arr[keep], int(np.count_nonzero(~keep))


def atomic_write(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_json(decomp, output: Path | None) -> None:
    text = decomp.to_json() + "\n"
    if output is None:
        sys.stdout.write(text)
        print(decomp.format_table(), file=sys.stderr)
    else:
        atomic_write(output, text)
        print(decomp.format_table())


def cmd_estimate(cfg: RunConfig):
    if cfg.input is None:
        raise InputError("--input is required")
    if not cfg.sources or not cfg.target:
        raise InputError("--sources and --target are required")
    header, data, dropped = read_csv(cfg.input)
    check_groups(cfg.target, cfg.sources, len(header))
    if dropped:
        print(f"warning: dropped {dropped} row(s) with non-finite values", file=sys.stderr)
    if data.shape[0] < cfg.k + 1:
        raise InputError(f"need at least k+1={cfg.k + 1} finite rows, got {data.shape[0]}")
    samples = SampleSet.from_columns(
        data, [c - 1 for c in cfg.target], [[c - 1 for c in g] for g in cfg.sources]
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateGeometryWarning)
        decomp = estimate_pid(
            samples, k=cfg.k, preprocess=cfg.preprocess, jitter_seed=cfg.seed if cfg.jitter else None
        )
    meta = decomp.metadata
    meta["seed"] = cfg.seed
    meta["tool_version"] = __version__
    meta["input"] = str(cfg.input)
    meta["target_columns"] = cfg.target
    meta["source_columns"] = cfg.sources
    meta["dropped_rows"] = dropped
    if dropped:
        meta["warnings"].append(f"dropped {dropped} non-finite row(s)")
    for w in meta["warnings"]:
        if w == "degenerate-geometry":
            print("warning: exact duplicate points; some neighbour radii are zero", file=sys.stderr)
    _emit_json(decomp, cfg.output)
    return decomp


def _gate_header(gate) -> list[str]:
    names = [f"T{i + 1}" if len(gate.target) > 1 else "T" for i in range(len(gate.target))]
    for j, block in enumerate(gate.sources, start=1):
        names += [f"S{j}_{i + 1}" if len(block) > 1 else f"S{j}" for i in range(len(block))]
    return names


def gate_csv(gate, n: int, seed) -> str:
    """Samples of ``gate`` as CSV text; floats are written in shortest round-trip form."""
    x = gate.sample(n, seed)
    order = list(gate.target) + [c for block in gate.sources for c in block]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_gate_header(gate))
    writer.writerows([repr(float(v)) for v in row] for row in x[:, order])
    return buf.getvalue()


def cmd_gate_sample(gate_name: str, sigma: float, n: int, seed, output: Path | None) -> str:
    gate = make_gate(gate_name, sigma)
    text = gate_csv(gate, n, seed)
    if output is None:
        sys.stdout.write(text)
    else:
        atomic_write(output, text)
    return text


def cmd_oracle(gate_name: str, sigma: float, n_mc: int, seed, preprocess: str = "none", output=None):
    decomp = oracle_pid(make_gate(gate_name, sigma), n_mc, seed, preprocess=preprocess)
    decomp.metadata["tool_version"] = __version__
    _emit_json(decomp, output)
    return decomp


CONVERGENCE_FIELDS = ("N", "seed", "antichain", "i_cap_bits", "pi_bits", "status")


def cmd_convergence(
    gate_name: str,
    sigma: float,
    k: int,
    grid: Sequence[int],
    seeds: Sequence[int],
    preprocess: str = "none",
    output: Path | None = None,
) -> str:
    if list(grid) != sorted(grid):
        raise InputError("the N grid must be ascending")
    gate = make_gate(gate_name, sigma)
    nodes = redundancy_lattice(gate.n_sources).nodes
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERGENCE_FIELDS)
    for n in grid:
        for seed in seeds:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateGeometryWarning)
                    decomp = estimate_pid(gate.sample_set(n, seed), k=k, preprocess=preprocess)
            except InsufficientSamplesError as exc:
                for a in nodes:
                    writer.writerow([n, seed, str(a), "", "", f"error: {exc}"])
                continue
            for a in nodes:
                writer.writerow([n, seed, str(a), repr(decomp.i_cap[a]), repr(decomp.pi[a]), "ok"])
    text = buf.getvalue()
    if output is None:
        sys.stdout.write(text)
    else:
        atomic_write(output, text)
    return text


def cmd_lattice(n_sources: int, output: Path | None) -> str:
    text = redundancy_lattice(n_sources).to_json() + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        atomic_write(output, text)
    return text


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _count(text: str) -> int:
    value = float(text)
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sxpid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, *, gate=False, k=False, pre=False, n=None):
        p.add_argument("--output", type=Path, help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        if gate:
            p.add_argument("--gate", required=True, choices=GATES)
            p.add_argument("--sigma", type=float, default=0.01, help="noise std (default 0.01)")
        if k:
            p.add_argument("--k", type=int, default=DEFAULT_K, help="neighbour order (default 4)")
        if pre:
            p.add_argument("--preprocess", choices=MODES, default="none")
        if n is not None:
            p.add_argument("--n", type=_count, default=n, help=f"number of samples (default {n})")

    p = sub.add_parser("estimate", help="estimate the PID of a CSV data set")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--sources", required=True, help='source column groups, e.g. "1,2;3"')
    p.add_argument("--target", required=True, help='target column(s), e.g. "4"')
    p.add_argument("--jitter", action="store_true", help="add 1e-10 x std uniform noise (seeded by --seed) to break ties")
    common(p, k=True, pre=True)

    p = sub.add_parser("gate-sample", help="draw samples of a Gaussian gate as CSV")
    common(p, gate=True, n=1000)

    p = sub.add_parser("oracle", help="Monte-Carlo reference PID of a Gaussian gate")
    common(p, gate=True, pre=True, n=1_000_000)

    p = sub.add_parser("convergence", help="estimator sweep over sample sizes and seeds")
    common(p, gate=True, k=True, pre=True)
    p.add_argument("--grid", type=_int_list, default=[1000, 10000, 100000], help="ascending N values")
    p.add_argument("--repeats", type=_count, default=1, help="seeds per N: seed, seed+1, ...")

    p = sub.add_parser("lattice", help="dump the redundancy lattice as JSON")
    p.add_argument("n_sources", type=int, choices=range(1, 5), metavar="N_SOURCES")
    p.add_argument("--output", type=Path)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "estimate":
            cfg = RunConfig(
                "estimate",
                input=args.input,
                output=args.output,
                sources=parse_groups(args.sources),
                target=[c for g in parse_groups(args.target) for c in g],
                k=args.k,
                preprocess=args.preprocess,
                seed=args.seed,
                jitter=args.jitter,
            )
            if cfg.k < 1:
                raise InputError("--k must be at least 1")
            cmd_estimate(cfg)
        elif args.subcommand == "gate-sample":
            cmd_gate_sample(args.gate, args.sigma, args.n, args.seed, args.output)
        elif args.subcommand == "oracle":
            cmd_oracle(args.gate, args.sigma, args.n, args.seed, args.preprocess, args.output)
        elif args.subcommand == "convergence":
            seeds = list(range(args.seed, args.seed + args.repeats))
            cmd_convergence(args.gate, args.sigma, args.k, args.grid, seeds, args.preprocess, args.output)
        elif args.subcommand == "lattice":
            cmd_lattice(args.n_sources, args.output)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except InsufficientSamplesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except DegenerateColumnError as exc:
        print(f"error: degenerate column: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE_COLUMN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
