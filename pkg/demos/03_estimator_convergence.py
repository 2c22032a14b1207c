"""How the nearest-neighbour estimate approaches the reference values as N grows.

Larger N makes the sum and copy gates converge visibly slower than the
redundant and unique gates. N=1e6 takes a couple of minutes per gate.

Run: python demos/03_estimator_convergence.py [gate] [max_exponent]
"""
import sys
import time

from sxpid import estimate_pid, make_gate, oracle_pid

name = sys.argv[1] if len(sys.argv) > 1 else "sum"
top = int(sys.argv[2]) if len(sys.argv) > 2 else 5
gate = make_gate(name)

ref = oracle_pid(gate, 1_000_000, seed=0).bivariate()
print(f"gate {name}, k=4")
print(f"{'N':>9}" + "".join(f"{k:>8}" for k in ref) + "   seconds")
print(f"{'oracle':>9}" + "".join(f"{v:8.3f}" for v in ref.values()))
for exponent in range(3, top + 1):
    n = 10**exponent
    start = time.perf_counter()
    est = estimate_pid(gate.sample_set(n, seed=exponent), k=4).bivariate()
    print(f"{n:>9}" + "".join(f"{v:8.3f}" for v in est.values()) + f"   {time.perf_counter() - start:7.1f}")
