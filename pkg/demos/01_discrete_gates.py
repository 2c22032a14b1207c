"""Shared-exclusion atoms of four binary logic gates.

Run: python demos/01_discrete_gates.py
"""
from sxpid import discrete_gate, discrete_pid

print(f"{'gate':<10}{'red':>8}{'unq1':>8}{'unq2':>8}{'syn':>8}{'I':>8}")
for name in ["redundant", "copy", "unique", "sum", "xor"]:
    pid = discrete_pid(discrete_gate(name))
    atoms = pid.bivariate()
    print(f"{name:<10}" + "".join(f"{atoms[k]:8.3f}" for k in ("red", "unq1", "unq2", "syn")) + f"{pid.joint_mi:8.3f}")

# The unique gate (T = S1) has a negative unique atom for S2: S2 tells nothing
# about T, yet the redundancy {1}{2} is positive, so the atom for S2 alone
# has to compensate. The same sign pattern shows up for the Gaussian version
# in demo 02.
