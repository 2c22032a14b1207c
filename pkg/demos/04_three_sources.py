"""A three-source system where one source is an exact copy of another.

T = S1 + small noise, S2 is independent noise and S3 = S1. Every search
region that involves S3 coincides with the one for S1, so the trivariate
estimate inherits the bivariate (T; S1, S2) numbers exactly.

Run: python demos/04_three_sources.py
"""
import numpy as np

from sxpid import SampleSet, estimate_pid

rng = np.random.default_rng(0)
n = 20_000
s1, s2 = rng.normal(size=(2, n))
t = s1 + 0.01 * rng.normal(size=n)

pid = estimate_pid(SampleSet(t, [s1, s2, s1]))
print(pid.format_table())

largest = max(pid.pi, key=pid.pi.get)
print(f"\nlargest atom: {largest} = {pid.pi[largest]:.3f} bits")
print(f"sum of atoms = {sum(pid.pi.values()):.3f} bits = I(T:S1,S2,S3) = {pid.joint_mi:.3f} bits")
