"""
Reducing a frame metric with inner automorphisms
================================================

Canonicalization moves a random metric along one-parameter inner subgroups.
For Type II the flows are polynomial and the witness is exact. For Type III
an orbit invariant shows why the printed pattern cannot always be reached
without outer automorphisms.
"""

# %%
import numpy as np

from homsym.catalog import catalog
from homsym.gauge import canonicalize

rng = np.random.default_rng(1)
A = rng.normal(size=(3, 3))
H = A @ A.T + 0.3 * np.eye(3)

for name in ("II", "IX", "III"):
    e = catalog(name)
    f = canonicalize(e.constants, H, e.conditions)
    print(name, "reached" if f.reached else "not reached", "| exact witness" if f.witness_exact else "")
    print(np.array2string(f.h, precision=4, suppress_small=True))
    for note in f.findings:
        print("  ", note)

# %% The quantity (h11 h23 - h12 h13) / h11 is constant along the Type III inner flows,
# so a metric with it nonzero keeps a nonzero (1,3) or (2,3) entry.
e = catalog("III")
f = canonicalize(e.constants, H, e.conditions)
inv = lambda M: (M[0, 0] * M[1, 2] - M[0, 1] * M[0, 2]) / M[0, 0]
print(f"invariant before {inv(H):.6f}, after {inv(f.h):.6f}")
