"""
Shattering and the exact boundary
=================================

A set is gamma-shattered when every sign pattern on it is
gamma-realizable.  Floating point decides cleanly away from the
threshold; exactly at it, only rational arithmetic can tell a closed
margin from an open one.
"""

from fractions import Fraction

import numpy as np

from marginlab import (DualBallOracle, NormSpec, SolverConfig, is_shattered,
                       realize, LabeledSample)

space = NormSpec(2)
oracle = DualBallOracle(space=space)

# three orthonormal vectors shatter up to 1/sqrt(3) ~ 0.5774
pts = np.eye(3)

below = is_shattered(oracle, pts, 0.57)
print("gamma=0.57:", below.status, f"({below.patterns_checked} patterns)")

above = is_shattered(oracle, pts, 0.58)
print("gamma=0.58:", above.status,
      "first failing pattern", above.counterexample.pattern)

# the float path refuses to call the threshold itself
at = is_shattered(oracle, pts, 3 ** -0.5)
print("gamma=1/sqrt(3) float:", at.status)

# rational mode settles it: margins this close to the boundary are
# decided with band 0, and the all-ones pattern lands exactly on it
exact = SolverConfig(arithmetic="rational")
rows = tuple(tuple(Fraction(int(v)) for v in row) for row in pts)
sample = LabeledSample.from_vectors(pts, (1, 1, 1), exact=rows)
v = realize(oracle, sample, Fraction(57, 100), exact)
print("all-ones at 57/100:", v.status, "band", v.band)
v = realize(oracle, sample, Fraction(58, 100), exact)
print("all-ones at 58/100:", v.status)
print("  best possible margin:", v.value_exact, "=", float(v.value_exact))
