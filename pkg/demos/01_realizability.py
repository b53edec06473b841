"""
Deciding one labeled sample
===========================

A labeled sample is gamma-realizable when some unit functional puts
every point on its label's side with margin at least gamma.  The
decision comes back with a checkable certificate either way: a
functional on the yes side, a convex collapse on the no side.
"""

import numpy as np

from marginlab import (DualBallOracle, LabeledSample, NormSpec, realize,
                       check_witness, verify_collapse)

space = NormSpec(2)
oracle = DualBallOracle(space=space)

# two orthogonal unit vectors, both labeled positive: the best
# functional splits the difference and reaches margin 1/sqrt(2)
sample = LabeledSample.from_vectors(np.array([[1.0, 0.0], [0.0, 1.0]]),
                                    (1, 1))

verdict = realize(oracle, sample, 0.70)
print("gamma=0.70:", verdict.status)
print("  witness margins:", [round(m, 4) for m in verdict.witness["margins"]])
ok, worst = check_witness(oracle, sample, verdict.witness, 0.70)
print("  re-checked:", ok, "worst margin", round(worst, 4))

# past 1/sqrt(2) ~ 0.7071 no functional works; the verdict carries
# simplex weights whose signed combination stays short
verdict = realize(oracle, sample, 0.72)
print("gamma=0.72:", verdict.status)
print("  collapse weights:", [round(v, 4) for v in verdict.collapse.mu])
lam = tuple(y * m for y, m in zip(sample.labels, verdict.collapse.mu))
print("  collapse verifies:", bool(verify_collapse(sample.vectors, space,
                                                   lam, 0.72)))

# opposite labels on the same direction cannot be separated at all
clash = LabeledSample.from_vectors(np.array([[1.0, 0.0], [1.0, 0.0]]),
                                   (1, -1))
verdict = realize(oracle, clash, 0.1)
print("antipodal labels:", verdict.status,
      "value", round(verdict.value, 6))
