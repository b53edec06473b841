"""
Distance classes on finite metric spaces
========================================

Concepts built from distance combinations behave very differently from
linear ones.  Over any metric space of diameter 1 the strict class
cannot shatter even two points past margin 1/3, yet a purpose-built
space realizes every labeling of k points at margin gamma < 1/3.  The
constructions below come with validity checks and named witnesses.
"""

from fractions import Fraction

from marginlab import (BallPairParams, DistanceCombinationOracle,
                       LabeledSample, check_bundle_metric, check_witness,
                       gamma_counterexample_space,
                       intro_counterexample_space, is_shattered)
from marginlab.classes import ball_pair_realizable
from marginlab.harness import random_metric_space
from marginlab.spaces import validate_metric

import numpy as np

# no pair of points survives margin 1/3 + 0.01, whatever the space
rng_seed = np.random.SeedSequence(entropy=7)
space = random_metric_space(rng_seed, 8)
oracle = DistanceCombinationOracle(space, centers=range(8))
verdict = is_shattered(oracle, (0, 1), 1 / 3 + 0.01)
print("random space, pair {0,1}:", verdict.status)

# below 1/3 a designed space shatters k points; every labeling has a
# witness combination named after the positive part of the labeling
bundle = gamma_counterexample_space(k=3, gamma=Fraction(3, 10))
print("gamma space: n =", len(bundle.obj.ids),
      "metric valid:", check_bundle_metric(bundle))
oracle = DistanceCombinationOracle(bundle.obj,
                                   centers=tuple(range(bundle.obj.n)))
labels = (1, -1, 1)
wit = bundle.witnesses[labels]
sample = LabeledSample.from_indices((0, 1, 2), labels)
ok, margin = check_witness(oracle, sample, wit, 0.3)
print("witness for", labels, "uses centers", wit["center_ids"],
      "-> verified:", ok, "margin", round(margin, 6))

# pushing gamma past 1/3 breaks the triangle inequality, and the
# validity checker points at the offending triple
bad = gamma_counterexample_space(k=2, gamma=0.34)
print("gamma=0.34 bundle predicted:", bad.predicted_status)
check = validate_metric(bad.obj.dist_exact, exact=True)
print("violation kind:", check.kind, "at indices", check.indices)

# ball pairs tell the same story at radii R >= 3r: the inner/outer
# annulus class realizes all labelings only on engineered spaces
intro = intro_counterexample_space(k=4, r=Fraction(1, 4), R=Fraction(1, 2),
                                   include_empty=True)
labels = (1, -1, 1, -1)
params = BallPairParams(r=Fraction(1, 4), R=Fraction(1, 2))
res = ball_pair_realizable(intro.obj,
                           LabeledSample.from_indices((0, 1, 2, 3), labels),
                           params)
print("intro space, labels", labels, "->", res.realizable,
      "center", res.center_id)
