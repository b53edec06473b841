"""
Reference constructions and the command line
============================================

Each construction ships as a bundle: the object itself, the margin it
is built to achieve, and a recipe string saying how it was made.  The
same decisions run from the shell through the ``marginlab`` entry
point, which is what this script drives via ``cli_main``.
"""

import json
import tempfile
from pathlib import Path

from marginlab import hadamard_shattered_set, standard_basis_set
from marginlab.harness import cli_main

# a Sylvester design on 8 points in l_2^8: predicted margin 1/sqrt(8)
bundle = hadamard_shattered_set(m=3, p=2)
print("hadamard m=3:", bundle.obj["points"].shape,
      "predicted gamma =", bundle.predicted_gamma_exact,
      "=", round(bundle.predicted_gamma, 6))
print("recipe:", bundle.provenance)

# basis sets trade margin for dimension: n^(1/p - 1) shrinks with n
for n in (2, 4, 8):
    b = standard_basis_set(n=n, p=1.5)
    print(f"basis n={n} p=1.5 gamma = {b.predicted_gamma:.6f}")

# the CLI consumes and produces JSON files; exit code 0 means the
# certified verdict matched what the construction promised
tmp = Path(tempfile.mkdtemp())
problem = tmp / "hadamard.json"
code = cli_main(["construct", "hadamard", "--m", "3", "--p", "2",
                 "--output", str(problem)])
print("construct exit:", code)

code = cli_main(["certify-shatter", "--input", str(problem),
                 "--gamma", repr(8 ** -0.5 - 1e-6),
                 "--output", str(tmp / "verdict.json")])
verdict = json.loads((tmp / "verdict.json").read_text())
print("certify exit:", code, "->", verdict["status"],
      "patterns:", verdict["patterns_checked"])

# exit code 2 flags a margin too close to the boundary for floats
code = cli_main(["certify-shatter", "--input", str(problem),
                 "--gamma", repr(8 ** -0.5),
                 "--output", str(tmp / "marginal.json")])
print("at the threshold, float exit:", code)

# bundles with rational coordinates also carry them in the JSON, and
# --exact then decides the closed boundary itself: the basis set in
# l_2^4 is shattered at exactly 1/2
basis = tmp / "basis.json"
cli_main(["construct", "basis", "--n", "4", "--p", "2",
          "--output", str(basis)])
code = cli_main(["certify-shatter", "--input", str(basis),
                 "--gamma", "1/2", "--exact",
                 "--output", str(tmp / "exact.json")])
verdict = json.loads((tmp / "exact.json").read_text())
print("basis at 1/2 exact: exit", code, "->", verdict["status"],
      "band", verdict["band"])
