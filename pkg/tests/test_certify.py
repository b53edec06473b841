"""Decision procedures and certificate re-verification."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from marginlab import (
    BallPairOracle,
    BallPairParams,
    DimensionReport,
    DistanceCombinationOracle,
    DualBallOracle,
    FiniteMetricSpace,
    FunctionPolytopeOracle,
    InputError,
    LabeledSample,
    LipschitzOracle,
    NormSpec,
    PhiOracle,
    PhiSpec,
    SolverConfig,
    audit_submultiplicativity,
    check_cube_condition,
    check_witness,
    collapse_support,
    cube_vertices_contained,
    fit_rate,
    gamma_counterexample_space,
    hadamard_shattered_set,
    is_shattered,
    max_shattered_subset,
    min_signed_support,
    packing_number,
    realize,
    sample_complexity_estimate,
    verify_collapse,
    witness_margins,
)
from marginlab.certify import pattern_from_code
from marginlab.harness import random_metric_space

RATIONAL = SolverConfig(arithmetic="rational")
L2 = NormSpec(2)


def triangle_space() -> FiniteMetricSpace:
    dist = [[0.0, 1.0, 0.6], [1.0, 0.0, 0.8], [0.6, 0.8, 0.0]]
    return FiniteMetricSpace.create(["x", "y", "z"], dist)


def test_pattern_order():
    assert pattern_from_code(0, 3) == (1, 1, 1)
    assert pattern_from_code(1, 3) == (1, 1, -1)
    assert pattern_from_code(4, 3) == (-1, 1, 1)
    assert pattern_from_code(0, 3, fix_first=True) == (1, 1, 1)
    assert pattern_from_code(3, 3, fix_first=True) == (1, -1, -1)
    with pytest.raises(InputError):
        pattern_from_code(8, 3)


# ---------------------------------------------------------------------------
# realize


def test_realize_antipodal_contradiction():
    sample = LabeledSample.from_vectors([[1.0, 0.0], [-1.0, 0.0]], [1, 1])
    v = realize(DualBallOracle(L2), sample, 0.1)
    assert v.status == "NotRealized"
    assert v.value == pytest.approx(0.0, abs=1e-7)
    assert v.collapse is not None
    assert v.collapse.mu == pytest.approx((0.5, 0.5), abs=1e-6)


def test_realize_orthonormal_pair_threshold():
    pts = [[0.6, 0.8], [-0.8, 0.6]]
    sample = LabeledSample.from_vectors(pts, [1, 1])
    oracle = DualBallOracle(L2)

    yes = realize(oracle, sample, 0.70)
    assert yes.status == "Realized"
    assert yes.value == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    ok, lo = check_witness(oracle, sample, yes.witness, 0.70)
    assert ok and lo >= 0.70 - 1e-9

    no = realize(oracle, sample, 0.72)
    assert no.status == "NotRealized"
    # the collapse weights must push the support strictly under gamma
    folded = [m * lab for m, lab in zip(no.collapse.mu, sample.labels)]
    assert verify_collapse(pts, L2, folded, 0.72)
    assert no.collapse.value <= 0.72 - no.band

    with pytest.raises(InputError):
        realize(oracle, sample, 0.0)


def test_realize_lipschitz_pair():
    space = triangle_space()
    oracle = LipschitzOracle(space)
    sample = LabeledSample.from_indices([0, 1], [1, -1])

    yes = realize(oracle, sample, 0.4)
    assert yes.status == "Realized" and yes.band == 0.0
    assert yes.witness["type"] == "extension"
    margins = witness_margins(oracle, sample, yes.witness)
    assert min(margins) >= 0.4
    assert check_witness(oracle, sample, yes.witness, 0.4)[0]

    no = realize(oracle, sample, 0.51)
    assert no.status == "NotRealized"


def test_realize_ball_pair_center_witness():
    space = triangle_space()
    oracle = BallPairOracle(space, BallPairParams(0.1, 0.9))
    sample = LabeledSample.from_indices([0, 1], [1, -1])
    v = realize(oracle, sample, 0.5)
    assert v.status == "Realized"
    assert v.witness["type"] == "center" and v.witness["index"] == 0
    assert min(witness_margins(oracle, sample, v.witness)) >= 1.0


def test_realize_phi_profile_witness():
    oracle = PhiOracle(PhiSpec(preset="exp", N=100))
    sample = LabeledSample.from_indices(range(1, 8), [1, -1, 1, -1, 1, -1, 1])
    ok = realize(oracle, sample, 0.5)
    assert ok.status == "Realized"
    assert min(witness_margins(oracle, sample, ok.witness)) >= 0.5

    bad = realize(oracle, LabeledSample.from_indices([1, 8], [1, 1]), 0.5)
    assert bad.status == "NotRealized"


def _grid_best_margin(pts: np.ndarray, labels, step: float = 2e-3) -> float:
    """Best min-margin over a grid of unit-disk functionals in the plane."""
    ax = np.arange(-1.0, 1.0 + step / 2, step)
    W = np.stack(np.meshgrid(ax, ax), axis=-1).reshape(-1, 2)
    W = W[np.einsum("ij,ij->i", W, W) <= 1.0 + 1e-12]
    margins = (W @ pts.T) * np.asarray(labels, dtype=float)
    return float(margins.min(axis=1).max())


def test_realize_dual_ball_matches_functional_grid():
    rng = np.random.default_rng(5)
    oracle = DualBallOracle(L2)
    done = 0
    while done < 5:
        n = int(rng.integers(3, 5))
        pts = rng.normal(size=(n, 2))
        pts /= np.maximum(1.0, np.linalg.norm(pts, axis=1))[:, None]
        labels = rng.choice([-1, 1], size=n)
        sample = LabeledSample.from_vectors(pts, labels)
        v = realize(oracle, sample, 0.3)
        grid = _grid_best_margin(pts, labels)
        # the grid maximum and m* coincide by minimax; an early-stopped
        # solve only brackets m*, so compare against the solver's bounds
        assert v.detail["lower"] - 6e-3 <= max(grid, 0.0) <= v.detail["upper"] + 6e-3
        if abs(grid - 0.3) > 1e-2:
            assert (v.status == "Realized") == (grid >= 0.3)
            if v.status == "Realized":
                assert min(witness_margins(oracle, sample, v.witness)) >= 0.3
            done += 1


# ---------------------------------------------------------------------------
# is_shattered


def test_is_shattered_single_vector():
    v = is_shattered(DualBallOracle(L2), [[1.0, 0.0]], 0.9)
    assert v.status == "Shattered"
    assert v.patterns_checked == 1  # symmetric class: one pattern up to flip


def test_is_shattered_dependent_vectors():
    pts = [[1, 0], [0, 1], [Fraction(3, 5), Fraction(4, 5)]]
    v = is_shattered(DualBallOracle(L2), pts, Fraction(1, 100), cfg=RATIONAL)
    assert v.status == "NotShattered" and v.band == 0.0
    ce = v.counterexample
    assert ce.value_exact == 0
    assert sum(abs(l) for l in ce.lam) == 1
    # the certificate is proportional to (0.6, 0.8, -1) / 2.4
    scaled = [l * Fraction(24, 10) for l in ce.lam]
    assert [abs(s) for s in scaled] == [Fraction(3, 5), Fraction(4, 5), 1]
    assert verify_collapse(pts, L2, ce.lam, Fraction(1, 100), points_exact=pts)


def test_is_shattered_hadamard_threshold():
    bundle = hadamard_shattered_set(2, 2)
    pts = bundle.obj["points"]
    oracle = DualBallOracle(L2)

    yes = is_shattered(oracle, pts, 0.49)
    assert yes.status == "Shattered" and yes.patterns_checked == 8
    for pattern, witness in yes.witnesses.items():
        sample = LabeledSample.from_vectors(pts, pattern)
        ok, lo = check_witness(oracle, sample, witness, 0.49)
        assert ok and lo >= 0.49 - 1e-9

    no = is_shattered(oracle, pts, 0.51)
    assert no.status == "NotShattered"
    assert no.patterns_checked == 1  # the very first pattern already fails
    assert no.counterexample.value == pytest.approx(0.5, abs=1e-6)
    assert verify_collapse(pts, L2, no.counterexample.lam, 0.51)
    assert not verify_collapse(pts, L2, no.counterexample.lam, 0.49)


def test_is_shattered_marginal_at_the_boundary():
    bundle = hadamard_shattered_set(2, 2)
    pts = bundle.obj["points"]
    oracle = DualBallOracle(L2)

    on_edge = is_shattered(oracle, pts, 0.5)
    assert on_edge.status == "Marginal"
    assert on_edge.marginal_patterns

    exact = is_shattered(oracle, bundle.obj["points_exact"], Fraction(1, 2),
                         cfg=RATIONAL)
    assert exact.status == "Shattered" and exact.band == 0.0


def test_is_shattered_pattern_cap():
    pts = np.eye(21)
    with pytest.raises(InputError):
        is_shattered(DualBallOracle(L2), pts, 0.1)


def test_is_shattered_jobs_agree():
    pts = hadamard_shattered_set(3, 2).obj["points"]
    serial = is_shattered(DualBallOracle(L2), pts, 0.3, jobs=1)
    parallel = is_shattered(DualBallOracle(L2), pts, 0.3, jobs=2)
    assert serial.status == parallel.status == "Shattered"
    assert serial.patterns_checked == parallel.patterns_checked == 128


def test_shattering_is_downward_closed_and_monotone():
    pts = hadamard_shattered_set(2, 2).obj["points"]
    oracle = DualBallOracle(L2)
    assert is_shattered(oracle, pts, 0.49).status == "Shattered"
    for sel in ((0, 1), (0, 3), (1, 2, 3)):
        assert is_shattered(oracle, pts[list(sel)], 0.49).status == "Shattered"
    assert is_shattered(oracle, pts, 0.3).status == "Shattered"


# ---------------------------------------------------------------------------
# certificate re-evaluation


def test_verify_collapse_examples():
    assert verify_collapse([[1.0, 0.0], [1.0, 0.0]], L2, [0.5, -0.5], 0.1)

    eye = [[1 if i == j else 0 for j in range(16)] for i in range(16)]
    lam = [Fraction(1, 16)] * 16
    assert verify_collapse(eye, L2, lam, Fraction(1, 4), points_exact=eye)
    tighter = Fraction(1, 4) - Fraction(1, 10**9)
    assert not verify_collapse(eye, L2, lam, tighter, points_exact=eye)

    pts = hadamard_shattered_set(2, 2).obj["points"]
    rng = np.random.default_rng(11)
    for _ in range(5):
        raw = rng.normal(size=4)
        lam = raw / np.abs(raw).sum()
        # every unit-mass combination of the shattered set keeps norm 1/2
        assert not verify_collapse(pts, L2, lam, 0.49)

    with pytest.raises(InputError):
        verify_collapse([[1.0, 0.0]], L2, [0.75], 0.1)


def test_collapse_support_folds_signs():
    space = triangle_space()
    oracle = DistanceCombinationOracle(space, centers=(0, 1, 2))
    lam = [0.5, -0.3, 0.2]
    out = collapse_support(oracle, [0, 1, 2], lam)
    g = [sum(lam[i] * float(space.dist[c, i]) for i in range(3))
         for c in range(3)]
    assert out.value == pytest.approx(max(abs(v) for v in g), abs=1e-12)


# ---------------------------------------------------------------------------
# cube condition


def test_check_cube_condition_zero_target():
    pts = [[1.0, 0.0], [0.0, 1.0]]
    res = check_cube_condition(DualBallOracle(L2), pts, 0.5, [0.0, 0.0])
    assert res.feasible


def test_check_cube_condition_dual_ball_thresholds():
    pts = [[1, 0], [0, 1]]
    oracle = DualBallOracle(L2)
    # X is the identity, so the interpolating functional is y itself
    assert check_cube_condition(oracle, pts, 0.5, [0.5, -0.5],
                                cfg=RATIONAL, points_exact=pts).feasible
    assert not check_cube_condition(oracle, pts, 0.8, [0.8, -0.8],
                                    cfg=RATIONAL, points_exact=pts).feasible

    smooth = DualBallOracle(NormSpec(1.5))
    assert check_cube_condition(smooth, pts, 0.7, [0.7, -0.7]).feasible
    assert not check_cube_condition(smooth, pts, 0.9, [0.9, -0.9]).feasible

    with pytest.raises(InputError):
        check_cube_condition(oracle, pts, 0.5, [0.6, 0.0])


def test_cube_vertices_on_gamma_space():
    bundle = gamma_counterexample_space(2, Fraction(3, 10))
    space = bundle.obj
    oracle = DistanceCombinationOracle(space, centers=range(space.n))
    held, failing = cube_vertices_contained(oracle, [0, 1], Fraction(3, 10),
                                            cfg=RATIONAL)
    assert held and failing is None


def _polytope_feasible_by_lp(vertices, indices, targets) -> bool:
    V = np.array([[float(v) for v in row] for row in vertices])
    A_eq = np.vstack([V[:, list(indices)].T, np.ones((1, V.shape[0]))])
    b_eq = [float(t) for t in targets] + [1.0]
    out = linprog(c=np.zeros(V.shape[0]), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * V.shape[0], method="highs")
    return out.status == 0


def test_cube_condition_matches_lp_oracle():
    rng = np.random.default_rng(23)
    for _ in range(20):
        K = int(rng.integers(2, 5))
        m = int(rng.integers(2, 4))
        vertices = [[Fraction(int(rng.integers(-8, 9)), 8) for _ in range(m)]
                    for _ in range(K)]
        oracle = FunctionPolytopeOracle(vertices=vertices)
        gamma = Fraction(1, 2)
        targets = [Fraction(int(rng.integers(-4, 5)), 8) for _ in range(m)]
        res = check_cube_condition(oracle, list(range(m)), gamma, targets,
                                   cfg=RATIONAL)
        assert res.feasible == _polytope_feasible_by_lp(
            vertices, range(m), targets)


def test_cube_vertices_track_shattering_on_polytopes():
    rng = np.random.default_rng(31)
    for _ in range(10):
        K = int(rng.integers(2, 6))
        n = int(rng.integers(2, 4))
        vertices = [[Fraction(int(rng.integers(-8, 9)), 8) for _ in range(n)]
                    for _ in range(K)]
        oracle = FunctionPolytopeOracle(vertices=vertices)
        gamma = Fraction(int(rng.integers(1, 8)), 16)
        pts = list(range(n))
        shattered = is_shattered(oracle, pts, gamma, cfg=RATIONAL).status
        held, _ = cube_vertices_contained(oracle, pts, gamma, cfg=RATIONAL)
        assert held == (shattered == "Shattered")


# ---------------------------------------------------------------------------
# signed-support minimum


def test_min_signed_support_keeps_mass_on_one_orthant():
    # a single split-weight LP would cancel to zero here; the true
    # minimum over unit-mass signed weights is 1
    oracle = FunctionPolytopeOracle(vertices=[[1], [-1]])
    value, lam, value_exact = min_signed_support(oracle, [0], cfg=RATIONAL)
    assert value == 1.0 and value_exact == 1
    assert abs(lam[0]) == 1

    # nonsymmetric class: the all-negative orthant drives the minimum below 0
    unrealizable = FunctionPolytopeOracle(vertices=[[1, 0], [0, 1]])
    value, lam, value_exact = min_signed_support(unrealizable, [0, 1],
                                                 cfg=RATIONAL)
    assert value_exact == Fraction(-1, 2)
    assert sum(abs(l) for l in lam) == 1


def test_min_signed_support_input_errors():
    oracle = FunctionPolytopeOracle(vertices=[[1] * 16])
    with pytest.raises(InputError):
        min_signed_support(oracle, list(range(16)))
    with pytest.raises(InputError):
        min_signed_support(DualBallOracle(L2), [[1.0, 0.0]])


# ---------------------------------------------------------------------------
# dimension search


def test_max_shattered_subset_orthonormal():
    oracle = DualBallOracle(L2)
    eye = [[1 if i == j else 0 for j in range(4)] for i in range(4)]

    at_half = max_shattered_subset(oracle, eye, Fraction(1, 2), cfg=RATIONAL,
                                   points_exact=eye)
    assert at_half.size == 4 and at_half.exact

    # 1/0.36 = 2.78: three orthonormal vectors collapse at 1/sqrt(3) < 0.6
    at_0_6 = max_shattered_subset(oracle, np.eye(4), 0.6)
    assert at_0_6.size == 2 and at_0_6.exact
    assert at_0_6.subset == (0, 1)
    assert at_0_6.certificates
    for sel, ce in at_0_6.certificates.items():
        assert len(sel) == 3
        assert ce.value <= 0.6


def test_max_shattered_subset_skips_duplicates():
    pts = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    res = max_shattered_subset(DualBallOracle(L2), pts, 0.6)
    assert res.size == 2
    assert res.subset == (0, 2)


def test_max_shattered_subset_budget_degrades_to_lower_bound():
    res = max_shattered_subset(DualBallOracle(L2), np.eye(4), 0.45, budget=2)
    assert not res.exact
    assert "budget" in res.note
    assert res.size <= 4


# ---------------------------------------------------------------------------
# packing


def test_packing_uniform_space():
    dist = [[Fraction(0) if i == j else Fraction(2, 3) for j in range(5)]
            for i in range(5)]
    space = FiniteMetricSpace.create([f"u{i}" for i in range(5)], dist,
                                     exact=True)
    assert packing_number(space, Fraction(2, 3)) == (5, (0, 1, 2, 3, 4))
    assert packing_number(space, 0.7)[0] == 1
    with pytest.raises(InputError):
        packing_number(space, 0)


def test_packing_matches_exhaustive_scan():
    space = random_metric_space(np.random.SeedSequence(entropy=41), n=10)
    s = 0.55
    best = 0
    for mask in range(1 << 10):
        sel = [i for i in range(10) if (mask >> i) & 1]
        if all(float(space.dist[a, b]) >= s
               for k, a in enumerate(sel) for b in sel[k + 1:]):
            best = max(best, len(sel))
    count, subset = packing_number(space, s)
    assert count == best
    assert all(float(space.dist[a, b]) >= s
               for k, a in enumerate(subset) for b in subset[k + 1:])


# ---------------------------------------------------------------------------
# taxonomy audits


def test_audit_submultiplicativity_rows():
    rows = audit_submultiplicativity({Fraction(1, 2): 4, Fraction(1, 4): 16})
    triple = [r for r in rows if r.gamma1 == r.gamma2 == Fraction(1, 2)]
    assert len(triple) == 1
    assert (triple[0].lhs, triple[0].rhs) == (17, 25)
    assert triple[0].passed

    phi_rows = audit_submultiplicativity({Fraction(1, 2): 2, Fraction(1, 4): 4})
    assert phi_rows and phi_rows[0].lhs == 5 and phi_rows[0].rhs == 9

    assert audit_submultiplicativity({Fraction(1, 2): 4}) == []

    # a genuine violation is reported, not smoothed over
    bad = audit_submultiplicativity({Fraction(1, 2): 3, Fraction(1, 4): 17})
    assert not bad[0].passed

    # upper-bounded product entries cannot fail spuriously
    hedged = audit_submultiplicativity(
        {Fraction(1, 2): 3, Fraction(1, 4): (17, "upper")})
    assert hedged[0].passed


def test_fit_rate_examples():
    quad = DimensionReport((Fraction(1, 2), Fraction(1, 3), Fraction(1, 4),
                            Fraction(1, 5)), (4, 9, 16, 25), ("exact",) * 4)
    p_hat, resid = fit_rate(quad)
    assert p_hat == pytest.approx(2.0, abs=1e-9) and resid < 1e-9

    cubic = quad = DimensionReport(
        (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5)),
        (8, 27, 64, 125), ("lower",) * 4)
    p_hat, resid = fit_rate(cubic)
    assert p_hat == pytest.approx(3.0, abs=1e-9) and resid < 1e-9

    flat = DimensionReport((0.5, 0.25, 0.2, 0.1), (5, 5, 5, 5), ("exact",) * 4)
    assert fit_rate(flat)[0] == pytest.approx(0.0, abs=1e-12)

    short = DimensionReport((0.5, 0.25), (4, 16), ("exact", "exact"))
    with pytest.raises(InputError):
        fit_rate(short)
    with pytest.raises(InputError):
        fit_rate(cubic, statuses=("exact",))


def test_dimension_report_monotonicity_guard():
    with pytest.raises(InputError):
        DimensionReport((0.5, 0.25), (4, 2), ("exact", "exact"))
    # a weak lower bound may dip without invalidating the report
    DimensionReport((0.5, 0.25), (4, 2), ("exact", "lower"))


def test_sample_complexity_examples():
    assert sample_complexity_estimate(1, 0.1, 1 / math.e) == 20
    assert sample_complexity_estimate(0, 0.5, 0.5) == 2
    assert sample_complexity_estimate(16, 0.01, 0.01) == 2061
    with pytest.raises(InputError):
        sample_complexity_estimate(-1, 0.1, 0.1)
    with pytest.raises(InputError):
        sample_complexity_estimate(4, 1.0, 0.1)
