"""Construction bundles: predicted certificates must be reproducible."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from marginlab import (
    BallPairOracle,
    DistanceCombinationOracle,
    DualBallOracle,
    HadamardMatrix,
    InputError,
    LabeledSample,
    SolverConfig,
    bundle_to_json,
    check_bundle_metric,
    check_cube_condition,
    dump_bundle,
    gamma_counterexample_space,
    hadamard_shattered_set,
    intro_ball_pair_params,
    intro_counterexample_space,
    is_shattered,
    phi_class_truncation,
    realize,
    standard_basis_set,
    sylvester_hadamard,
    validate_metric,
)
from marginlab.classes import PhiSpec, ball_pair_realizable, phi_realizable

RATIONAL = SolverConfig(arithmetic="rational")


# ---------------------------------------------------------------------------
# Hadamard matrices


def test_sylvester_hadamard_base_cases():
    assert sylvester_hadamard(0).entries.tolist() == [[1]]
    assert sylvester_hadamard(1).entries.tolist() == [[1, 1], [1, -1]]


def test_sylvester_hadamard_orthogonality_exact():
    for m in range(9):
        H = sylvester_hadamard(m)
        n = H.order
        assert np.array_equal(H.entries @ H.entries.T, n * np.eye(n, dtype=np.int64))


def test_sylvester_hadamard_bounds():
    with pytest.raises(InputError):
        sylvester_hadamard(14)
    with pytest.raises(InputError):
        sylvester_hadamard(-1)


def test_hadamard_matrix_rejects_bad_entries():
    with pytest.raises(InputError):
        HadamardMatrix(order=2, entries=[[1, 1], [1, 1]])
    with pytest.raises(InputError):
        HadamardMatrix(order=2, entries=[[1, 2], [1, -1]])


# ---------------------------------------------------------------------------
# shattered point sets


def test_hadamard_set_p4():
    bundle = hadamard_shattered_set(2, 4)
    pts = bundle.obj["points"]
    root_half = 1 / math.sqrt(2)
    assert np.allclose(np.abs(pts), root_half)
    assert np.allclose(np.sum(np.abs(pts) ** 4, axis=1), 1.0)
    assert bundle.predicted_gamma == 0.5
    assert bundle.predicted_status == "Shattered"
    assert bundle.note == ""


def test_hadamard_set_p2():
    bundle = hadamard_shattered_set(2, 2)
    pts = bundle.obj["points"]
    assert np.allclose(np.abs(pts), 0.5)
    assert np.allclose(pts @ pts.T, np.eye(4))
    assert bundle.obj["points_exact"] is not None
    assert bundle.predicted_gamma == 0.5
    assert bundle.note == ""


def test_hadamard_set_below_two_drops_threshold():
    bundle = hadamard_shattered_set(1, 1.5)
    # uniform weights on the all-plus pattern stop the set at n^(-1/p)
    assert bundle.predicted_gamma == pytest.approx(2.0 ** (-2 / 3))
    assert bundle.note != ""
    oracle = DualBallOracle(bundle.obj["space"])
    above = is_shattered(oracle, bundle.obj["points"],
                         bundle.predicted_gamma + 1e-3)
    assert above.status == "NotShattered"

    at_one = hadamard_shattered_set(2, 1)
    assert float(at_one.predicted_gamma_exact) == 0.25


def test_hadamard_set_certifies_shattered():
    for p in (1.5, 3):
        bundle = hadamard_shattered_set(1, p)
        oracle = DualBallOracle(bundle.obj["space"])
        v = is_shattered(oracle, bundle.obj["points"],
                         bundle.predicted_gamma - 1e-6)
        assert v.status == "Shattered"


def test_hadamard_set_input_errors():
    with pytest.raises(InputError):
        hadamard_shattered_set(0, 2)
    with pytest.raises(InputError):
        hadamard_shattered_set(2, 0.5)


def test_standard_basis_predictions():
    assert standard_basis_set(8, 1.5).predicted_gamma == pytest.approx(0.5)
    b16 = standard_basis_set(16, 2)
    assert b16.predicted_gamma == 0.25
    assert float(b16.predicted_gamma_exact) == 0.25
    assert standard_basis_set(4, math.inf).predicted_gamma == 0.25

    b5 = standard_basis_set(5, 1)
    v = is_shattered(DualBallOracle(b5.obj["space"]), b5.obj["points"], 0.99)
    assert v.status == "Shattered"


def test_standard_basis_boundary_is_closed():
    bundle = standard_basis_set(4, 2)
    oracle = DualBallOracle(bundle.obj["space"])
    pts = bundle.obj["points_exact"]
    at = is_shattered(oracle, pts, Fraction(1, 2), cfg=RATIONAL)
    assert at.status == "Shattered"
    above = is_shattered(oracle, pts, Fraction(1, 2) + Fraction(1, 1000),
                         cfg=RATIONAL)
    assert above.status == "NotShattered"
    # uniform weights are the collapse certificate above the threshold
    assert [abs(l) for l in above.counterexample.lam] == [Fraction(1, 4)] * 4


# ---------------------------------------------------------------------------
# intro two-radius space


def test_intro_space_valid_and_shattered():
    bundle = intro_counterexample_space(3, Fraction(1, 4), Fraction(3, 4),
                                        include_empty=True)
    assert bundle.predicted_status == "MetricValid"
    assert check_bundle_metric(bundle)
    space = bundle.obj
    assert space.n == 3 + 8

    oracle = BallPairOracle(space, intro_ball_pair_params(bundle))
    for code in range(8):
        labels = [1 if (code >> (2 - i)) & 1 else -1 for i in range(3)]
        sample = LabeledSample.from_indices([0, 1, 2], labels)
        hit = ball_pair_realizable(space, sample, oracle.params)
        assert hit.realizable
        assert hit.center_id == "b" + format(code, "03b")


def test_intro_space_empty_subset_flag():
    default = intro_counterexample_space(3, 0.25, 0.75)
    assert default.obj.n == 3 + 7
    all_negative = LabeledSample.from_indices([0, 1, 2], [-1, -1, -1])
    params = intro_ball_pair_params(default)
    assert not ball_pair_realizable(default.obj, all_negative, params).realizable
    assert (1, 1, 1) in default.witnesses
    assert (-1, -1, -1) not in default.witnesses


def test_intro_space_invalid_radii():
    bundle = intro_counterexample_space(2, 0.2, 0.7)
    assert bundle.predicted_status == "MetricInvalid"
    assert bundle.witnesses is None
    check = validate_metric(bundle.obj.dist_exact, exact=True)
    assert not check and check.kind == "triangle"


def test_intro_space_edge_sizes():
    tiny = intro_counterexample_space(1, 0.25, 0.75)
    assert tiny.obj.n == 2 and tiny.predicted_status == "MetricValid"
    with pytest.raises(InputError):
        intro_counterexample_space(13, 0.25, 0.75)
    with pytest.raises(InputError):
        intro_counterexample_space(2, 0.5, 0.25)


# ---------------------------------------------------------------------------
# three-distance margin space


def test_gamma_space_k2():
    bundle = gamma_counterexample_space(2, Fraction(3, 10))
    assert bundle.predicted_status == "MetricValid"
    assert check_bundle_metric(bundle)
    space = bundle.obj
    assert space.n == 2 + 2 * 4

    # the witness for labeling (-1, +1) is the half-difference over {a1}
    witness = bundle.witnesses[(-1, 1)]
    oracle = DistanceCombinationOracle(space, centers=witness["centers"])
    sample = LabeledSample.from_indices([0, 1], [-1, 1])
    v = realize(oracle, sample, Fraction(3, 10), cfg=RATIONAL)
    assert v.status == "Realized"


def test_gamma_space_above_third_is_invalid():
    bundle = gamma_counterexample_space(2, Fraction(34, 100))
    assert bundle.predicted_status == "MetricInvalid"
    check = validate_metric(bundle.obj.dist_exact, exact=True)
    assert not check and check.kind == "triangle"


def test_gamma_space_boundary_third():
    bundle = gamma_counterexample_space(1, Fraction(1, 3))
    assert bundle.predicted_status == "MetricValid"
    assert check_bundle_metric(bundle)


def test_gamma_space_cube_condition_all_patterns():
    k = 3
    gamma = Fraction(1, 4)
    bundle = gamma_counterexample_space(k, gamma)
    oracle = DistanceCombinationOracle(bundle.obj, centers=range(bundle.obj.n))
    for code in range(1 << k):
        pattern = [1 if (code >> i) & 1 else -1 for i in range(k)]
        res = check_cube_condition(oracle, list(range(k)), gamma,
                                   [gamma * s for s in pattern], cfg=RATIONAL)
        assert res.feasible


def test_gamma_space_input_errors():
    with pytest.raises(InputError):
        gamma_counterexample_space(11, 0.1)
    with pytest.raises(InputError):
        gamma_counterexample_space(2, Fraction(2, 3))


# ---------------------------------------------------------------------------
# coordinate-threshold truncations


def test_phi_truncation_dims():
    bundle = phi_class_truncation(PhiSpec(preset="exp", N=100),
                                  gammas=(Fraction(1, 2), Fraction(1, 4)))
    dims = bundle.witnesses["dims"]
    assert dims["1/2"] == 7
    assert dims["1/4"] == 54

    linear = phi_class_truncation(PhiSpec(preset="power", N=100, k=1),
                                  gammas=(Fraction(1, 2),))
    assert linear.witnesses["dims"]["1/2"] == 2

    # the prediction is live: {1..dim} realizable, {1..dim+1} not
    oracle = bundle.obj
    assert phi_realizable(oracle.spec, LabeledSample.from_indices(
        range(1, 8), [1] * 7), Fraction(1, 2)).realizable
    assert not phi_realizable(oracle.spec, LabeledSample.from_indices(
        range(1, 9), [1] * 8), Fraction(1, 2)).realizable


def test_phi_truncation_caps_at_domain():
    bundle = phi_class_truncation(PhiSpec(preset="exp", N=20),
                                  gammas=(Fraction(1, 4),))
    assert bundle.witnesses["dims"]["1/4"] == 20
    with pytest.raises(InputError):
        phi_class_truncation(PhiSpec(preset="exp", N=10**6 + 1))
    with pytest.raises(InputError):
        phi_class_truncation(PhiSpec(preset="exp", N=100), gammas=())


# ---------------------------------------------------------------------------
# serialization


def test_bundle_json_round_trip(tmp_path):
    bundle = hadamard_shattered_set(2, 2)
    obj = bundle_to_json(bundle)
    assert obj["kind"] == "hadamard_shattered_set"
    assert obj["predicted_status"] == "Shattered"
    assert obj["params"] == {"m": 2, "p": 2.0, "n": 4}
    json.dumps(obj)  # must be plain-JSON clean

    path = tmp_path / "had.json"
    dump_bundle(bundle, path)
    loaded = json.loads(path.read_text())
    assert loaded["predicted_gamma"] == 0.5


def test_bundle_metric_check_needs_a_space():
    with pytest.raises(InputError):
        check_bundle_metric(standard_basis_set(4, 2))
