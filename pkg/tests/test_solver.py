"""Simplex LP solver and the minimum-norm-point routine."""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from marginlab import (
    InputError,
    LpInfeasible,
    LpOptimal,
    LpUnbounded,
    NormSpec,
    SolverConfig,
    as_signed_weights,
    fold_signs,
    lp_solve,
    min_norm_point,
)
from marginlab.solver import farkas_gap
from marginlab.spaces import norm

RATIONAL = SolverConfig(arithmetic="rational")


def test_config_validation():
    assert SolverConfig(tol=1e-5).band == pytest.approx(3e-5)
    with pytest.raises(InputError):
        SolverConfig(tol=0.5)
    with pytest.raises(InputError):
        SolverConfig(tol=0.0)


# --- lp_solve ---------------------------------------------------------------

def test_lp_single_constraint():
    out = lp_solve([1.0], A_ub=[[1.0]], b_ub=[1.0],
                   bounds=[(None, None)], sense="max")
    assert isinstance(out, LpOptimal)
    assert out.value == pytest.approx(1.0)
    assert out.x[0] == pytest.approx(1.0)


def test_lp_simplex_face():
    out = lp_solve([1.0, 1.0], A_ub=[[1.0, 1.0]], b_ub=[1.0], sense="max")
    assert out.value == pytest.approx(1.0)


def test_lp_rational_exact_vertex():
    # 2x+y <= 1, x+3y <= 1 meet at (2/5, 1/5): objective value exactly 3/5
    out = lp_solve([Fraction(1), Fraction(1)],
                   A_ub=[[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]],
                   b_ub=[Fraction(1), Fraction(1)], sense="max", config=RATIONAL)
    assert out.value == Fraction(3, 5)
    assert tuple(out.x) == (Fraction(2, 5), Fraction(1, 5))


def test_lp_unbounded():
    out = lp_solve([1.0], A_ub=[[-1.0]], b_ub=[0.0], sense="max")
    assert isinstance(out, LpUnbounded)


def test_lp_infeasible_farkas_certificate():
    A = [[1.0], [-1.0]]
    b = [-1.0, 0.0]  # x <= -1 and -x <= 0 cannot both hold
    out = lp_solve([1.0], A_ub=A, b_ub=b, sense="max")
    assert isinstance(out, LpInfeasible)
    station, gap = farkas_gap(out.certificate, A_ub=A, b_ub=b,
                              bounds=[(0, None)])
    assert max(abs(s) for s in station) < 1e-9
    assert gap < 0


def vertex_enumeration_max(c, A, b):
    """Best objective over all basic feasible points of {Ax <= b, x >= 0}."""
    m, n = A.shape
    rows = np.vstack([A, -np.eye(n)])
    rhs = np.concatenate([b, np.zeros(n)])
    best = None
    for active in itertools.combinations(range(m + n), n):
        sub = rows[list(active)]
        if abs(np.linalg.det(sub)) < 1e-9:
            continue
        x = np.linalg.solve(sub, rhs[list(active)])
        if np.all(rows @ x <= rhs + 1e-9):
            val = float(c @ x)
            best = val if best is None else max(best, val)
    return best


def test_lp_random_matches_vertex_enumeration():
    rng = np.random.default_rng(42)
    for _ in range(10):
        A = rng.uniform(-1, 2, size=(5, 8))
        b = rng.uniform(1, 3, size=5)   # feasible at the origin
        c = rng.uniform(-1, 1, size=8)
        A = np.vstack([A, np.ones(8)])  # cap the feasible set
        b = np.concatenate([b, [10.0]])
        out = lp_solve(list(c), A_ub=A.tolist(), b_ub=b.tolist(), sense="max")
        assert isinstance(out, LpOptimal)
        expect = vertex_enumeration_max(c, A, b)
        assert out.value == pytest.approx(expect, abs=1e-7)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * 8,
                      method="highs")
        assert out.value == pytest.approx(-ref.fun, abs=1e-7)


def test_lp_duals_reconstruct_objective():
    out = lp_solve([2.0, 1.0], A_ub=[[1.0, 1.0], [1.0, 0.0]],
                   b_ub=[1.0, 0.75], sense="max")
    y = out.duals["y_ub"]
    assert sum(yi * bi for yi, bi in zip(y, [1.0, 0.75])) == pytest.approx(
        out.value, abs=1e-7)


# --- min_norm_point ---------------------------------------------------------

def test_min_norm_antipodal_pair():
    res = min_norm_point(np.array([[1.0, 0.0], [-1.0, 0.0]]), NormSpec(2))
    assert res.value == pytest.approx(0.0, abs=1e-7)
    assert res.mu == pytest.approx([0.5, 0.5], abs=1e-6)


def test_min_norm_orthonormal_four():
    res = min_norm_point(np.eye(4), NormSpec(2))
    assert res.value == pytest.approx(0.5, abs=1e-9)
    assert res.mu == pytest.approx([0.25] * 4, abs=1e-6)


def test_min_norm_basis_p15():
    res = min_norm_point(np.eye(8), NormSpec(1.5))
    assert res.value == pytest.approx(8 ** (-1 / 3), abs=1e-9)
    assert res.value == pytest.approx(0.5, abs=1e-9)


def test_min_norm_rational_orthonormal():
    ex = tuple(tuple(Fraction(1 if i == j else 0) for j in range(4))
               for i in range(4))
    res = min_norm_point(np.eye(4), NormSpec(2), RATIONAL)
    assert res.value_sq_exact == Fraction(1, 4)
    assert sum(res.mu_exact) == 1


def grid_min_norm(points: np.ndarray, p: float, step: float = 1e-3) -> float:
    """Brute-force min of ||a x1 + b x2 + (1-a-b) x3||_p over the simplex."""
    a = np.arange(0.0, 1.0 + step / 2, step)
    A, B = np.meshgrid(a, a, indexing="ij")
    keep = A + B <= 1.0 + 1e-12
    A, B = A[keep], B[keep]
    combo = (A[:, None] * points[0] + B[:, None] * points[1]
             + (1.0 - A - B)[:, None] * points[2])
    if math.isinf(p):
        vals = np.abs(combo).max(axis=1)
    else:
        vals = (np.abs(combo) ** p).sum(axis=1) ** (1.0 / p)
    return float(vals.min())


def test_min_norm_matches_grid_oracle():
    # unit vectors keep the edge minimizers at exact midpoints, so the
    # 1e-3 grid contains them; triples whose hull covers the origin are
    # excluded (there the grid gap is linear in the step, not quadratic)
    for seed in (1, 2, 4, 7):
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(3, 2))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        res = min_norm_point(pts, NormSpec(2))
        assert res.value > 0.01
        assert res.value <= grid_min_norm(pts, 2.0) + 1e-12
        assert res.value == pytest.approx(grid_min_norm(pts, 2.0), abs=1e-6)


def test_min_norm_witness_bounds_value():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(4, 3))
    res = min_norm_point(pts, NormSpec(2))
    if res.witness is not None:
        margins = pts @ np.asarray(res.witness)
        assert margins.min() <= res.value + 1e-7
        assert res.value - res.gap <= margins.min() + 1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.sampled_from([1.5, 2.0, 3.0]))
def test_min_norm_permutation_invariant(seed, p):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(4, 3))
    res = min_norm_point(pts, NormSpec(p))
    perm = rng.permutation(4)
    res2 = min_norm_point(pts[perm], NormSpec(p))
    assert res2.value == pytest.approx(res.value, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.floats(min_value=0.1, max_value=5.0))
def test_min_norm_scaling(seed, scale):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(3, 2))
    base = min_norm_point(pts, NormSpec(2)).value
    scaled = min_norm_point(scale * pts, NormSpec(2)).value
    # near-zero minima stop at the solver tolerance, so allow that slack
    assert scaled == pytest.approx(scale * base, rel=1e-5, abs=1e-6)


# --- weight helpers ---------------------------------------------------------

def test_fold_signs_examples():
    assert fold_signs([0.5, 0.5], [1, -1]) == pytest.approx([0.5, -0.5])
    assert fold_signs([1.0, 0.0], [-1, 1]) == pytest.approx([-1.0, 0.0])
    mu = [0.2, 0.3, 0.5]
    assert fold_signs(mu, [1, 1, 1]) == pytest.approx(mu)


@settings(max_examples=40)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1,
                max_size=6).filter(lambda v: sum(v) > 1e-9),
       st.data())
def test_fold_signs_preserves_mass(raw, data):
    mu = np.array(raw) / sum(raw)
    y = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=len(mu),
                           max_size=len(mu)))
    lam = fold_signs(mu, y)
    assert float(np.abs(lam).sum()) == pytest.approx(1.0, abs=1e-12)


def test_as_signed_weights_rejects_bad_mass():
    with pytest.raises(InputError):
        as_signed_weights([0.5, 0.25])
