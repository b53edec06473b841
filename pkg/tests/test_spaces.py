"""Norms, duality maps and finite metric space validation."""
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from marginlab import (
    FiniteMetricSpace,
    InputError,
    NormSpec,
    load_metric_space,
    validate_metric,
)
from marginlab.spaces import (
    diameter,
    dump_metric_space,
    duality_map,
    norm,
    norm_exact,
    rescale_to_unit_diameter,
)


def naive_lp_norm(v, p: float) -> float:
    if math.isinf(p):
        return max(abs(x) for x in v)
    return sum(abs(x) ** p for x in v) ** (1.0 / p)


# --- NormSpec ---------------------------------------------------------------

def test_dual_exponent_values():
    assert NormSpec(2).dual_exponent == 2
    assert math.isinf(NormSpec(1).dual_exponent)
    assert NormSpec(math.inf).dual_exponent == 1
    assert NormSpec(1.5).dual_exponent == pytest.approx(3.0)
    assert NormSpec(3).dual_exponent == pytest.approx(1.5)


def test_norm_spec_rejects_p_below_one():
    with pytest.raises(InputError):
        NormSpec(0.5)


@given(st.floats(min_value=1.001, max_value=50))
def test_dual_exponent_involution(p):
    assert NormSpec(p).dual().dual().p == pytest.approx(p, rel=1e-9)


# --- norm -------------------------------------------------------------------

def test_norm_pythagorean():
    assert norm([3.0, 4.0], NormSpec(2)) == pytest.approx(5.0)


def test_norm_sup():
    assert norm([1.0, -1.0, 1.0, -1.0], NormSpec(math.inf)) == 1.0


def test_norm_p15_ones():
    # 8 ones at p = 1.5: (8)^{2/3} = 4 exactly
    assert norm(np.ones(8), NormSpec(1.5)) == pytest.approx(4.0, abs=1e-12)


def test_norm_exact_rational():
    v = norm_exact([Fraction(3), Fraction(4)], NormSpec(2))
    assert v == Fraction(5)


@settings(max_examples=60)
@given(st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=6),
       st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]))
def test_norm_matches_naive_summation(v, p):
    assert norm(v, NormSpec(p)) == pytest.approx(naive_lp_norm(v, p), abs=1e-9)


# --- duality map ------------------------------------------------------------

def test_duality_map_euclidean():
    w = duality_map([3.0, 4.0], NormSpec(2))
    assert w == pytest.approx([0.6, 0.8])


def test_duality_map_p3():
    w = duality_map([1.0, 1.0], NormSpec(3))
    assert w == pytest.approx([2 ** (-2 / 3)] * 2)
    assert float(w @ np.array([1.0, 1.0])) == pytest.approx(2 ** (1 / 3))
    assert norm(w, NormSpec(1.5)) == pytest.approx(1.0)


def test_duality_map_p1_tie_break():
    # one support coordinate; the map picks the lowest-index maximizer
    assert duality_map([5.0, 0.0, 0.0], NormSpec(1)) == pytest.approx([1, 0, 0])


@settings(max_examples=60)
@given(st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=5)
       .filter(lambda v: max(abs(x) for x in v) > 1e-6),
       st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf]))
def test_duality_map_is_norming(v, p):
    spec = NormSpec(p)
    w = duality_map(v, spec)
    assert float(np.dot(w, v)) == pytest.approx(norm(v, spec), rel=1e-9, abs=1e-9)
    assert norm(w, spec.dual()) <= 1 + 1e-9


# --- metric validation ------------------------------------------------------

def intro_distances(k: int, r: float, R: float):
    """Two anchor points and all 2^k - 1 nonempty-subset centers, with the
    distances of the two-radius construction."""
    from marginlab import intro_counterexample_space
    return intro_counterexample_space(k, r, R).obj


def test_validate_metric_intro_ok():
    space = intro_distances(2, 0.25, 0.75)
    check = validate_metric([[space.d(i, j) for j in range(space.n)]
                             for i in range(space.n)])
    assert check.ok


def test_validate_metric_intro_triangle_violation():
    space = intro_distances(2, 0.2, 0.7)
    check = validate_metric([[space.d(i, j) for j in range(space.n)]
                             for i in range(space.n)])
    assert not check.ok
    assert check.kind == "triangle"
    i, j, k = check.indices
    d = space.d
    assert d(i, k) > d(i, j) + d(j, k)


def test_validate_metric_positivity():
    m = [[0, 0, 1], [0, 0, 1], [1, 1, 0]]
    check = validate_metric(m)
    assert check.kind == "positivity"
    assert check.indices == (0, 1)


def test_validate_metric_symmetry():
    m = [[0, 1.0], [0.9, 0]]
    assert validate_metric(m).kind == "symmetry"


def brute_metric_ok(m) -> bool:
    n = len(m)
    for i in range(n):
        if m[i][i] != 0:
            return False
        for j in range(n):
            if m[i][j] != m[j][i] or (i != j and m[i][j] <= 0):
                return False
    return all(m[i][k] <= m[i][j] + m[j][k]
               for i in range(n) for j in range(n) for k in range(n))


@settings(max_examples=80)
@given(st.integers(min_value=2, max_value=5), st.data())
def test_validate_metric_matches_brute_force(n, data):
    # small integer grids make violations likely while keeping ties exact
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = data.draw(st.integers(min_value=1, max_value=4))
            m[i][j] = m[j][i] = v
    assert bool(validate_metric(m)) == brute_metric_ok(m)


# --- FiniteMetricSpace ------------------------------------------------------

def test_uniform_space_diameter():
    n = 4
    m = [[0 if i == j else Fraction(2, 3) for j in range(n)] for i in range(n)]
    space = FiniteMetricSpace.create([f"x{i}" for i in range(n)], m, exact=True)
    assert diameter(space) == pytest.approx(2 / 3)
    assert max(max(row) for row in space.dist_exact) == Fraction(2, 3)


def test_gamma_space_diameter_below_one():
    from marginlab import gamma_counterexample_space
    space = gamma_counterexample_space(2, 0.3).obj
    assert diameter(space) == pytest.approx(2 / 3 + 0.3)
    assert diameter(space) <= 1


def test_rescale_two_points():
    space = FiniteMetricSpace.create(["a", "b"], [[0, 4.0], [4.0, 0]])
    scaled = rescale_to_unit_diameter(space)
    assert scaled.d(0, 1) == 1.0


def test_create_rejects_bad_metric():
    with pytest.raises(InputError):
        FiniteMetricSpace.create(["a", "b", "c"],
                                 [[0, 1, 3], [1, 0, 1], [3, 1, 0]])


def test_metric_space_json_round_trip(tmp_path):
    m = [[0, Fraction(1, 2), Fraction(2, 3)],
         [Fraction(1, 2), 0, Fraction(2, 3)],
         [Fraction(2, 3), Fraction(2, 3), 0]]
    space = FiniteMetricSpace.create(["a", "b", "c"], m, exact=True)
    path = tmp_path / "space.json"
    dump_metric_space(space, path)
    back = load_metric_space(json.loads(path.read_text()), exact=True)
    assert back.ids == space.ids
    assert back.dist_exact == space.dist_exact
