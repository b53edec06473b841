"""Concept classes presented through sample-restricted support oracles.

Every class here is an immutable descriptor whose central method answers
one question: given simplex weights mu and a sign pattern y on a sample,
what is  sup_{f in F} sum_i mu_i y_i f(x_i)?  That linear-maximization
view is what the certification layer consumes.  Classes with a known
closed-form realizability criterion (Lipschitz separation, ball-pair
center search, coordinate thresholds) additionally expose it directly,
since the direct test is both faster and exact.

Kinds and their parameters:

* ``DualBall`` over a normed space: F is the dual unit ball acting as
  linear functionals; support is a norm by the norming-functional
  identity.
* ``DistanceCombination`` (and the Pos/Neg halves) over a finite metric
  space: F consists of coefficient combinations sum_c a_c d(c, .) with
  sum|a| <= 1, split by positive-coefficient mass at 1/2.
* ``Lipschitz``: all 1-Lipschitz real functions on the space.
* ``BallPair``: partial concepts labeling a ball of radius r positive
  and the complement of the concentric R-ball negative.
* ``Phi``: product class on coordinates 1..N where the allowed
  confidence at point n is capped by the threshold phi admits.
* ``FunctionPolytope``: an explicit convex hull of finitely many
  functions on a finite domain; the generic vehicle for equivalence
  fuzzing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, InputError
from .exact import to_fraction
from .solver import LpOptimal, LpUnbounded, SolverConfig, lp_solve
from .spaces import FiniteMetricSpace, NormSpec, as_points, duality_map, norm

__all__ = [
    "LabeledSample",
    "BallPairParams",
    "PhiSpec",
    "SupportEval",
    "ConceptClassOracle",
    "DualBallOracle",
    "DistanceCombinationOracle",
    "LipschitzOracle",
    "BallPairOracle",
    "PhiOracle",
    "FunctionPolytopeOracle",
    "check_unit_ball",
    "support_dual_ball",
    "support_distance_combination",
    "eval_distance_combination",
    "lip_realizable",
    "lip_extension_eval",
    "ball_pair_realizable",
    "phi_realizable",
    "LipRealizability",
    "BallPairRealizability",
    "PhiRealizability",
    "oracle_to_json",
    "oracle_from_json",
]


def _check_labels(labels) -> tuple:
    labs = tuple(int(v) for v in labels)
    if any(v not in (-1, 1) for v in labs):
        raise InputError("labels must be +1 or -1")
    return labs


@dataclass(frozen=True)
class LabeledSample:
    """A finite labeled sample: points with signs.

    ``indices`` addresses points of a finite metric space (or the domain
    of a coordinate class); ``vectors`` holds explicit coordinates for
    normed-space samples, with optional exact rational rows alongside.
    Exactly one of the two point forms is present.
    """

    labels: tuple
    indices: tuple | None = None
    vectors: np.ndarray | None = None
    vectors_exact: tuple | None = None

    def __post_init__(self):
        labs = _check_labels(self.labels)
        object.__setattr__(self, "labels", labs)
        if (self.indices is None) == (self.vectors is None):
            raise InputError("exactly one of indices/vectors must be given")
        if self.indices is not None:
            idx = tuple(int(i) for i in self.indices)
            if len(idx) != len(labs):
                raise InputError("points and labels must have equal length")
            object.__setattr__(self, "indices", idx)
        else:
            pts = as_points(self.vectors)
            if pts.shape[0] != len(labs):
                raise InputError("points and labels must have equal length")
            pts.setflags(write=False)
            object.__setattr__(self, "vectors", pts)
            if self.vectors_exact is not None:
                ex = tuple(tuple(to_fraction(v) for v in row)
                           for row in self.vectors_exact)
                if len(ex) != len(labs):
                    raise InputError("exact rows and labels must have equal length")
                object.__setattr__(self, "vectors_exact", ex)
        if len(labs) == 0:
            raise InputError("sample must be nonempty")

    @classmethod
    def from_vectors(cls, points, labels, exact=None) -> "LabeledSample":
        return cls(labels=tuple(labels), vectors=np.asarray(points, dtype=float),
                   vectors_exact=exact)

    @classmethod
    def from_indices(cls, indices, labels) -> "LabeledSample":
        return cls(labels=tuple(labels), indices=tuple(indices))

    @property
    def n(self) -> int:
        return len(self.labels)

    def y(self) -> np.ndarray:
        return np.array(self.labels, dtype=float)

    def relabel(self, labels) -> "LabeledSample":
        return LabeledSample(labels=tuple(labels), indices=self.indices,
                             vectors=self.vectors, vectors_exact=self.vectors_exact)


@dataclass(frozen=True)
class BallPairParams:
    """Radii of a positive ball and a negative co-ball, 0 <= r < R."""

    r: float
    R: float

    def __post_init__(self):
        if not (0 <= self.r < self.R):
            raise InputError(f"need 0 <= r < R, got r={self.r}, R={self.R}")


_PHI_PRESETS = ("power", "exp")


@dataclass(frozen=True)
class PhiSpec:
    """A margin-to-dimension threshold map from the named presets.

    ``preset="power"`` is phi(g) = floor(1/g^k); ``preset="exp"`` is
    phi(g) = floor(exp(1/g)).  Both are nonincreasing on (0, 1).  ``N``
    truncates the coordinate domain to {1..N}.  Float margins are
    snapped to nearby small rationals for the power preset so that
    boundary values like 1/g^k landing on an integer evaluate exactly.
    """

    preset: str
    N: int
    k: int | None = None

    def __post_init__(self):
        if self.preset not in _PHI_PRESETS:
            raise InputError(f"preset must be one of {_PHI_PRESETS}")
        if self.preset == "power" and (self.k is None or self.k < 1):
            raise InputError("power preset needs integer k >= 1")
        if self.N < 1:
            raise InputError("truncation bound N must be >= 1")

    def phi(self, gamma) -> int:
        g = to_fraction(gamma, max_denominator=10**12)
        if not (0 < g < 1):
            raise InputError("phi is defined on margins in (0, 1)")
        if self.preset == "power":
            return int(math.floor(1 / g ** self.k))
        return int(math.floor(math.exp(1 / float(g))))

    def threshold(self, point: int) -> float:
        """Largest margin at which coordinate ``point`` is usable (cap 1)."""
        if point < 1:
            raise InputError("domain points start at 1")
        if self.preset == "power":
            return min(1.0, float(point) ** (-1.0 / self.k))
        if point == 1:
            return 1.0
        return min(1.0, 1.0 / math.log(point))

    def spot_check_monotone(self, grid: Sequence[float]) -> bool:
        vals = [self.phi(g) for g in sorted(float(g) for g in grid)]
        return all(a >= b for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True)
class SupportEval:
    """One support-oracle evaluation: the value and what attains it.

    ``maximizer`` is kind-specific (a dual functional, a coefficient
    vector over centers, function values, a vertex row); re-evaluating
    it on the sample reproduces ``value``.  ``value_exact`` is filled on
    exact evaluations; ``attained`` is False for open classes whose
    supremum is a limit.
    """

    value: float
    maximizer: object
    value_exact: object = None
    attained: bool = True
    detail: dict | None = None


class ConceptClassOracle:
    """Base descriptor: immutable, pure, concurrently usable."""

    kind: str = ""
    symmetric: bool = False

    def support(self, sample: LabeledSample, mu, y=None, exact: bool = False) -> SupportEval:
        raise NotImplementedError

    def params_json(self) -> dict:
        return {}

    def space_json(self):
        return None


def _pattern(sample: LabeledSample, y) -> np.ndarray:
    ys = sample.y() if y is None else np.asarray(y, dtype=float)
    if ys.shape != (sample.n,):
        raise InputError("pattern length must match the sample")
    if not np.all(np.abs(ys) == 1.0):
        raise InputError("pattern entries must be +-1")
    return ys


def _mu_array(mu, n: int) -> np.ndarray:
    arr = np.asarray(mu, dtype=float)
    if arr.shape != (n,):
        raise InputError("weights length must match the sample")
    if np.any(arr < -1e-12):
        raise InputError("weights must be nonnegative")
    return np.clip(arr, 0.0, None)


# ---------------------------------------------------------------------------
# dual ball of a normed space


def check_unit_ball(points, space: NormSpec, tol: float = 1e-9) -> None:
    """Raise InputError naming the first point with norm > 1 + tol."""
    pts = as_points(points)
    for i in range(pts.shape[0]):
        if norm(pts[i], space) > 1.0 + tol:
            raise InputError(f"point {i} lies outside the unit ball")


def support_dual_ball(points, n: NormSpec, mu, y) -> tuple:
    """sup over the dual unit ball: the norm of the signed combination.

    Returns ``(value, maximizer)`` where value = ||sum mu_i y_i x_i||
    and maximizer is the norming functional of that vector (None at
    zero, where every dual vector is equally useless).
    """
    pts = as_points(points)
    check_unit_ball(pts, n)
    ys = np.asarray(y, dtype=float)
    m = _mu_array(mu, pts.shape[0])
    v = (m * ys) @ pts
    value = norm(v, n)
    maximizer = duality_map(v, n) if value > 0 else None
    return value, maximizer


@dataclass(frozen=True)
class DualBallOracle(ConceptClassOracle):
    """F = the dual unit ball of a normed space, acting linearly."""

    space: NormSpec
    kind = "DualBall"
    symmetric = True

    def support(self, sample, mu, y=None, exact: bool = False) -> SupportEval:
        if sample.vectors is None:
            raise InputError("dual-ball oracle needs a vector sample")
        ys = _pattern(sample, y)
        value, maximizer = support_dual_ball(sample.vectors, self.space, mu, ys)
        value_exact = None
        if exact:
            if sample.vectors_exact is None:
                raise InputError("exact evaluation needs exact sample coordinates")
            from .spaces import norm_exact
            mu_e = [to_fraction(v) for v in mu]
            d = len(sample.vectors_exact[0])
            vex = [sum(mu_e[i] * int(ys[i]) * sample.vectors_exact[i][t]
                       for i in range(sample.n)) for t in range(d)]
            value_exact = norm_exact(vex, self.space)
            value = float(value_exact)
        return SupportEval(value=value, maximizer=maximizer, value_exact=value_exact)

    def params_json(self) -> dict:
        return {"p": "inf" if math.isinf(self.space.p) else self.space.p}


# ---------------------------------------------------------------------------
# distance combinations on a finite metric space


def _center_indices(space: FiniteMetricSpace, centers) -> tuple:
    cs = tuple(int(c) for c in centers)
    if len(cs) == 0:
        raise InputError("center set must be nonempty")
    for c in cs:
        if not (0 <= c < space.n):
            raise InputError(f"center index {c} outside the space")
    return cs


def _check_sample_indices(space: FiniteMetricSpace, sample: LabeledSample) -> tuple:
    if sample.indices is None:
        raise InputError("metric-space oracle needs an index sample")
    for i in sample.indices:
        if not (0 <= i < space.n):
            raise InputError(f"sample index {i} outside the space")
    return sample.indices


def _signed_center_loads(space, centers, idx, mu, ys, exact):
    """g_c = sum_i mu_i y_i d(c, x_i) for each center c."""
    if exact:
        if space.dist_exact is None:
            raise InputError("exact evaluation needs exact distances")
        mu_e = [to_fraction(v) for v in mu]
        return [sum(mu_e[i] * int(ys[i]) * space.dist_exact[c][idx[i]]
                    for i in range(len(idx))) for c in centers]
    m = np.asarray(mu, dtype=float) * ys
    D = space.dist[np.ix_(centers, idx)]
    return list(D @ m)


def support_distance_combination(space: FiniteMetricSpace, centers, sample: LabeledSample,
                                 mu, variant: str = "full", y=None,
                                 exact: bool = False,
                                 config: SolverConfig | None = None) -> tuple:
    """Support of the distance-combination class and a maximizing coefficient vector.

    ``variant="full"``: coefficients a with sum|a| <= 1; the extreme
    points are the signed single-center functions, so the value is
    max_c |sum_i mu_i y_i d(c, x_i)| and the maximizer puts +-1 on an
    achieving center.  ``"pos"`` keeps positive mass sum a+ >= 1/2,
    ``"neg"`` caps it at <= 1/2 (the closure of the strict half); both
    are solved as LPs over split coefficients.  Returns
    ``(value, coeffs)`` with coeffs indexed like ``centers``.
    """
    if variant not in ("full", "pos", "neg"):
        raise InputError("variant must be one of full, pos, neg")
    cs = _center_indices(space, centers)
    idx = _check_sample_indices(space, sample)
    ys = _pattern(sample, y)
    m = _mu_array(mu, sample.n)
    g = _signed_center_loads(space, cs, idx, mu if exact else m, ys, exact)
    k = len(cs)

    if variant == "full":
        if exact:
            best = max(range(k), key=lambda c: (abs(g[c]), -c))
            value_exact = abs(g[best])
            sign = 1 if g[best] >= 0 else -1
            coeffs = [Fraction(0)] * k
            coeffs[best] = Fraction(sign)
            return float(value_exact), coeffs, value_exact
        arr = np.abs(np.asarray(g, dtype=float))
        best = int(np.argmax(arr))
        sign = 1.0 if g[best] >= 0 else -1.0
        coeffs = np.zeros(k)
        coeffs[best] = sign
        return float(arr[best]), coeffs, None

    # pos / neg: maximize sum_c (a+_c - a-_c) g_c over split coefficients
    cfg = config or SolverConfig(arithmetic="rational" if exact else "float")
    obj = list(g) + [-v for v in g]
    A_ub = [[1] * (2 * k)]          # total mass
    b_ub = [1]
    half_row = [1] * k + [0] * k    # positive mass
    if variant == "pos":
        A_ub.append([-v for v in half_row])
        b_ub.append(Fraction(-1, 2) if exact else -0.5)
    else:
        A_ub.append(half_row)
        b_ub.append(Fraction(1, 2) if exact else 0.5)
    out = lp_solve(obj, A_ub=A_ub, b_ub=b_ub, sense="max", config=cfg)
    if not isinstance(out, LpOptimal):
        raise InputError("distance-combination support LP failed")
    coeffs = [out.x[c] - out.x[k + c] for c in range(k)]
    if exact:
        return float(out.value), coeffs, out.value
    return float(out.value), np.asarray(coeffs, dtype=float), None


def eval_distance_combination(space: FiniteMetricSpace, centers, coeffs,
                              point_indices, exact: bool = False) -> list:
    """Evaluate f = sum_c coeffs_c d(c, .) at the given points."""
    cs = _center_indices(space, centers)
    if len(coeffs) != len(cs):
        raise InputError("coefficients must match the center set")
    if exact:
        if space.dist_exact is None:
            raise InputError("exact evaluation needs exact distances")
        cf = [to_fraction(v) for v in coeffs]
        return [sum(cf[c] * space.dist_exact[cs[c]][i] for c in range(len(cs)))
                for i in point_indices]
    cf = np.asarray(coeffs, dtype=float)
    D = space.dist[np.ix_(cs, list(point_indices))]
    return list(cf @ D)


@dataclass(frozen=True)
class DistanceCombinationOracle(ConceptClassOracle):
    """l1-bounded combinations of point-distance functions, or a half.

    ``variant`` "full" is symmetric under label flips; "pos"/"neg" are
    each other's mirror and are treated as asymmetric kinds.
    """

    space: FiniteMetricSpace
    centers: tuple
    variant: str = "full"

    def __post_init__(self):
        object.__setattr__(self, "centers", _center_indices(self.space, self.centers))
        if self.variant not in ("full", "pos", "neg"):
            raise InputError("variant must be one of full, pos, neg")

    @property
    def kind(self) -> str:
        return {"full": "DistanceCombination",
                "pos": "DistanceCombinationPos",
                "neg": "DistanceCombinationNeg"}[self.variant]

    @property
    def symmetric(self) -> bool:
        return self.variant == "full"

    def support(self, sample, mu, y=None, exact: bool = False) -> SupportEval:
        ys = _pattern(sample, y)
        value, coeffs, value_exact = support_distance_combination(
            self.space, self.centers, sample, mu, variant=self.variant,
            y=ys, exact=exact)
        return SupportEval(value=value, maximizer=coeffs, value_exact=value_exact)

    def distance_rows(self, sample: LabeledSample) -> np.ndarray:
        idx = _check_sample_indices(self.space, sample)
        return self.space.dist[np.ix_(self.centers, idx)]

    def distance_rows_exact(self, sample: LabeledSample) -> list:
        idx = _check_sample_indices(self.space, sample)
        if self.space.dist_exact is None:
            raise InputError("space carries no exact distances")
        return [[self.space.dist_exact[c][i] for i in idx] for c in self.centers]

    def params_json(self) -> dict:
        return {"centers": list(self.centers), "variant": self.variant}

    def space_json(self):
        return _space_obj(self.space)


# ---------------------------------------------------------------------------
# 1-Lipschitz functions


@dataclass(frozen=True)
class LipRealizability:
    """Outcome of the 2-gamma separation test.

    ``cross_distance`` is d(S+, S-) (inf when one side is empty); the
    margin cap is half of it.  On Yes, ``extension`` describes the
    canonical realizer f(x) = (d(S-, x) - d(S+, x)) / 2; on No,
    ``pair`` holds a closest cross pair as sample positions.
    """

    realizable: bool
    cross_distance: float
    pair: tuple | None = None
    extension: str | None = None


def lip_realizable(space: FiniteMetricSpace, sample: LabeledSample,
                   gamma: float) -> LipRealizability:
    """Margin-gamma realizability by 1-Lipschitz functions: d(S+, S-) >= 2 gamma."""
    if not gamma > 0:
        raise InputError("gamma must be positive")
    idx = _check_sample_indices(space, sample)
    pos = [k for k, lab in enumerate(sample.labels) if lab > 0]
    neg = [k for k, lab in enumerate(sample.labels) if lab < 0]
    if not pos or not neg:
        return LipRealizability(True, math.inf,
                                extension="(d(S-,x) - d(S+,x)) / 2")
    best = math.inf
    pair = None
    for a in pos:
        for b in neg:
            dab = space.dist[idx[a], idx[b]]
            if dab < best:
                best = float(dab)
                pair = (a, b)
    if best >= 2.0 * gamma:
        return LipRealizability(True, best, extension="(d(S-,x) - d(S+,x)) / 2")
    return LipRealizability(False, best, pair=pair)


def lip_extension_eval(space: FiniteMetricSpace, sample: LabeledSample,
                       query: int) -> float:
    """The canonical realizer (d(S-, x) - d(S+, x)) / 2 at a space point.

    One-sided samples give infinite set-distance on the empty side, so
    the value is +-inf there; both sides empty is degenerate.
    """
    idx = _check_sample_indices(space, sample)
    if not (0 <= query < space.n):
        raise InputError("query index outside the space")
    pos = [idx[k] for k, lab in enumerate(sample.labels) if lab > 0]
    neg = [idx[k] for k, lab in enumerate(sample.labels) if lab < 0]
    if not pos and not neg:
        raise DegenerateInputError("sample has no labeled points")
    d_pos = min((float(space.dist[query, j]) for j in pos), default=math.inf)
    d_neg = min((float(space.dist[query, j]) for j in neg), default=math.inf)
    if math.isinf(d_neg) and math.isinf(d_pos):
        raise DegenerateInputError("sample has no labeled points")
    if math.isinf(d_neg):
        return math.inf
    if math.isinf(d_pos):
        return -math.inf
    return (d_neg - d_pos) / 2.0


@dataclass(frozen=True)
class LipschitzOracle(ConceptClassOracle):
    """All 1-Lipschitz functions on a finite metric space.

    The support function is infinite whenever sum mu_i y_i != 0 (constant
    shifts are free), so realizability goes through the closed-form
    separation criterion instead; support is still provided for balanced
    weights via the transport LP, mostly for property tests.
    """

    space: FiniteMetricSpace
    kind = "Lipschitz"
    symmetric = True

    def support(self, sample, mu, y=None, exact: bool = False) -> SupportEval:
        idx = _check_sample_indices(self.space, sample)
        ys = _pattern(sample, y)
        m = _mu_array(mu, sample.n)
        lam = m * ys
        if abs(float(lam.sum())) > 1e-12:
            return SupportEval(value=math.inf, maximizer=None, attained=False,
                               detail={"reason": "unbalanced weights"})
        n = sample.n
        A_ub = []
        b_ub = []
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                row = [0.0] * n
                row[a] = 1.0
                row[b] = -1.0
                A_ub.append(row)
                b_ub.append(float(self.space.dist[idx[a], idx[b]]))
        out = lp_solve(list(lam), A_ub=A_ub, b_ub=b_ub,
                       bounds=[(None, None)] * n, sense="max")
        if isinstance(out, LpUnbounded):
            return SupportEval(value=math.inf, maximizer=None, attained=False)
        if not isinstance(out, LpOptimal):
            raise InputError("Lipschitz support LP failed")
        return SupportEval(value=float(out.value),
                           maximizer=np.array(out.x_float()))

    def space_json(self):
        return _space_obj(self.space)


# ---------------------------------------------------------------------------
# ball-pair partial concepts


@dataclass(frozen=True)
class BallPairRealizability:
    realizable: bool
    center: int | None = None
    center_id: str | None = None


def ball_pair_realizable(space: FiniteMetricSpace, sample: LabeledSample,
                         params: BallPairParams) -> BallPairRealizability:
    """Search all space points for a center consistent with the sample.

    A center c fits when d(c, x) <= r on positives and d(c, x) >= R on
    negatives; the annulus between is the concept's undefined region.
    The negative test is closed so that constructions placing negatives
    exactly at distance R count as realized.  First fitting center in
    index order wins.
    """
    idx = _check_sample_indices(space, sample)
    for c in range(space.n):
        ok = True
        for k, lab in enumerate(sample.labels):
            dcx = space.dist[c, idx[k]]
            if lab > 0:
                if dcx > params.r:
                    ok = False
                    break
            elif dcx < params.R:
                ok = False
                break
        if ok:
            return BallPairRealizability(True, center=c, center_id=space.ids[c])
    return BallPairRealizability(False)


@dataclass(frozen=True)
class BallPairOracle(ConceptClassOracle):
    """Partial concepts from (r, R) ball pairs; decided by center search.

    These are nonconvex partial concepts, so there is no support
    function to speak of; calling support raises.
    """

    space: FiniteMetricSpace
    params: BallPairParams
    kind = "BallPair"
    symmetric = False

    def support(self, sample, mu, y=None, exact: bool = False) -> SupportEval:
        raise InputError("ball-pair concepts are partial and nonconvex; "
                         "realizability is decided by direct center search")

    def params_json(self) -> dict:
        return {"r": self.params.r, "R": self.params.R}

    def space_json(self):
        return _space_obj(self.space)


# ---------------------------------------------------------------------------
# coordinate-threshold classes


@dataclass(frozen=True)
class PhiRealizability:
    realizable: bool
    violating_point: int | None = None


def phi_realizable(spec: PhiSpec, sample: LabeledSample, gamma) -> PhiRealizability:
    """Yes iff phi(gamma) >= x_i for every sample point; labels are irrelevant.

    Coordinates are independent and the class is symmetric per
    coordinate, so a margin-gamma realization exists exactly when every
    point's threshold admits gamma.  No reports the largest offender.
    """
    if sample.indices is None:
        raise InputError("coordinate-class samples use integer points")
    for x in sample.indices:
        if not (1 <= x <= spec.N):
            raise InputError(f"point {x} outside the domain 1..{spec.N}")
    cap = spec.phi(gamma)
    bad = [x for x in sample.indices if x > cap]
    if bad:
        return PhiRealizability(False, violating_point=max(bad))
    return PhiRealizability(True)


@dataclass(frozen=True)
class PhiOracle(ConceptClassOracle):
    """Product class: |f(n)| may not exceed the threshold phi admits at n.

    The supremum over the open confidence intervals is not attained;
    support reports the limit value with attained=False.
    """

    spec: PhiSpec
    kind = "Phi"
    symmetric = True

    def support(self, sample, mu, y=None, exact: bool = False) -> SupportEval:
        if sample.indices is None:
            raise InputError("coordinate-class samples use integer points")
        ys = _pattern(sample, y)
        m = _mu_array(mu, sample.n)
        caps = np.array([self.spec.threshold(x) for x in sample.indices])
        value = float(m @ caps)
        profile = ys * caps
        return SupportEval(value=value, maximizer=profile, attained=False)

    def params_json(self) -> dict:
        out = {"preset": self.spec.preset, "N": self.spec.N}
        if self.spec.k is not None:
            out["k"] = self.spec.k
        return out


# ---------------------------------------------------------------------------
# explicit function polytopes


@dataclass(frozen=True)
class FunctionPolytopeOracle(ConceptClassOracle):
    """conv{v_1..v_K} of explicit functions on a finite domain.

    ``vertices`` is a (K, m) matrix, one function per row.  Rational
    entries are preserved exactly in ``vertices_exact`` when the input
    carries no floats, enabling exact-arithmetic certification.
    """

    vertices: np.ndarray
    vertices_exact: tuple | None = None
    kind = "FunctionPolytope"
    symmetric = False

    def __post_init__(self):
        raw = self.vertices
        exact = self.vertices_exact
        if exact is None and not isinstance(raw, np.ndarray):
            rows = [list(row) for row in raw]
            if rows and not any(isinstance(v, float) for row in rows for v in row):
                try:
                    exact = tuple(tuple(to_fraction(v) for v in row)
                                  for row in rows)
                except (InputError, TypeError, ValueError):
                    exact = None
            raw = rows
        if exact is not None:
            exact = tuple(tuple(to_fraction(v) for v in row) for row in exact)
            arr = np.array([[float(v) for v in row] for row in exact], dtype=float)
        else:
            arr = np.array(np.asarray(raw, dtype=float), dtype=float)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise InputError("vertex matrix must be 2-d and nonempty")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)
        object.__setattr__(self, "vertices_exact", exact)

    @property
    def domain_size(self) -> int:
        return self.vertices.shape[1]

    def support(self, sample, mu, y=None, exact: bool = False) -> SupportEval:
        if sample.indices is None:
            raise InputError("function-polytope samples use domain indices")
        for i in sample.indices:
            if not (0 <= i < self.domain_size):
                raise InputError(f"point {i} outside the domain")
        ys = _pattern(sample, y)
        m = _mu_array(mu, sample.n)
        if exact:
            if self.vertices_exact is None:
                raise InputError("oracle carries no exact vertex data")
            mu_e = [to_fraction(v) for v in mu]
            vals = [sum(mu_e[i] * int(ys[i]) * self.vertices_exact[k][sample.indices[i]]
                        for i in range(sample.n))
                    for k in range(self.vertices.shape[0])]
            best = max(range(len(vals)), key=lambda k: (vals[k], -k))
            return SupportEval(value=float(vals[best]),
                               maximizer=self.vertices_exact[best],
                               value_exact=vals[best],
                               detail={"vertex": best})
        cols = self.vertices[:, list(sample.indices)]
        scores = cols @ (m * ys)
        best = int(np.argmax(scores))
        return SupportEval(value=float(scores[best]), maximizer=self.vertices[best],
                           detail={"vertex": best})

    def vertex_rows(self, sample: LabeledSample) -> np.ndarray:
        return self.vertices[:, list(sample.indices)]

    def vertex_rows_exact(self, sample: LabeledSample) -> list:
        if self.vertices_exact is None:
            raise InputError("oracle carries no exact vertex data")
        return [[row[i] for i in sample.indices] for row in self.vertices_exact]

    def params_json(self) -> dict:
        if self.vertices_exact is not None:
            rows = [[str(v) for v in row] for row in self.vertices_exact]
        else:
            rows = [list(map(float, row)) for row in self.vertices]
        return {"vertices": rows}


# ---------------------------------------------------------------------------
# JSON round-trip


def _space_obj(space: FiniteMetricSpace) -> dict:
    if space.dist_exact is not None:
        dist = [[str(x) if x.denominator != 1 else int(x) for x in row]
                for row in space.dist_exact]
    else:
        dist = [list(map(float, row)) for row in space.dist]
    return {"ids": list(space.ids), "dist": dist}


def oracle_to_json(oracle: ConceptClassOracle) -> dict:
    obj = {"kind": oracle.kind, "params": oracle.params_json()}
    sp = oracle.space_json()
    if sp is not None:
        obj["space"] = sp
    return obj


def oracle_from_json(obj: dict) -> ConceptClassOracle:
    kind = obj.get("kind")
    params = obj.get("params", {})
    if kind == "DualBall":
        p = params.get("p", 2)
        return DualBallOracle(NormSpec(math.inf if p == "inf" else float(p)))
    if kind in ("DistanceCombination", "DistanceCombinationPos",
                "DistanceCombinationNeg"):
        from .spaces import load_metric_space
        entries = [x for row in obj["space"]["dist"] for x in row]
        wants_exact = bool(entries) and all(
            isinstance(x, (str, int)) and not isinstance(x, bool)
            for x in entries)
        space = load_metric_space(obj["space"], exact=wants_exact)
        variant = {"DistanceCombination": "full",
                   "DistanceCombinationPos": "pos",
                   "DistanceCombinationNeg": "neg"}[kind]
        return DistanceCombinationOracle(space, tuple(params["centers"]), variant)
    if kind == "Lipschitz":
        from .spaces import load_metric_space
        return LipschitzOracle(load_metric_space(obj["space"]))
    if kind == "BallPair":
        from .spaces import load_metric_space
        return BallPairOracle(load_metric_space(obj["space"]),
                              BallPairParams(params["r"], params["R"]))
    if kind == "Phi":
        return PhiOracle(PhiSpec(params["preset"], params["N"], params.get("k")))
    if kind == "FunctionPolytope":
        return FunctionPolytopeOracle(params["vertices"])
    raise InputError(f"unknown concept-class kind {kind!r}")
