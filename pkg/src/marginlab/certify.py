"""Margin decisions with re-checkable certificates.

Every verdict here carries evidence a skeptical caller can re-evaluate
without trusting the solver: a Realized answer names a concrete function
(a dual functional, a coefficient vector over centers, a vertex mixture,
an extension, a center) whose per-point margins meet the target; a
NotRealized answer names simplex weights whose support value sits below
it.  Shattering reduces to one realizability decision per sign pattern,
dimension search to shattering over subsets, and the Lipschitz dimension
to a packing computation.

Decisions use a three-way band in float mode: values within 3 * tol of
gamma come back Marginal rather than guessed.  Rational mode and the
closed-form classes (Lipschitz separation, ball-pair center search,
coordinate thresholds) decide exactly and never report Marginal; the
realizability convention at the boundary is closed (margin >= gamma
counts).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classes import (
    BallPairOracle,
    ConceptClassOracle,
    DistanceCombinationOracle,
    DualBallOracle,
    FunctionPolytopeOracle,
    LabeledSample,
    LipschitzOracle,
    PhiOracle,
    ball_pair_realizable,
    check_unit_ball,
    eval_distance_combination,
    lip_extension_eval,
    lip_realizable,
    phi_realizable,
)
from .errors import InputError, SolverFailure
from .exact import Exact, to_fraction
from .solver import (
    DEFAULT_CONFIG,
    LpInfeasible,
    LpOptimal,
    SolverConfig,
    as_signed_weights,
    fold_signs,
    lp_solve,
    min_norm_point,
)
from .spaces import FiniteMetricSpace, NormSpec, as_points, norm, norm_exact

log = logging.getLogger(__name__)

__all__ = [
    "CollapseCertificate",
    "RealizeVerdict",
    "ShatterCounterexample",
    "ShatterVerdict",
    "CubeCheck",
    "SubsetSearchResult",
    "DimensionReport",
    "AuditRow",
    "pattern_from_code",
    "realize",
    "is_shattered",
    "verify_collapse",
    "collapse_support",
    "witness_margins",
    "check_witness",
    "check_cube_condition",
    "cube_vertices_contained",
    "min_signed_support",
    "max_shattered_subset",
    "packing_number",
    "audit_submultiplicativity",
    "fit_rate",
    "sample_complexity_estimate",
]

_LINEAR_KINDS = ("DistanceCombination", "DistanceCombinationPos",
                 "DistanceCombinationNeg", "FunctionPolytope")
_CLOSED_FORM_KINDS = ("Lipschitz", "BallPair", "Phi")


# ---------------------------------------------------------------------------
# verdict types


def _jnum(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Exact):
        return {"coef": str(x.coef), "rad": str(x.rad)}
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jnum(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jnum(v) for k, v in x.items()}
    return str(x)


@dataclass(frozen=True)
class CollapseCertificate:
    """Simplex weights whose support value certifies non-realizability."""

    mu: tuple
    value: float
    value_exact: object = None

    def to_json(self) -> dict:
        return {"mu": _jnum(self.mu), "value": self.value,
                "value_exact": _jnum(self.value_exact)}


@dataclass(frozen=True)
class RealizeVerdict:
    """Outcome of one labeled-sample margin decision.

    ``value`` estimates m* = min over simplex weights of the support
    value (the best achievable min-margin).  It equals m* up to solver
    tolerance whenever the solve ran to convergence; iterative dual-ball
    solves may stop early once a functional already certifies the
    margin, in which case ``value`` is only an upper bound on m* and
    ``detail`` brackets m* with ``lower``/``upper``.  The witness
    re-evaluates to margins >= gamma on every sample point, the collapse
    to a support value below it.  ``band`` is the Marginal half-width
    that was in force (0 on exact paths).
    """

    status: str
    gamma: float
    band: float
    value: float | None
    witness: dict | None = None
    collapse: CollapseCertificate | None = None
    value_exact: object = None
    detail: dict | None = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "gamma": self.gamma,
            "band": self.band,
            "value": self.value,
            "value_exact": _jnum(self.value_exact),
            "witness": _jnum(self.witness),
            "collapse": self.collapse.to_json() if self.collapse else None,
            "detail": _jnum(self.detail),
        }


@dataclass(frozen=True)
class ShatterCounterexample:
    """A sign pattern no class member gamma-realizes, with signed weights
    lambda_i = y_i mu_i whose combination stays below gamma."""

    pattern: tuple
    lam: tuple | None
    value: float | None
    value_exact: object = None

    def to_json(self) -> dict:
        return {"pattern": list(self.pattern), "lambda": _jnum(self.lam),
                "value": self.value, "value_exact": _jnum(self.value_exact)}


@dataclass(frozen=True)
class ShatterVerdict:
    status: str
    gamma: float
    band: float
    n: int
    patterns_checked: int
    witnesses: dict | None = None
    counterexample: ShatterCounterexample | None = None
    marginal_patterns: tuple = ()

    def to_json(self, include_witnesses: bool = True) -> dict:
        out = {
            "status": self.status,
            "gamma": self.gamma,
            "band": self.band,
            "n": self.n,
            "patterns_checked": self.patterns_checked,
            "counterexample": (self.counterexample.to_json()
                               if self.counterexample else None),
            "marginal_patterns": [list(p) for p in self.marginal_patterns],
        }
        if include_witnesses and self.witnesses is not None:
            out["witnesses"] = [{"pattern": list(p), "witness": _jnum(w)}
                                for p, w in self.witnesses.items()]
        return out


@dataclass(frozen=True)
class CubeCheck:
    feasible: bool
    witness: dict | None = None
    detail: dict | None = None

    def to_json(self) -> dict:
        return {"feasible": self.feasible, "witness": _jnum(self.witness),
                "detail": _jnum(self.detail)}


@dataclass(frozen=True)
class SubsetSearchResult:
    """Largest shattered subset found, with the frontier evidence.

    ``exact`` is True when the search ran to completion with no Marginal
    leaves, making ``size`` the true maximum rather than a lower bound.
    ``certificates`` maps each tested non-shattered frontier subset to
    its counterexample.
    """

    size: int
    subset: tuple
    certificates: dict
    exact: bool
    nodes: int
    best_verdict: ShatterVerdict | None = None
    note: str = ""

    def to_json(self, include_witnesses: bool = False) -> dict:
        return {
            "size": self.size,
            "subset": list(self.subset),
            "exact": self.exact,
            "nodes": self.nodes,
            "note": self.note,
            "certificates": {",".join(map(str, k)): v.to_json()
                             for k, v in self.certificates.items()},
            "best_verdict": (self.best_verdict.to_json(include_witnesses)
                             if self.best_verdict else None),
        }


_DIM_STATUSES = ("exact", "lower", "upper")


@dataclass(frozen=True)
class DimensionReport:
    """Dimension profile over a margin grid.

    Each entry carries a status flag: ``exact`` (certified two-sided),
    ``lower`` (construction only), or ``upper``.  Exact entries must be
    nonincreasing in gamma; bounded entries are exempt from the check
    since a weak bound can dip.
    """

    gammas: tuple
    dims: tuple
    statuses: tuple
    exponent: float | None = None
    residual: float | None = None

    def __post_init__(self):
        gs = tuple(self.gammas)
        ds = tuple(int(d) for d in self.dims)
        st = tuple(self.statuses)
        if not (len(gs) == len(ds) == len(st)) or not gs:
            raise InputError("gammas, dims, statuses must align and be nonempty")
        if any(not (0 < float(g)) for g in gs):
            raise InputError("margins must be positive")
        if any(d < 0 for d in ds):
            raise InputError("dimensions must be nonnegative")
        if any(s not in _DIM_STATUSES for s in st):
            raise InputError(f"statuses must be from {_DIM_STATUSES}")
        ex = [(float(g), d) for g, d, s in zip(gs, ds, st) if s == "exact"]
        ex.sort()
        for (g1, d1), (g2, d2) in zip(ex, ex[1:]):
            if g1 < g2 and d1 < d2:
                raise InputError(
                    f"exact dims must be nonincreasing in gamma: "
                    f"dim({g1})={d1} < dim({g2})={d2}")
        object.__setattr__(self, "gammas", gs)
        object.__setattr__(self, "dims", ds)
        object.__setattr__(self, "statuses", st)

    def fitted(self, statuses=None) -> "DimensionReport":
        p_hat, resid = fit_rate(self, statuses=statuses)
        return DimensionReport(self.gammas, self.dims, self.statuses,
                               exponent=p_hat, residual=resid)

    def to_json(self) -> dict:
        return {
            "gammas": [float(g) for g in self.gammas],
            "dims": list(self.dims),
            "statuses": list(self.statuses),
            "exponent": self.exponent,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class AuditRow:
    gamma1: object
    gamma2: object
    lhs: float
    rhs: float
    passed: bool

    def to_json(self) -> dict:
        return {"gamma1": float(self.gamma1), "gamma2": float(self.gamma2),
                "lhs": self.lhs, "rhs": self.rhs, "passed": self.passed}


# ---------------------------------------------------------------------------
# point containers and pattern order


@dataclass(frozen=True)
class _Ground:
    """Unlabeled points in whichever form the oracle consumes."""

    vectors: np.ndarray | None
    vectors_exact: tuple | None
    indices: tuple | None
    n: int

    def sample(self, labels, sel=None) -> LabeledSample:
        if self.vectors is not None:
            if sel is None:
                return LabeledSample(labels=tuple(labels), vectors=self.vectors,
                                     vectors_exact=self.vectors_exact)
            vec = self.vectors[list(sel)]
            ex = (tuple(self.vectors_exact[i] for i in sel)
                  if self.vectors_exact is not None else None)
            return LabeledSample(labels=tuple(labels), vectors=vec,
                                 vectors_exact=ex)
        idx = self.indices if sel is None else tuple(self.indices[i] for i in sel)
        return LabeledSample(labels=tuple(labels), indices=idx)


def _ground_points(oracle: ConceptClassOracle, points, points_exact=None) -> _Ground:
    if isinstance(points, LabeledSample):
        return _Ground(points.vectors, points.vectors_exact, points.indices,
                       points.n)
    if oracle.kind == "DualBall":
        ex = None
        if points_exact is not None:
            ex = tuple(tuple(to_fraction(v) for v in row) for row in points_exact)
        elif not isinstance(points, np.ndarray):
            rows = [list(r) for r in points]
            if rows and not any(isinstance(v, float) for r in rows for v in r):
                try:
                    ex = tuple(tuple(to_fraction(v) for v in r) for r in rows)
                except (InputError, TypeError, ValueError):
                    ex = None
        if ex is not None:
            vecs = as_points([[float(v) for v in row] for row in ex])
        else:
            vecs = as_points(points)
        return _Ground(vecs, ex, None, vecs.shape[0])
    idx = tuple(int(i) for i in points)
    if not idx:
        raise InputError("point set must be nonempty")
    return _Ground(None, None, idx, len(idx))


def pattern_from_code(code: int, n: int, fix_first: bool = False) -> tuple:
    """Sign pattern number ``code`` in binary-counter order.

    Position 0 is the most significant bit; bit 0 maps to +1, so the
    all-plus pattern comes first.  With ``fix_first`` the leading sign
    is pinned to +1 and the counter runs over the remaining positions,
    which enumerates patterns up to global flip.
    """
    bits = n - 1 if fix_first else n
    if not (0 <= code < (1 << bits)):
        raise InputError("pattern code out of range")
    vals = [1] if fix_first else []
    for k in range(bits):
        vals.append(-1 if (code >> (bits - 1 - k)) & 1 else 1)
    return tuple(vals)


# ---------------------------------------------------------------------------
# realizability


def realize(oracle: ConceptClassOracle, sample: LabeledSample, gamma,
            cfg: SolverConfig | None = None) -> RealizeVerdict:
    """Decide whether some class member attains margin gamma on the sample.

    Computes m* = min over simplex weights mu of the support value and
    compares it against gamma: the minimax identity makes m* the best
    achievable min-margin, so a witness exists exactly when m* >= gamma.
    Dual-ball classes go through minimum-norm-point solvers, the
    piecewise-linear classes through a pair of small LPs (one for the
    collapse side, one for the witness side), and Lipschitz / ball-pair /
    coordinate-threshold classes through their closed forms, which decide
    exactly.
    """
    cfg = cfg or DEFAULT_CONFIG
    g = float(gamma)
    if not g > 0:
        raise InputError("gamma must be positive")
    kind = oracle.kind
    if kind == "DualBall":
        if cfg.rational:
            return _realize_dual_ball_exact(oracle, sample, gamma, cfg)
        return _realize_dual_ball(oracle, sample, g, cfg)
    if kind in _LINEAR_KINDS:
        return _realize_linear(oracle, sample, gamma, cfg)
    if kind == "Lipschitz":
        return _realize_lipschitz(oracle, sample, g)
    if kind == "BallPair":
        return _realize_ball_pair(oracle, sample, g)
    if kind == "Phi":
        return _realize_phi(oracle, sample, gamma)
    raise InputError(f"no realizability procedure for kind {kind!r}")


def _unit_mass(mu) -> tuple:
    """Clip and rescale float weights to exact mass 1.

    Iterative solvers and LP backends return simplex weights only up to
    their own feasibility tolerance; certificates must carry mass-1
    weights or the strict re-verifier rejects them.  Support values are
    positively homogeneous in the weights, so rescaling is sound.
    """
    arr = np.maximum(np.asarray(mu, dtype=float), 0.0)
    total = float(arr.sum())
    if total < 0.5:
        raise SolverFailure("degenerate collapse weights from the solver")
    return tuple(float(v) for v in arr / total)


def _realize_dual_ball(oracle: DualBallOracle, sample: LabeledSample,
                       g: float, cfg: SolverConfig) -> RealizeVerdict:
    if sample.vectors is None:
        raise InputError("dual-ball realizability needs a vector sample")
    check_unit_ball(sample.vectors, oracle.space)
    band = cfg.band
    ys = sample.y()
    signed = ys[:, None] * sample.vectors
    res = min_norm_point(signed, oracle.space, cfg, stop_margin=g + band)
    ub = res.value
    lb = res.value - res.gap
    detail = {"method": res.method, "iterations": res.iterations,
              "upper": ub, "lower": lb}
    if res.witness is not None and lb >= g + band:
        margins = signed @ res.witness
        witness = {"type": "functional",
                   "w": [float(v) for v in res.witness],
                   "margins": [float(v) for v in margins]}
        return RealizeVerdict("Realized", g, band, ub, witness=witness,
                              detail=detail)
    collapse = CollapseCertificate(mu=_unit_mass(res.mu), value=ub)
    if ub <= g - band:
        return RealizeVerdict("NotRealized", g, band, ub, collapse=collapse,
                              detail=detail)
    witness = None
    if res.witness is not None:
        margins = signed @ res.witness
        witness = {"type": "functional",
                   "w": [float(v) for v in res.witness],
                   "margins": [float(v) for v in margins]}
    return RealizeVerdict("Marginal", g, band, ub, witness=witness,
                          collapse=collapse, detail=detail)


def _dual_norm_le_one(w, dual_spec: NormSpec) -> bool:
    q = dual_spec.p
    if math.isinf(q):
        return max(abs(v) for v in w) <= 1
    if q == 1:
        return sum(abs(v) for v in w) <= 1
    if q == 2:
        return sum(v * v for v in w) <= 1
    raise InputError("exact dual-norm check needs q in {1, 2, inf}")


def _rationalize(values, den: int = 10**9) -> list:
    return [Fraction(float(v)).limit_denominator(den) for v in values]


def _realize_dual_ball_exact(oracle: DualBallOracle, sample: LabeledSample,
                             gamma, cfg: SolverConfig) -> RealizeVerdict:
    """Rational-mode dual-ball decision: reconstruct, verify, escalate.

    A float solve is cheap and usually lands on a witness or collapse
    whose entries snap to small rationals; exact verification of the
    snapped certificate settles the verdict without exact optimization.
    Only when neither side verifies does the exact solver run.
    """
    if sample.vectors_exact is None:
        raise InputError("rational mode needs exact sample coordinates")
    p = oracle.space.p
    if p not in (1, 2) and not math.isinf(p):
        raise InputError("rational mode supports p in {1, 2, inf} only")
    g = gamma if isinstance(gamma, Exact) else to_fraction(gamma)
    if not g > 0:
        raise InputError("gamma must be positive")
    g_sq = g.square() if isinstance(g, Exact) else g * g
    g_val = g if isinstance(g, Exact) else Exact.rational(g)
    gf = float(g)
    check_unit_ball(sample.vectors, oracle.space)
    n, d = sample.n, len(sample.vectors_exact[0])
    ys = [int(v) for v in sample.labels]
    rows = [tuple(ys[i] * x for x in sample.vectors_exact[i]) for i in range(n)]
    dual_spec = oracle.space.dual()

    def margins_of(w) -> list:
        return [sum(w[t] * rows[i][t] for t in range(d)) for i in range(n)]

    def realized(w, margins, value, value_exact, how) -> RealizeVerdict:
        witness = {"type": "functional",
                   "w": [float(v) for v in w],
                   "w_exact": {"vec": list(w), "scale": Fraction(1)},
                   "margins": [float(m) for m in margins],
                   "margins_exact": list(margins)}
        return RealizeVerdict("Realized", gf, 0.0, value, witness=witness,
                              value_exact=value_exact, detail={"method": how})

    # step 0: the norming functional of the uniform combination, exact by
    # structure; it is the optimum for the symmetric instances that
    # dominate pattern enumeration
    v0 = [sum(rows[i][t] for i in range(n)) / n for t in range(d)]
    if any(v0):
        w0 = m0 = None
        if p == 1:
            w0 = [Fraction(1 if t > 0 else (-1 if t < 0 else 0)) for t in v0]
        elif math.isinf(p):
            j = max(range(d), key=lambda t: (abs(v0[t]), -t))
            w0 = [Fraction(0)] * d
            w0[j] = Fraction(1 if v0[j] > 0 else -1)
        else:
            # p = 2: compare squared margins against gamma^2 |v0|^2 to keep
            # the square root out of the arithmetic
            vsq0 = sum(t * t for t in v0)
            raw = margins_of(v0)
            if all(r > 0 and r * r >= g_sq * vsq0 for r in raw):
                scale = Exact.sqrt(Fraction(1) / vsq0)
                margins = [r * scale for r in raw]
                lo = min(margins)
                witness = {"type": "functional",
                           "w": [float(t) * float(scale) for t in v0],
                           "w_exact": {"vec": list(v0), "scale": scale},
                           "margins": [float(m) for m in margins],
                           "margins_exact": list(margins)}
                return RealizeVerdict("Realized", gf, 0.0, float(lo),
                                      witness=witness, value_exact=lo,
                                      detail={"method": "uniform-map"})
        if w0 is not None:
            m0 = margins_of(w0)
            if min(m0) >= g:
                return realized(w0, m0, float(min(m0)), min(m0), "uniform-map")

    float_cfg = SolverConfig(tol=min(cfg.tol, 1e-9), max_iter=cfg.max_iter,
                             arithmetic="float")
    res = None
    try:
        res = min_norm_point(sample.y()[:, None] * sample.vectors,
                             oracle.space, float_cfg)
    except SolverFailure:
        pass

    if res is not None and res.witness is not None:
        w1 = _rationalize(res.witness)
        if _dual_norm_le_one(w1, dual_spec):
            m1 = margins_of(w1)
            if min(m1) >= g:
                return realized(w1, m1, float(min(m1)), min(m1), "snap-witness")
    if res is not None:
        mu1 = [max(f, Fraction(0)) for f in _rationalize(res.mu)]
        tot = sum(mu1)
        if tot > 0:
            mu1 = [v / tot for v in mu1]
            v1 = [sum(mu1[i] * rows[i][t] for i in range(n)) for t in range(d)]
            val = norm_exact(v1, oracle.space)
            if val < g_val:
                collapse = CollapseCertificate(mu=tuple(mu1), value=float(val),
                                               value_exact=val)
                return RealizeVerdict("NotRealized", gf, 0.0, float(val),
                                      collapse=collapse, value_exact=val,
                                      detail={"method": "snap-collapse"})

    # escalate: exact minimum-norm point
    res_x = min_norm_point(rows, oracle.space, cfg)
    vsq = res_x.value_sq_exact
    if vsq >= g_sq:
        vec, scale = res_x.witness_exact
        margins = [sum(to_fraction(vec[t]) * rows[i][t] for t in range(d)) * scale
                   for i in range(n)]
        witness = {"type": "functional",
                   "w": [float(v) for v in res_x.witness],
                   "w_exact": {"vec": [to_fraction(v) for v in vec],
                               "scale": scale},
                   "margins": [float(m) for m in margins],
                   "margins_exact": list(margins)}
        return RealizeVerdict("Realized", gf, 0.0, res_x.value, witness=witness,
                              value_exact=Exact.sqrt(vsq),
                              detail={"method": res_x.method})
    collapse = CollapseCertificate(mu=tuple(res_x.mu_exact), value=res_x.value,
                                   value_exact=Exact.sqrt(vsq))
    return RealizeVerdict("NotRealized", gf, 0.0, res_x.value, collapse=collapse,
                          value_exact=Exact.sqrt(vsq),
                          detail={"method": res_x.method})


def _dc_rows(oracle: DistanceCombinationOracle, sample: LabeledSample,
             exact: bool):
    """Signed distance rows D_y[c][i] = y_i d(centers[c], x_i)."""
    if exact:
        D = oracle.distance_rows_exact(sample)
        return [[sample.labels[i] * D[c][i] for i in range(sample.n)]
                for c in range(len(oracle.centers))]
    D = oracle.distance_rows(sample)
    return list(D * sample.y()[None, :])


def _lp_opt(out, what: str) -> LpOptimal:
    if not isinstance(out, LpOptimal):
        raise SolverFailure(f"{what} LP did not reach an optimum: "
                            f"{type(out).__name__}")
    return out


def _realize_linear(oracle, sample: LabeledSample, gamma,
                    cfg: SolverConfig) -> RealizeVerdict:
    """Piecewise-linear classes: one LP per side of the minimax identity.

    The collapse LP minimizes the support value over simplex weights; the
    witness LP maximizes the min-margin over the class polytope.  Both
    optima equal m*, and reading each primal solution directly avoids
    any dependence on dual-sign conventions.
    """
    exact = cfg.rational
    kind = oracle.kind
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    half = Fraction(1, 2) if exact else 0.5
    n = sample.n

    if kind == "FunctionPolytope":
        if exact:
            V = oracle.vertex_rows_exact(sample)
            G = [[sample.labels[i] * V[k][i] for i in range(n)]
                 for k in range(len(V))]
        else:
            G = list(oracle.vertex_rows(sample) * sample.y()[None, :])
    elif kind == "DistanceCombination":
        Dy = _dc_rows(oracle, sample, exact)
        G = [list(row) for row in Dy] + [[-v for v in row] for row in Dy]
    else:
        Dy = _dc_rows(oracle, sample, exact)
        G = None

    if G is not None:
        K = len(G)
        # collapse: min t  s.t.  (G mu)_v <= t,  mu in the simplex
        out_c = _lp_opt(lp_solve(
            [zero] * n + [one],
            A_ub=[list(G[v]) + [-one] for v in range(K)],
            b_ub=[zero] * K,
            A_eq=[[one] * n + [zero]], b_eq=[one],
            bounds=[(0, None)] * n + [(None, None)],
            sense="min", config=cfg), "support-collapse")
        mu_star = tuple(out_c.x[:n])
        v_c = out_c.value
        # witness: max m  s.t.  (G^T alpha)_i >= m,  alpha in the simplex
        out_w = _lp_opt(lp_solve(
            [zero] * K + [one],
            A_ub=[[-G[v][i] for v in range(K)] + [one] for i in range(n)],
            b_ub=[zero] * n,
            A_eq=[[one] * K + [zero]], b_eq=[one],
            bounds=[(0, None)] * K + [(None, None)],
            sense="max", config=cfg), "support-witness")
        alpha = list(out_w.x[:K])
        v_w = out_w.value
        margins = [sum(alpha[v] * G[v][i] for v in range(K)) for i in range(n)]
        if kind == "FunctionPolytope":
            if exact:
                dom = oracle.vertices_exact
                values = [sum(alpha[v] * dom[v][j] for v in range(K))
                          for j in range(oracle.domain_size)]
            else:
                values = list(np.asarray(alpha, dtype=float) @ oracle.vertices)
            witness = {"type": "mixture", "alpha": alpha, "values": values}
        else:
            k = len(oracle.centers)
            coeffs = [alpha[c] - alpha[k + c] for c in range(k)]
            witness = {"type": "coeffs", "variant": oracle.variant,
                       "centers": list(oracle.centers), "coeffs": coeffs}
    else:
        # pos / neg: the inner maximization over coefficients dualizes to
        # two variables (mass price u, half-mass price w), giving 2k rows
        k = len(Dy)
        sgn_obj = -half if kind == "DistanceCombinationPos" else half
        tail = one if kind == "DistanceCombinationPos" else -one
        A_ub = ([list(Dy[c]) + [-one, tail] for c in range(k)]
                + [[-v for v in Dy[c]] + [-one, zero] for c in range(k)])
        out_c = _lp_opt(lp_solve(
            [zero] * n + [one, sgn_obj],
            A_ub=A_ub, b_ub=[zero] * (2 * k),
            A_eq=[[one] * n + [zero, zero]], b_eq=[one],
            bounds=[(0, None)] * (n + 2),
            sense="min", config=cfg), "support-collapse")
        mu_star = tuple(out_c.x[:n])
        v_c = out_c.value
        # witness: max m over split coefficients in the variant polytope
        rows = [[-Dy[c][i] for c in range(k)] + [Dy[c][i] for c in range(k)]
                + [one] for i in range(n)]
        b_rows = [zero] * n
        rows.append([one] * (2 * k) + [zero])
        b_rows.append(one)
        if kind == "DistanceCombinationPos":
            rows.append([-one] * k + [zero] * k + [zero])
            b_rows.append(-half)
        else:
            rows.append([one] * k + [zero] * k + [zero])
            b_rows.append(half)
        out_w = _lp_opt(lp_solve(
            [zero] * (2 * k) + [one],
            A_ub=rows, b_ub=b_rows,
            bounds=[(0, None)] * (2 * k) + [(None, None)],
            sense="max", config=cfg), "support-witness")
        v_w = out_w.value
        coeffs = [out_w.x[c] - out_w.x[k + c] for c in range(k)]
        Dy_cols = Dy
        margins = [sum(coeffs[c] * Dy_cols[c][i] for c in range(k))
                   for i in range(n)]
        witness = {"type": "coeffs", "variant": oracle.variant,
                   "centers": list(oracle.centers), "coeffs": coeffs}

    if exact:
        if v_c != v_w:
            raise SolverFailure("minimax LP pair disagrees in exact mode")
        g = to_fraction(gamma)
        value_f = float(v_c)
        collapse = CollapseCertificate(mu=mu_star, value=value_f,
                                       value_exact=v_c)
        if v_c >= g:
            witness["margins"] = [float(m) for m in margins]
            witness["margins_exact"] = list(margins)
            return RealizeVerdict("Realized", float(g), 0.0, value_f,
                                  witness=witness, value_exact=v_c)
        return RealizeVerdict("NotRealized", float(g), 0.0, value_f,
                              collapse=collapse, value_exact=v_c)

    v_cf, v_wf = float(v_c), float(v_w)
    if abs(v_cf - v_wf) > 1e-6 * (1.0 + abs(v_cf)):
        raise SolverFailure(
            f"minimax LP pair disagrees: {v_cf} vs {v_wf}")
    g = float(gamma)
    band = cfg.band
    witness["margins"] = [float(m) for m in margins]
    collapse = CollapseCertificate(mu=_unit_mass(mu_star), value=v_cf)
    if min(float(m) for m in margins) >= g + band and v_wf >= g + band:
        return RealizeVerdict("Realized", g, band, v_cf, witness=witness)
    if v_cf <= g - band:
        return RealizeVerdict("NotRealized", g, band, v_cf, collapse=collapse)
    return RealizeVerdict("Marginal", g, band, v_cf, witness=witness,
                          collapse=collapse)


def _realize_lipschitz(oracle: LipschitzOracle, sample: LabeledSample,
                       g: float) -> RealizeVerdict:
    lr = lip_realizable(oracle.space, sample, g)
    value = lr.cross_distance / 2.0 if math.isfinite(lr.cross_distance) else math.inf
    if lr.realizable:
        if math.isfinite(lr.cross_distance):
            values = [lip_extension_eval(oracle.space, sample,
                                         sample.indices[i])
                      for i in range(sample.n)]
            desc = lr.extension
        else:
            # one-sided sample: a constant function already has margin g
            values = [sample.labels[0] * g] * sample.n
            desc = "constant"
        witness = {"type": "extension", "description": desc,
                   "values": values,
                   "margins": [sample.labels[i] * values[i]
                               for i in range(sample.n)]}
        return RealizeVerdict("Realized", g, 0.0, value, witness=witness,
                              detail={"cross_distance": lr.cross_distance})
    mu = [0.0] * sample.n
    mu[lr.pair[0]] = 0.5
    mu[lr.pair[1]] = 0.5
    collapse = CollapseCertificate(mu=tuple(mu), value=value)
    return RealizeVerdict("NotRealized", g, 0.0, value, collapse=collapse,
                          detail={"cross_distance": lr.cross_distance,
                                  "pair": lr.pair})


def _realize_ball_pair(oracle: BallPairOracle, sample: LabeledSample,
                       g: float) -> RealizeVerdict:
    if g > 1:
        # members take values in {-1, +1, undefined}; margins never exceed 1
        return RealizeVerdict("NotRealized", g, 0.0, 1.0,
                              detail={"reason": "margin cap is 1"})
    res = ball_pair_realizable(oracle.space, sample, oracle.params)
    if res.realizable:
        witness = {"type": "center", "index": res.center, "id": res.center_id,
                   "r": oracle.params.r, "R": oracle.params.R}
        return RealizeVerdict("Realized", g, 0.0, 1.0, witness=witness)
    # partial concepts are not convex, so there is no collapse vector;
    # the failing labeling itself is the certificate
    return RealizeVerdict("NotRealized", g, 0.0, 0.0,
                          detail={"reason": "no admissible center"})


def _realize_phi(oracle: PhiOracle, sample: LabeledSample, gamma) -> RealizeVerdict:
    g = float(gamma)
    res = phi_realizable(oracle.spec, sample, gamma)
    caps = [oracle.spec.threshold(x) for x in sample.indices]
    value = min(caps)
    if res.realizable:
        witness = {"type": "profile",
                   "points": list(sample.indices),
                   "values": [lab * g for lab in sample.labels],
                   "margins": [g] * sample.n}
        return RealizeVerdict("Realized", g, 0.0, value, witness=witness)
    pos = sample.indices.index(res.violating_point)
    mu = [0.0] * sample.n
    mu[pos] = 1.0
    collapse = CollapseCertificate(mu=tuple(mu), value=caps[pos])
    return RealizeVerdict("NotRealized", g, 0.0, value, collapse=collapse,
                          detail={"violating_point": res.violating_point})


# ---------------------------------------------------------------------------
# shattering


def _fold(mu, pattern) -> tuple:
    if any(isinstance(v, Fraction) for v in mu):
        return tuple(v * s for v, s in zip(mu, pattern))
    lam = fold_signs(np.asarray(mu, dtype=float), np.asarray(pattern, dtype=float))
    return tuple(float(v) for v in lam)


def _counterexample_from(verdict: RealizeVerdict,
                         pattern: tuple) -> ShatterCounterexample:
    if verdict.collapse is None:
        return ShatterCounterexample(pattern, None, verdict.value,
                                     verdict.value_exact)
    lam = _fold(verdict.collapse.mu, pattern)
    return ShatterCounterexample(pattern, lam, verdict.collapse.value,
                                 verdict.collapse.value_exact)


def _shatter_chunk(payload):
    oracle, ground, gamma, cfg, codes, n, fix_first = payload
    out = []
    for code in codes:
        pat = pattern_from_code(code, n, fix_first)
        v = realize(oracle, ground.sample(pat), gamma, cfg)
        out.append((code, pat, v))
    return out


def is_shattered(oracle: ConceptClassOracle, points, gamma,
                 cfg: SolverConfig | None = None, points_exact=None,
                 jobs: int = 1) -> ShatterVerdict:
    """Decide gamma-shattering by deciding every sign pattern.

    Symmetric classes are enumerated up to global label flip (the first
    sign fixed to +1), halving the pattern count.  Patterns run in
    binary-counter order with position 0 most significant; the scan
    stops at the first non-realized pattern, whose collapse weights fold
    into the signed certificate lambda_i = y_i mu_i.  A Marginal pattern
    without any non-realized one yields a Marginal verdict.
    """
    cfg = cfg or DEFAULT_CONFIG
    ground = _ground_points(oracle, points, points_exact)
    n = ground.n
    if n > 20:
        raise InputError("pattern enumeration is capped at 20 points; "
                         "use max_shattered_subset for larger ground sets")
    fix_first = bool(oracle.symmetric)
    total = 1 << (n - 1 if fix_first else n)
    g = float(gamma)
    band = 0.0 if (cfg.rational or oracle.kind in _CLOSED_FORM_KINDS) else cfg.band

    witnesses: dict = {}
    marginals: list = []
    checked = 0

    def finish_not_shattered(pat, verdict, checked_count):
        return ShatterVerdict("NotShattered", g, band, n, checked_count,
                              counterexample=_counterexample_from(verdict, pat))

    if jobs > 1 and total >= 64:
        chunk = max(64, total // (jobs * 8))
        chunks = [range(s, min(s + chunk, total))
                  for s in range(0, total, chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_shatter_chunk,
                                   (oracle, ground, gamma, cfg, list(c), n,
                                    fix_first))
                       for c in chunks]
            try:
                for fut in futures:
                    for code, pat, v in fut.result():
                        checked += 1
                        if v.status == "NotRealized":
                            return finish_not_shattered(pat, v, checked)
                        if v.status == "Marginal":
                            marginals.append(pat)
                        else:
                            witnesses[pat] = v.witness
            finally:
                for fut in futures:
                    fut.cancel()
    else:
        for code in range(total):
            pat = pattern_from_code(code, n, fix_first)
            v = realize(oracle, ground.sample(pat), gamma, cfg)
            checked += 1
            if v.status == "NotRealized":
                return finish_not_shattered(pat, v, checked)
            if v.status == "Marginal":
                marginals.append(pat)
            else:
                witnesses[pat] = v.witness

    if marginals:
        return ShatterVerdict("Marginal", g, band, n, checked,
                              witnesses=witnesses,
                              marginal_patterns=tuple(marginals))
    return ShatterVerdict("Shattered", g, band, n, checked,
                          witnesses=witnesses)


# ---------------------------------------------------------------------------
# certificate re-evaluation


def verify_collapse(points, space: NormSpec, lam, gamma,
                    points_exact=None) -> bool:
    """Re-check a signed-weight certificate: || sum_i lambda_i x_i || <= gamma.

    Pure re-evaluation, no optimization.  When exact coordinates are
    supplied (or the weights are themselves rational and the points
    float-free), the comparison runs in exact arithmetic.
    """
    lam_list = list(lam)
    exact_rows = None
    if points_exact is not None:
        exact_rows = [tuple(to_fraction(v) for v in row) for row in points_exact]
    wants_exact = (exact_rows is not None
                   and all(not isinstance(v, float) or float(v).is_integer()
                           for v in lam_list))
    as_signed_weights([float(v) for v in lam_list])
    if wants_exact and (space.p in (1, 2) or math.isinf(space.p)):
        lf = [to_fraction(v) for v in lam_list]
        d = len(exact_rows[0])
        v = [sum(lf[i] * exact_rows[i][t] for i in range(len(lf)))
             for t in range(d)]
        return norm_exact(v, space) <= Exact.rational(to_fraction(gamma))
    X = as_points(points)
    v = np.asarray([float(x) for x in lam_list], dtype=float) @ X
    return norm(v, space) <= float(gamma)


def collapse_support(oracle: ConceptClassOracle, points, lam,
                     points_exact=None, exact: bool = False):
    """Support value of a signed-weight vector under any oracle kind.

    Splits lambda into magnitudes and signs (zero entries count as +1)
    and evaluates the class support there; NotShattered certificates for
    non-normed classes are re-checked through this.
    """
    ground = _ground_points(oracle, points, points_exact)
    lam_list = list(lam)
    if len(lam_list) != ground.n:
        raise InputError("weights must match the point count")
    as_signed_weights([float(v) for v in lam_list])
    pat = tuple(1 if (v >= 0 if not isinstance(v, Fraction) else v >= 0) else -1
                for v in lam_list)
    mu = [abs(v) for v in lam_list]
    sample = ground.sample(pat)
    return oracle.support(sample, mu, exact=exact)


def witness_margins(oracle: ConceptClassOracle, sample: LabeledSample,
                    witness: dict, exact: bool = False) -> list:
    """Per-point margins y_i f(x_i) of a stored witness, re-derived.

    Margins come from the witness data alone (never from cached margin
    fields), so the result is an independent re-evaluation.
    """
    kind = witness.get("type")
    ys = list(sample.labels)
    if kind == "functional":
        if exact:
            wx = witness.get("w_exact")
            if wx is None or sample.vectors_exact is None:
                raise InputError("exact margins need exact witness and sample")
            vec = [to_fraction(v) for v in wx["vec"]]
            scale = wx["scale"]
            return [sum(vec[t] * sample.vectors_exact[i][t]
                        for t in range(len(vec))) * ys[i] * scale
                    for i in range(sample.n)]
        w = np.asarray([float(v) for v in witness["w"]], dtype=float)
        return [float(m) for m in sample.y() * (sample.vectors @ w)]
    if kind == "coeffs":
        vals = eval_distance_combination(oracle.space, witness["centers"],
                                         witness["coeffs"], sample.indices,
                                         exact=exact)
        return [ys[i] * vals[i] for i in range(sample.n)]
    if kind == "mixture":
        alpha = witness["alpha"]
        if exact:
            V = oracle.vertex_rows_exact(sample)
            al = [to_fraction(a) for a in alpha]
            return [ys[i] * sum(al[v] * V[v][i] for v in range(len(al)))
                    for i in range(sample.n)]
        V = oracle.vertex_rows(sample)
        f = np.asarray([float(a) for a in alpha], dtype=float) @ V
        return [float(ys[i] * f[i]) for i in range(sample.n)]
    if kind == "extension":
        return [ys[i] * witness["values"][i] for i in range(sample.n)]
    if kind == "profile":
        return [ys[i] * witness["values"][i] for i in range(sample.n)]
    if kind == "center":
        c = witness["index"]
        out = []
        for i in range(sample.n):
            dcx = oracle.space.dist[c, sample.indices[i]]
            f = 1.0 if dcx <= witness["r"] else (-1.0 if dcx >= witness["R"]
                                                 else 0.0)
            out.append(ys[i] * f)
        return out
    raise InputError(f"unknown witness type {kind!r}")


def check_witness(oracle: ConceptClassOracle, sample: LabeledSample,
                  witness: dict, gamma, tol: float = 1e-9):
    """Re-validate a witness: margins >= gamma - tol and class membership.

    Returns ``(ok, min_margin)``.  Membership means dual norm at most
    1 + tol for functionals, total coefficient mass at most 1 + tol with
    the variant's half-mass constraint, simplex mixture weights, profile
    values inside the coordinate caps, or an admissible center.
    """
    kind = witness.get("type")
    margins = [float(m) for m in witness_margins(oracle, sample, witness)]
    lo = min(margins)
    ok = lo >= float(gamma) - tol
    if kind == "functional":
        w = np.asarray([float(v) for v in witness["w"]], dtype=float)
        ok = ok and norm(w, oracle.space.dual()) <= 1.0 + tol
    elif kind == "coeffs":
        c = np.asarray([float(v) for v in witness["coeffs"]], dtype=float)
        mass = float(np.sum(np.abs(c)))
        posmass = float(np.sum(np.clip(c, 0.0, None)))
        ok = ok and mass <= 1.0 + tol
        variant = witness.get("variant", "full")
        if variant == "pos":
            ok = ok and posmass >= 0.5 - tol
        elif variant == "neg":
            ok = ok and posmass <= 0.5 + tol
    elif kind == "mixture":
        a = np.asarray([float(v) for v in witness["alpha"]], dtype=float)
        ok = ok and bool(np.all(a >= -tol)) and abs(float(a.sum()) - 1.0) <= 1e-6
    elif kind == "profile":
        for x, v in zip(witness["points"], witness["values"]):
            ok = ok and abs(v) <= oracle.spec.threshold(x) + tol
    elif kind == "center":
        ok = ok and 0 <= witness["index"] < oracle.space.n
    elif kind == "extension":
        vals = witness["values"]
        for i in range(sample.n):
            for j in range(sample.n):
                if (math.isfinite(vals[i]) and math.isfinite(vals[j])
                        and abs(vals[i] - vals[j]) >
                        oracle.space.dist[sample.indices[i],
                                          sample.indices[j]] + tol):
                    ok = False
    return ok, lo


# ---------------------------------------------------------------------------
# cube condition


def _check_targets(gamma, y) -> list:
    g = float(gamma)
    targets = [float(v) for v in y]
    for v in targets:
        if abs(v) > g + 1e-12:
            raise InputError("cube targets must lie in [-gamma, gamma]")
    return targets


def _solve_rational_system(A, b):
    """A particular rational solution of A x = b, or None if inconsistent.

    Gauss-Jordan over Fractions; free variables are set to zero.
    """
    m = len(A)
    if m == 0:
        return []
    nvar = len(A[0])
    T = [[Fraction(A[r][c]) for c in range(nvar)] + [Fraction(b[r])]
         for r in range(m)]
    pivots = []
    row = 0
    for col in range(nvar):
        piv = next((r for r in range(row, m) if T[r][col] != 0), None)
        if piv is None:
            continue
        T[row], T[piv] = T[piv], T[row]
        scale = T[row][col]
        T[row] = [v / scale for v in T[row]]
        for r in range(m):
            if r != row and T[r][col] != 0:
                f = T[r][col]
                T[r] = [vr - f * vp for vr, vp in zip(T[r], T[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if T[r][nvar] != 0:
            return None
    x = [Fraction(0)] * nvar
    for r, col in enumerate(pivots):
        x[col] = T[r][nvar]
    return x


def check_cube_condition(oracle: ConceptClassOracle, points, gamma, y,
                         cfg: SolverConfig | None = None,
                         points_exact=None) -> CubeCheck:
    """Decide whether some class member interpolates the target values.

    Polytope classes reduce to LP feasibility.  Dual-ball classes need a
    functional w with X w = y inside the dual unit ball: an LP for dual
    exponents 1 and inf, the exact least-norm solution for the Euclidean
    case, and (float mode only) a smooth minimization of the dual norm
    over the affine solution set for other exponents.  Checking all 2^n
    cube vertices y = gamma * (sign pattern) is equivalent to containing
    the whole cube, since the restriction F|_S is convex.
    """
    cfg = cfg or DEFAULT_CONFIG
    ground = _ground_points(oracle, points, points_exact)
    targets = _check_targets(gamma, y)
    if len(targets) != ground.n:
        raise InputError("target vector must match the point count")
    kind = oracle.kind
    sample = ground.sample((1,) * ground.n)
    exact = cfg.rational
    yv = ([to_fraction(v) for v in y] if exact else targets)

    if kind == "FunctionPolytope":
        if exact:
            V = oracle.vertex_rows_exact(sample)
        else:
            V = list(oracle.vertex_rows(sample))
        K = len(V)
        one = Fraction(1) if exact else 1.0
        A_eq = [[V[v][i] for v in range(K)] for i in range(ground.n)]
        A_eq.append([one] * K)
        b_eq = list(yv) + [one]
        out = lp_solve([0] * K, A_eq=A_eq, b_eq=b_eq, sense="max", config=cfg)
        if isinstance(out, LpOptimal):
            alpha = list(out.x)
            vals = [sum(alpha[v] * V[v][i] for v in range(K))
                    for i in range(ground.n)]
            return CubeCheck(True, {"type": "mixture", "alpha": alpha,
                                    "values_on_sample": vals})
        return CubeCheck(False, detail={"lp": type(out).__name__})

    if kind in ("DistanceCombination", "DistanceCombinationPos",
                "DistanceCombinationNeg"):
        Drows = (oracle.distance_rows_exact(sample) if exact
                 else [list(r) for r in oracle.distance_rows(sample)])
        k = len(oracle.centers)
        one = Fraction(1) if exact else 1.0
        half = Fraction(1, 2) if exact else 0.5
        A_eq = [[Drows[c][i] for c in range(k)]
                + [-Drows[c][i] for c in range(k)] for i in range(ground.n)]
        b_eq = list(yv)
        A_ub = [[one] * (2 * k)]
        b_ub = [one]
        if kind == "DistanceCombinationPos":
            A_ub.append([-one] * k + [0] * k)
            b_ub.append(-half)
        elif kind == "DistanceCombinationNeg":
            A_ub.append([one] * k + [0] * k)
            b_ub.append(half)
        out = lp_solve([0] * (2 * k), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq,
                       b_eq=b_eq, sense="max", config=cfg)
        if isinstance(out, LpOptimal):
            coeffs = [out.x[c] - out.x[k + c] for c in range(k)]
            return CubeCheck(True, {"type": "coeffs",
                                    "variant": oracle.variant,
                                    "centers": list(oracle.centers),
                                    "coeffs": coeffs})
        return CubeCheck(False, detail={"lp": type(out).__name__})

    if kind == "DualBall":
        return _cube_dual_ball(oracle, sample, yv, cfg)

    if kind == "Phi":
        seen = {}
        for i, x in enumerate(sample.indices):
            cap = oracle.spec.threshold(x)
            if abs(targets[i]) > cap + 1e-12:
                return CubeCheck(False, detail={"point": x, "cap": cap})
            if x in seen and abs(seen[x] - targets[i]) > 1e-12:
                return CubeCheck(False, detail={"point": x,
                                                "reason": "conflicting targets"})
            seen[x] = targets[i]
        return CubeCheck(True, {"type": "profile",
                                "points": list(sample.indices),
                                "values": targets})

    if kind == "Lipschitz":
        for i in range(ground.n):
            for j in range(i + 1, ground.n):
                dij = float(oracle.space.dist[sample.indices[i],
                                              sample.indices[j]])
                if abs(targets[i] - targets[j]) > dij + 1e-12:
                    return CubeCheck(False, detail={"pair": (i, j),
                                                    "distance": dij})
        return CubeCheck(True, {"type": "extension",
                                "description": "McShane extension of the targets",
                                "values": targets})

    raise InputError(f"cube condition unsupported for kind {kind!r}")


def _cube_dual_ball(oracle: DualBallOracle, sample: LabeledSample, yv,
                    cfg: SolverConfig) -> CubeCheck:
    p = oracle.space.p
    X = sample.vectors
    n, d = X.shape
    exact = cfg.rational

    if p == 1 or math.isinf(p):
        one = Fraction(1) if exact else 1.0
        rows = (sample.vectors_exact if exact else [list(r) for r in X])
        if exact and rows is None:
            raise InputError("rational mode needs exact sample coordinates")
        if p == 1:
            # dual is l_inf: box-bounded feasibility
            A_eq = [list(rows[i]) for i in range(n)]
            out = lp_solve([0] * d, A_eq=A_eq, b_eq=list(yv),
                           bounds=[(-one, one)] * d, sense="max", config=cfg)
            if isinstance(out, LpOptimal):
                return CubeCheck(True, {"type": "functional",
                                        "w": [float(v) for v in out.x],
                                        "w_exact": ({"vec": list(out.x),
                                                     "scale": Fraction(1)}
                                                    if exact else None)})
            return CubeCheck(False, detail={"lp": type(out).__name__})
        # dual is l1: split mass
        A_eq = [[rows[i][t] for t in range(d)] + [-rows[i][t] for t in range(d)]
                for i in range(n)]
        A_ub = [[one] * (2 * d)]
        out = lp_solve([0] * (2 * d), A_ub=A_ub, b_ub=[one], A_eq=A_eq,
                       b_eq=list(yv), sense="max", config=cfg)
        if isinstance(out, LpOptimal):
            w = [out.x[t] - out.x[d + t] for t in range(d)]
            return CubeCheck(True, {"type": "functional",
                                    "w": [float(v) for v in w],
                                    "w_exact": ({"vec": w, "scale": Fraction(1)}
                                                if exact else None)})
        return CubeCheck(False, detail={"lp": type(out).__name__})

    if p == 2 and exact:
        rows = sample.vectors_exact
        if rows is None:
            raise InputError("rational mode needs exact sample coordinates")
        Gram = [[sum(rows[i][t] * rows[j][t] for t in range(d))
                 for j in range(n)] for i in range(n)]
        c = _solve_rational_system(Gram, list(yv))
        if c is None:
            return CubeCheck(False, detail={"reason": "targets outside the span"})
        w = [sum(c[i] * rows[i][t] for i in range(n)) for t in range(d)]
        if sum(v * v for v in w) > 1:
            return CubeCheck(False, detail={"norm_sq": float(sum(v * v for v in w)),
                                            "reason": "least-norm exceeds the ball"})
        return CubeCheck(True, {"type": "functional",
                                "w": [float(v) for v in w],
                                "w_exact": {"vec": w, "scale": Fraction(1)}})

    if exact:
        raise InputError("rational cube checks support p in {1, 2, inf} only")

    # float fallback: least-norm particular solution, then minimize the
    # dual norm over the affine solution set (smooth for q in (1, inf))
    yarr = np.asarray(yv, dtype=float)
    w0, *_ = np.linalg.lstsq(X, yarr, rcond=None)
    if float(np.max(np.abs(X @ w0 - yarr))) > 1e-8 * (1.0 + float(np.max(np.abs(yarr)))):
        return CubeCheck(False, detail={"reason": "targets outside the span"})
    q = oracle.space.dual_exponent
    if p == 2:
        wbest = w0
    else:
        from scipy.linalg import null_space
        from scipy.optimize import minimize as sp_minimize
        N = null_space(X)
        if N.shape[1] == 0:
            wbest = w0
        else:
            def fun(z):
                w = w0 + N @ z
                a = np.abs(w)
                val = float(np.sum(a ** q))
                grad = (q * np.sign(w) * a ** (q - 1)) @ N
                return val, grad
            res = sp_minimize(fun, np.zeros(N.shape[1]), jac=True,
                              method="L-BFGS-B",
                              options={"maxiter": 500, "ftol": 1e-14})
            wbest = w0 + N @ res.x
    nq = norm(wbest, NormSpec(q))
    if nq <= 1.0 + 1e-9:
        return CubeCheck(True, {"type": "functional",
                                "w": [float(v) for v in wbest]})
    return CubeCheck(False, detail={"dual_norm": nq})


def cube_vertices_contained(oracle: ConceptClassOracle, points, gamma,
                            cfg: SolverConfig | None = None,
                            points_exact=None):
    """Check all 2^n cube vertices gamma * (sign pattern) for membership.

    By convexity of the restriction F|_S this is equivalent to the full
    cube [-gamma, gamma]^n being contained, hence to gamma-shattering for
    convex classes.  Returns ``(all_contained, first_failing_pattern)``.
    """
    ground = _ground_points(oracle, points, points_exact)
    n = ground.n
    if n > 20:
        raise InputError("cube-vertex enumeration is capped at 20 points")
    cfg = cfg or DEFAULT_CONFIG
    g = to_fraction(gamma) if cfg.rational else float(gamma)
    for code in range(1 << n):
        pat = pattern_from_code(code, n)
        target = [g * s for s in pat]
        res = check_cube_condition(oracle, points, gamma, target, cfg,
                                   points_exact=points_exact)
        if not res.feasible:
            return False, pat
    return True, None


def min_signed_support(oracle: ConceptClassOracle, points,
                       cfg: SolverConfig | None = None, points_exact=None):
    """Exact minimum of the support value over signed weights.

    Minimizes sup_f sum_i lambda_i f(x_i) over all lambda with total
    absolute mass 1.  The mass-1 sphere is one simplex face per sign
    pattern, and the support value is convex on each face, so the
    routine solves one LP over mu per orthant and takes the overall
    minimum.  A single LP over split weights would not do: cancelling
    positive and negative parts reaches every point of the mass <= 1
    ball, which caps the reported minimum at zero and hides exactly the
    shattered (all-positive) case.  Gamma-shattering of a convex class
    is equivalent to this minimum being at least gamma.  Returns
    ``(value, lam, value_exact)``.
    """
    cfg = cfg or DEFAULT_CONFIG
    ground = _ground_points(oracle, points, points_exact)
    n = ground.n
    if n > 15:
        raise InputError("signed-support minimization enumerates sign "
                         "patterns; 15 points is the supported maximum")
    exact = cfg.rational
    kind = oracle.kind
    sample = ground.sample((1,) * n)
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    if kind == "FunctionPolytope":
        V = (oracle.vertex_rows_exact(sample) if exact
             else list(oracle.vertex_rows(sample)))
        rows = [[V[v][i] for i in range(n)] for v in range(len(V))]
        posneg = False
    elif kind == "DistanceCombination":
        D = (oracle.distance_rows_exact(sample) if exact
             else [list(r) for r in oracle.distance_rows(sample)])
        rows = [list(r) for r in D] + [[-v for v in r] for r in D]
        posneg = False
    elif kind in ("DistanceCombinationPos", "DistanceCombinationNeg"):
        rows = (oracle.distance_rows_exact(sample) if exact
                else [list(r) for r in oracle.distance_rows(sample)])
        posneg = True
    else:
        raise InputError("signed-support minimization covers the "
                         "piecewise-linear classes only")

    best = None
    total = 1 << (n - 1 if oracle.symmetric else n)
    for code in range(total):
        y = pattern_from_code(code, n, fix_first=oracle.symmetric)
        if posneg:
            value, mu = _orthant_support_posneg(oracle, rows, y, cfg)
        else:
            value, mu = _orthant_support(rows, y, cfg, zero, one)
        if best is None or value < best[0]:
            best = (value, tuple(y[i] * mu[i] for i in range(n)))
    value, lam = best
    if exact:
        return float(value), lam, value
    return float(value), tuple(float(v) for v in lam), None


def _orthant_support(rows, y, cfg: SolverConfig, zero, one):
    """min over mu in the simplex of max_v sum_i rows[v][i] y_i mu_i."""
    n = len(y)
    K = len(rows)
    A_ub = [[rows[v][i] * y[i] for i in range(n)] + [-one]
            for v in range(K)]
    out = _lp_opt(lp_solve(
        [zero] * n + [one],
        A_ub=A_ub, b_ub=[zero] * K,
        A_eq=[[one] * n + [zero]], b_eq=[one],
        bounds=[(0, None)] * n + [(None, None)],
        sense="min", config=cfg), "signed-support")
    return out.value, tuple(out.x[:n])


def _orthant_support_posneg(oracle, D, y, cfg: SolverConfig):
    """The one-sided variants: support over combinations with the
    positive (resp. negative) center mass at least half."""
    exact = cfg.rational
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    half = Fraction(1, 2) if exact else 0.5
    n = len(y)
    k = len(D)
    pos = oracle.kind == "DistanceCombinationPos"
    sgn_obj = -half if pos else half
    tail = one if pos else -one
    # vars: mu (n), u, w
    def g_row(c, s):
        return [s * D[c][i] * y[i] for i in range(n)]
    A_ub = ([g_row(c, 1) + [-one, tail] for c in range(k)]
            + [g_row(c, -1) + [-one, zero] for c in range(k)])
    out = _lp_opt(lp_solve(
        [zero] * n + [one, sgn_obj],
        A_ub=A_ub, b_ub=[zero] * (2 * k),
        A_eq=[[one] * n + [zero, zero]], b_eq=[one],
        bounds=[(0, None)] * (n + 2),
        sense="min", config=cfg), "signed-support")
    return out.value, tuple(out.x[:n])


# ---------------------------------------------------------------------------
# dimension search


def max_shattered_subset(oracle: ConceptClassOracle, points, gamma,
                         cfg: SolverConfig | None = None, points_exact=None,
                         budget: int = 100_000, jobs: int = 1) -> SubsetSearchResult:
    """Largest gamma-shattered subset of a ground set, by pruned search.

    Shattering is downward closed, so depth-first extension in
    lexicographic index order visits every shattered subset through
    shattered prefixes; a branch dies the moment an extension fails, and
    the failing extension's counterexample is kept.  A greedy pass seeds
    the size bound.  Exceeding ``budget`` shattering tests degrades the
    answer to a flagged lower bound, as does any Marginal leaf.
    """
    cfg = cfg or DEFAULT_CONFIG
    ground = _ground_points(oracle, points, points_exact)
    n = ground.n
    if n > 64:
        raise InputError("ground sets are capped at 64 points")

    nodes = 0
    marginal = False
    certificates: dict = {}
    verdict_cache: dict = {}

    class _Budget(Exception):
        pass

    def test(sel: tuple) -> ShatterVerdict:
        nonlocal nodes, marginal
        if sel in verdict_cache:
            return verdict_cache[sel]
        if nodes >= budget:
            raise _Budget()
        nodes += 1
        sub = ground.sample((1,) * len(sel), sel)
        v = is_shattered(oracle, sub, gamma, cfg, jobs=jobs)
        verdict_cache[sel] = v
        if v.status == "NotShattered":
            certificates[sel] = v.counterexample
        elif v.status == "Marginal":
            marginal = True
        return v

    best: tuple = ()
    best_verdict: ShatterVerdict | None = None
    note = ""

    try:
        # greedy seed
        cur: tuple = ()
        for i in range(n):
            v = test(cur + (i,))
            if v.status == "Shattered":
                cur = cur + (i,)
        best = cur
        best_verdict = verdict_cache.get(best) if best else None

        def dfs(sel: tuple, verdict, start: int):
            nonlocal best, best_verdict
            if len(sel) > len(best):
                best, best_verdict = sel, verdict
            for j in range(start, n):
                if len(sel) + (n - j) <= len(best):
                    break
                v = test(sel + (j,))
                if v.status == "Shattered":
                    dfs(sel + (j,), v, j + 1)

        dfs((), None, 0)
        exact_flag = not marginal
        if marginal:
            note = "marginal frontier: size is a certified lower bound only"
    except _Budget:
        exact_flag = False
        note = "budget exhausted: size is a lower bound"

    return SubsetSearchResult(size=len(best), subset=best,
                              certificates=certificates, exact=exact_flag,
                              nodes=nodes, best_verdict=best_verdict, note=note)


def packing_number(space: FiniteMetricSpace, s) -> tuple:
    """Maximum subset with pairwise distances at least s, found exactly.

    Branch and bound on the conflict graph with edges d(i, j) < s,
    seeded by the greedy packing; ties resolve to the lexicographically
    first maximum subset.
    """
    sf = float(s)
    if not sf > 0:
        raise InputError("separation must be positive")
    n = space.n
    if n > 64:
        raise InputError("packing search is capped at 64 points")
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if float(space.dist[i, j]) < sf:
                adj[i] |= 1 << j
                adj[j] |= 1 << i

    chosen_mask = 0
    blocked = 0
    for i in range(n):
        if not (blocked >> i) & 1:
            chosen_mask |= 1 << i
            blocked |= adj[i] | (1 << i)
    best_mask = chosen_mask
    best = best_mask.bit_count()

    def dfs(count: int, mask: int, cand: int):
        nonlocal best, best_mask
        if count > best:
            best, best_mask = count, mask
        while cand:
            if count + cand.bit_count() <= best:
                return
            low = cand & -cand
            i = low.bit_length() - 1
            cand ^= low
            dfs(count + 1, mask | low, cand & ~adj[i])

    dfs(0, 0, (1 << n) - 1)
    subset = tuple(i for i in range(n) if (best_mask >> i) & 1)
    return best, subset


# ---------------------------------------------------------------------------
# taxonomy audits


def _dim_bounds(entry) -> tuple:
    if isinstance(entry, int):
        return entry, entry
    if isinstance(entry, tuple) and len(entry) == 2:
        value, status = entry
    else:
        value, status = entry.value, entry.status
    value = int(value)
    if status == "exact":
        return value, value
    if status == "lower":
        return value, math.inf
    if status == "upper":
        return 0, value
    raise InputError(f"unknown dimension status {status!r}")


def _gamma_key(g) -> Fraction:
    return to_fraction(g, max_denominator=10**6)


def audit_submultiplicativity(dim_at: dict) -> list:
    """Audit dim(g1 g2) + 1 <= (dim(g1) + 1)(dim(g2) + 1) over a dim map.

    Entries may be exact integers or (value, status) pairs with status
    in {exact, lower, upper}; the audit uses the lower bound on the left
    and the upper bounds on the right, so a failed row is a genuine
    violation and an uncertain row cannot fail spuriously.  Pairs whose
    product margin is missing from the map are skipped.
    """
    keyed = {_gamma_key(g): (g, _dim_bounds(e)) for g, e in dim_at.items()}
    keys = sorted(keyed)
    rows = []
    for a in range(len(keys)):
        for b in range(a, len(keys)):
            g1, g2 = keys[a], keys[b]
            prod = g1 * g2
            if prod not in keyed:
                log.debug("submultiplicativity audit: no entry for %s * %s",
                          g1, g2)
                continue
            lo_p, _ = keyed[prod][1]
            _, hi1 = keyed[g1][1]
            _, hi2 = keyed[g2][1]
            lhs = lo_p + 1
            rhs = (hi1 + 1) * (hi2 + 1)
            rows.append(AuditRow(keyed[g1][0], keyed[g2][0], lhs, rhs,
                                 lhs <= rhs))
    return rows


def fit_rate(report: DimensionReport, statuses=None) -> tuple:
    """Least-squares exponent of dim against 1/gamma on a log-log scale.

    Returns ``(p_hat, residual)`` where residual is the largest absolute
    log deviation from the fit; a large residual flags growth that no
    polynomial rate explains.  By default every entry with dim >= 1 is
    used regardless of status; pass ``statuses`` to restrict.
    """
    use = []
    for g, d, s in zip(report.gammas, report.dims, report.statuses):
        if statuses is not None and s not in statuses:
            continue
        if d >= 1:
            use.append((float(g), d))
    if len(use) < 4:
        raise InputError("rate fitting needs at least 4 usable grid points")
    xs = np.array([math.log(1.0 / g) for g, _ in use])
    if float(np.ptp(xs)) < 1e-12:
        raise InputError("rate fitting needs a nondegenerate margin grid")
    ysl = np.array([math.log(d) for _, d in use])
    slope, intercept = np.polyfit(xs, ysl, 1)
    resid = float(np.max(np.abs(ysl - (slope * xs + intercept))))
    return float(slope), resid


def sample_complexity_estimate(dim: int, eps, delta) -> int:
    """Order-of-magnitude sample bound ceil((dim + ln(1/delta)) / eps).

    The constant is pinned to 1: the underlying bound hides constants,
    so this is an indicative figure, not a guarantee.  Values within
    1e-9 (relative) of an integer snap down before the ceiling.
    """
    if not (isinstance(dim, (int, np.integer)) and dim >= 0):
        raise InputError("dimension must be a nonnegative integer")
    ef, df = float(eps), float(delta)
    if not (0 < ef < 1 and 0 < df < 1):
        raise InputError("eps and delta must lie in (0, 1)")
    m = (dim + math.log(1.0 / df)) / ef
    return int(math.ceil(m - 1e-9 * max(1.0, m)))
