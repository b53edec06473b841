"""Optimization kernels: dense simplex LP and minimum-norm-point solvers.

Everything downstream reduces to two problems.

* Linear programs with certificates.  ``lp_solve`` is a dense two-phase
  tableau simplex with Bland's rule (always on, so it cannot cycle), run
  either in float64 or exactly over Fractions.  Optimal results carry dual
  values; infeasible results carry a Farkas certificate that a caller can
  re-check with one matrix-vector product; unbounded results carry a ray.

* Minimum of ``|| sum_i mu_i u_i ||_p`` over the probability simplex.  For
  p in (1, inf) this is solved by away-step conditional gradient with exact
  line search; the reported gap is the certified bound
  ``value - min_i <w, u_i>`` obtained from the norming functional w of the
  current point, which lower-bounds the true minimum for every w in the
  dual unit ball.  For p in {1, inf} the problem is an LP (coordinate
  split / epigraph) whose duals supply the witness functional.  For p = 2
  in rational mode the exact minimum-norm point of the convex hull is
  found by Wolfe's algorithm over Fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateInputError, InputError, SolverFailure
from .exact import Exact, to_fraction
from .spaces import NormSpec, as_points, duality_map, norm

__all__ = [
    "SolverConfig",
    "DEFAULT_CONFIG",
    "as_simplex_weights",
    "as_signed_weights",
    "fold_signs",
    "LpOptimal",
    "LpInfeasible",
    "LpUnbounded",
    "lp_solve",
    "farkas_gap",
    "MinNormResult",
    "min_norm_point",
    "wolfe_min_norm_point",
]


@dataclass(frozen=True)
class SolverConfig:
    """Shared numeric policy.

    ``tol`` is the duality-gap / residual target (must be < 1e-2),
    ``max_iter`` the iteration budget, ``arithmetic`` either ``"float"``
    or ``"rational"``.  Rational mode is exact: zero tolerances, Fraction
    pivots, certificates that hold with equality.
    """

    tol: float = 1e-7
    max_iter: int = 50_000
    arithmetic: str = "float"

    def __post_init__(self):
        if not (0.0 < self.tol < 1e-2):
            raise InputError(f"tol must be in (0, 1e-2), got {self.tol}")
        if self.max_iter < 1:
            raise InputError("max_iter must be >= 1")
        if self.arithmetic not in ("float", "rational"):
            raise InputError(
                f"arithmetic must be 'float' or 'rational', got {self.arithmetic!r}")

    @property
    def rational(self) -> bool:
        return self.arithmetic == "rational"

    @property
    def band(self) -> float:
        """Half-width of the indeterminate band around a margin threshold."""
        return 3.0 * self.tol


DEFAULT_CONFIG = SolverConfig()

_WEIGHT_ATOL = 1e-12


def as_simplex_weights(mu) -> np.ndarray:
    """Validate probability-simplex weights: nonnegative, summing to 1 (+-1e-12)."""
    arr = np.asarray(mu, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("simplex weights must be a nonempty 1-d vector")
    if np.any(arr < -_WEIGHT_ATOL):
        raise InputError("simplex weights must be nonnegative")
    if abs(float(arr.sum()) - 1.0) > _WEIGHT_ATOL:
        raise InputError("simplex weights must sum to 1")
    return np.clip(arr, 0.0, None)


def as_signed_weights(lam) -> np.ndarray:
    """Validate signed weights with total absolute mass 1 (+-1e-12)."""
    arr = np.asarray(lam, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("signed weights must be a nonempty 1-d vector")
    if abs(float(np.sum(np.abs(arr))) - 1.0) > _WEIGHT_ATOL:
        raise InputError("signed weights must have total absolute mass 1")
    return arr


def fold_signs(mu, y) -> np.ndarray:
    """Fold a sign pattern into simplex weights: lambda_i = y_i * mu_i.

    The result has total absolute mass 1 whenever mu lies on the simplex,
    which is how a per-pattern collapse certificate becomes a signed one.
    """
    arr = as_simplex_weights(mu)
    ys = np.asarray(y, dtype=float)
    if ys.shape != arr.shape:
        raise InputError("pattern and weights must have equal length")
    if not np.all(np.abs(ys) == 1.0):
        raise InputError("pattern entries must be +-1")
    return ys * arr


# ---------------------------------------------------------------------------
# LP result types


@dataclass(frozen=True)
class LpOptimal:
    """Optimal LP result.

    ``duals`` has keys ``y_ub``, ``y_eq``, ``z_lo``, ``z_hi`` in the
    max-form convention: for the effective objective c_eff (= c under
    sense "max", -c under "min"),

        c_eff = A_ub^T y_ub + A_eq^T y_eq + z_hi - z_lo,
        y_ub >= 0,  z_lo >= 0,  z_hi >= 0,

    and  y_ub.b_ub + y_eq.b_eq + z_hi.hi - z_lo.lo  equals  c_eff.x
    (exactly in rational mode, within sqrt(tol) in float mode).
    """

    x: tuple
    value: object
    duals: dict

    def x_float(self) -> np.ndarray:
        return np.array([float(v) for v in self.x], dtype=float)


@dataclass(frozen=True)
class LpInfeasible:
    """Farkas certificate of infeasibility.

    ``certificate`` holds ``y_ub >= 0``, ``y_eq``, ``z_lo >= 0``,
    ``z_hi >= 0`` with  A_ub^T y_ub + A_eq^T y_eq + z_hi - z_lo = 0  and
    ``gap`` = y_ub.b_ub + y_eq.b_eq + z_hi.hi - z_lo.lo < 0.  Any feasible
    x would make that expression nonnegative, so none exists.  Re-check
    with :func:`farkas_gap`.
    """

    certificate: dict


@dataclass(frozen=True)
class LpUnbounded:
    """Feasible direction ``ray`` along which the objective improves forever."""

    ray: tuple


def farkas_gap(certificate: dict, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
               bounds=None) -> tuple:
    """Re-check a Farkas certificate against the original problem data.

    Returns ``(stationarity, gap)``: the vector A_ub^T y_ub + A_eq^T y_eq
    + z_hi - z_lo (must be zero) and the dual objective (must be
    negative).  Pure arithmetic, no solving.
    """
    y_ub = list(certificate["y_ub"])
    y_eq = list(certificate["y_eq"])
    z_lo = list(certificate["z_lo"])
    z_hi = list(certificate["z_hi"])
    nvar = len(z_lo)
    A_ub = A_ub if A_ub is not None else []
    A_eq = A_eq if A_eq is not None else []
    b_ub = b_ub if b_ub is not None else []
    b_eq = b_eq if b_eq is not None else []
    bounds = list(bounds) if bounds is not None else [(0, None)] * nvar
    station = []
    for j in range(nvar):
        t = sum(y_ub[i] * A_ub[i][j] for i in range(len(y_ub)))
        t += sum(y_eq[i] * A_eq[i][j] for i in range(len(y_eq)))
        station.append(t + z_hi[j] - z_lo[j])
    gap = sum(y_ub[i] * b_ub[i] for i in range(len(y_ub)))
    gap += sum(y_eq[i] * b_eq[i] for i in range(len(y_eq)))
    for j, (lo, hi) in enumerate(bounds):
        if z_hi[j] != 0:
            gap += z_hi[j] * hi
        if z_lo[j] != 0:
            gap -= z_lo[j] * lo
    return station, gap


# ---------------------------------------------------------------------------
# simplex internals
#
# Internal standard form: minimize cost.u over A u = b, u >= 0.  Variables
# with a finite lower bound are shifted (x = lo + u), ones bounded only
# above are reflected (x = hi - u), free ones are split (x = u+ - u-).
# Finite ranges lo <= x <= hi add an explicit row u <= hi - lo.  Inequality
# rows receive slacks; rows are sign-normalized so b >= 0; phase 1 seeds
# the basis with the slack where its sign survived normalization and an
# artificial elsewhere.  Artificials stay in the tableau through phase 2
# but are barred from entering, which keeps dual recovery uniform: every
# row owns a column that started as the unit vector e_i, and the reduced
# cost there reads off y_i = c_j - r_j.

_SHIFT, _NEG, _SPLIT = 0, 1, 2


class _Arith:
    """Number factory for the two arithmetic modes."""

    def __init__(self, rational: bool):
        self.rational = rational
        self.zero = Fraction(0) if rational else 0.0
        self.one = Fraction(1) if rational else 1.0
        self.dtype = object if rational else float

    def num(self, x):
        return to_fraction(x) if self.rational else float(x)

    def zeros(self, shape):
        arr = np.zeros(shape, dtype=self.dtype)
        if self.rational:
            arr[...] = Fraction(0)
        return arr


def _default_bounds(nvar, bounds):
    if bounds is None:
        return [(0, None)] * nvar
    out = list(bounds)
    if len(out) != nvar:
        raise InputError("bounds length must match the number of variables")
    return out


def _as_matrix(ar: _Arith, M, ncols) -> list:
    if M is None:
        return []
    rows = [[ar.num(x) for x in row] for row in M]
    for r in rows:
        if len(r) != ncols:
            raise InputError("constraint matrix width disagrees with objective length")
    return rows


def lp_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
             sense: str = "max", config: SolverConfig | None = None):
    """Solve  max (or min) c.x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, lo <= x <= hi.

    ``bounds`` lists (lo, hi) per variable with None for an unbounded end;
    the default is (0, None) everywhere.  Returns :class:`LpOptimal`,
    :class:`LpInfeasible` or :class:`LpUnbounded`.

    Float mode cross-checks the answer through strong duality and raises
    :class:`SolverFailure` when the residual exceeds sqrt(tol) or the
    pivot budget runs out; rational mode is exact.
    """
    cfg = config or DEFAULT_CONFIG
    ar = _Arith(cfg.rational)
    if sense not in ("max", "min"):
        raise InputError("sense must be 'max' or 'min'")

    c_user = [ar.num(x) for x in c]
    nvar = len(c_user)
    if nvar == 0:
        raise DegenerateInputError("objective has no variables")
    c_eff = c_user if sense == "max" else [-x for x in c_user]

    Aub = _as_matrix(ar, A_ub, nvar)
    bub = [ar.num(x) for x in (b_ub if b_ub is not None else [])]
    Aeq = _as_matrix(ar, A_eq, nvar)
    beq = [ar.num(x) for x in (b_eq if b_eq is not None else [])]
    if len(Aub) != len(bub) or len(Aeq) != len(beq):
        raise InputError("constraint matrix and rhs lengths disagree")

    bnds = []
    for lo, hi in _default_bounds(nvar, bounds):
        lo_v = None if lo is None or (isinstance(lo, float) and math.isinf(lo)) else ar.num(lo)
        hi_v = None if hi is None or (isinstance(hi, float) and math.isinf(hi)) else ar.num(hi)
        if lo_v is not None and hi_v is not None and lo_v > hi_v:
            raise InputError("variable bound has lo > hi")
        bnds.append((lo_v, hi_v))

    # variable transforms: x_j = offset_j (+/-) u_col, or a split pair
    transforms = []
    offsets = []
    ncols = 0
    for lo, hi in bnds:
        if lo is not None:
            transforms.append((_SHIFT, ncols))
            offsets.append(lo)
            ncols += 1
        elif hi is not None:
            transforms.append((_NEG, ncols))
            offsets.append(hi)
            ncols += 1
        else:
            transforms.append((_SPLIT, ncols))
            offsets.append(ar.zero)
            ncols += 2

    def expand_row(row):
        out = [ar.zero] * ncols
        for j in range(nvar):
            a = row[j]
            if a == 0:
                continue
            kind, col = transforms[j]
            if kind == _SHIFT:
                out[col] += a
            elif kind == _NEG:
                out[col] -= a
            else:
                out[col] += a
                out[col + 1] -= a
        return out

    def row_offset(row):
        s = ar.zero
        for j in range(nvar):
            if row[j] != 0 and offsets[j] != 0:
                s += row[j] * offsets[j]
        return s

    # rows: (coeffs over u-columns, rhs, tag, user index)
    raw_rows = []
    for i, row in enumerate(Aub):
        raw_rows.append((expand_row(row), bub[i] - row_offset(row), "ub", i))
    for j, (lo, hi) in enumerate(bnds):
        if lo is not None and hi is not None:
            coeffs = [ar.zero] * ncols
            coeffs[transforms[j][1]] = ar.one
            raw_rows.append((coeffs, hi - lo, "bnd", j))
    for i, row in enumerate(Aeq):
        raw_rows.append((expand_row(row), beq[i] - row_offset(row), "eq", i))

    m = len(raw_rows)
    ineq_count = sum(1 for r in raw_rows if r[2] in ("ub", "bnd"))
    ntot = ncols + ineq_count

    A = ar.zeros((m, ntot))
    b = ar.zeros(m)
    sigma = []
    slack_col_of_row = [None] * m
    scol = ncols
    for i, (coeffs, rhs, tag, _idx) in enumerate(raw_rows):
        sg = ar.one if rhs >= 0 else -ar.one
        sigma.append(sg)
        for jj, a in enumerate(coeffs):
            if a != 0:
                A[i, jj] = sg * a
        b[i] = sg * rhs
        if tag in ("ub", "bnd"):
            A[i, scol] = sg
            slack_col_of_row[i] = scol
            scol += 1

    # internal phase-2 cost on u-columns: minimize -c_eff over user x
    cost = ar.zeros(ntot)
    for j in range(nvar):
        kind, col = transforms[j]
        cj = -c_eff[j]
        if kind == _SHIFT:
            cost[col] += cj
        elif kind == _NEG:
            cost[col] -= cj
        else:
            cost[col] += cj
            cost[col + 1] -= cj

    res = _two_phase(ar, cfg, A, b, cost, slack_col_of_row)

    if res["status"] == "infeasible":
        cert = _row_certificate(ar, res["y"], raw_rows, sigma, Aub, Aeq,
                                transforms, nvar, c_eff=None)
        _check_certificate(ar, cfg, cert, Aub, Aeq, nvar, c_eff=None)
        cert["gap"] = _dual_objective(ar, cert, bub, beq, bnds)
        return LpInfeasible(cert)

    if res["status"] == "unbounded":
        ray_u = res["ray"]
        ray = [ar.zero] * nvar
        for j in range(nvar):
            kind, col = transforms[j]
            if kind == _SHIFT:
                ray[j] = ray_u[col]
            elif kind == _NEG:
                ray[j] = -ray_u[col]
            else:
                ray[j] = ray_u[col] - ray_u[col + 1]
        return LpUnbounded(tuple(ray))

    xu = res["x"]
    x = [ar.zero] * nvar
    for j in range(nvar):
        kind, col = transforms[j]
        if kind == _SHIFT:
            x[j] = offsets[j] + xu[col]
        elif kind == _NEG:
            x[j] = offsets[j] - xu[col]
        else:
            x[j] = xu[col] - xu[col + 1]
    value_eff = sum(ce * xv for ce, xv in zip(c_eff, x))
    duals = _row_certificate(ar, res["y"], raw_rows, sigma, Aub, Aeq,
                             transforms, nvar, c_eff=c_eff)
    _check_certificate(ar, cfg, duals, Aub, Aeq, nvar, c_eff=c_eff)
    dual_obj = _dual_objective(ar, duals, bub, beq, bnds)
    gap = value_eff - dual_obj
    if ar.rational:
        if gap != 0:
            raise SolverFailure("exact LP strong duality failed", best=tuple(x))
    elif abs(float(gap)) > math.sqrt(cfg.tol) * (1.0 + abs(float(value_eff))):
        raise SolverFailure(
            f"LP duality residual {float(gap):.3e} exceeds tolerance",
            best=tuple(x))
    value = value_eff if sense == "max" else -value_eff
    return LpOptimal(tuple(x), value, duals)


def _dual_objective(ar, cert, bub, beq, bnds):
    g = ar.zero
    for yi, bi in zip(cert["y_ub"], bub):
        g += yi * bi
    for yi, bi in zip(cert["y_eq"], beq):
        g += yi * bi
    for j, (lo, hi) in enumerate(bnds):
        if cert["z_hi"][j] != 0:
            g += cert["z_hi"][j] * hi
        if cert["z_lo"][j] != 0:
            g -= cert["z_lo"][j] * lo
    return g


def _row_certificate(ar, y, raw_rows, sigma, Aub, Aeq, transforms, nvar, c_eff):
    """Map duals on internal rows back to the user-facing certificate.

    With alpha_i = -sigma_i y_i on inequality rows, beta_i likewise on
    equality rows, zeta_j on the range row of variable j, and
    T_j = (A_ub^T alpha + A_eq^T beta)_j, reduced-cost nonnegativity of
    every structural column gives, writing c_j for the effective
    objective entry (zero when building a Farkas certificate):

        shifted:    z_hi_j = zeta_j,          z_lo_j = T_j + zeta_j - c_j >= 0
        reflected:  z_hi_j = c_j - T_j >= 0,  z_lo_j = 0
        split:      T_j = c_j exactly,        z_lo_j = z_hi_j = 0
    """
    alpha = [ar.zero] * len(Aub)
    beta = [ar.zero] * len(Aeq)
    zeta = [ar.zero] * nvar
    for i, (_c, _r, tag, idx) in enumerate(raw_rows):
        val = -sigma[i] * y[i]
        if tag == "ub":
            alpha[idx] = val
        elif tag == "eq":
            beta[idx] = val
        else:
            zeta[idx] = val
    z_lo = [ar.zero] * nvar
    z_hi = [ar.zero] * nvar
    for j in range(nvar):
        t = ar.zero
        for i in range(len(Aub)):
            if Aub[i][j] != 0:
                t += alpha[i] * Aub[i][j]
        for i in range(len(Aeq)):
            if Aeq[i][j] != 0:
                t += beta[i] * Aeq[i][j]
        cj = c_eff[j] if c_eff is not None else ar.zero
        kind = transforms[j][0]
        if kind == _SHIFT:
            z_hi[j] = zeta[j]
            z_lo[j] = t + zeta[j] - cj
        elif kind == _NEG:
            z_hi[j] = cj - t
    if not ar.rational:
        alpha = [max(0.0, a) for a in alpha]
        z_lo = [max(0.0, v) for v in z_lo]
        z_hi = [max(0.0, v) for v in z_hi]
    return {"y_ub": alpha, "y_eq": beta, "z_lo": z_lo, "z_hi": z_hi}


def _check_certificate(ar, cfg, cert, Aub, Aeq, nvar, c_eff):
    """Assert dual stationarity: exact in rational mode, sqrt(tol) in float."""
    for j in range(nvar):
        t = ar.zero
        for i in range(len(Aub)):
            if Aub[i][j] != 0:
                t += cert["y_ub"][i] * Aub[i][j]
        for i in range(len(Aeq)):
            if Aeq[i][j] != 0:
                t += cert["y_eq"][i] * Aeq[i][j]
        resid = t + cert["z_hi"][j] - cert["z_lo"][j]
        if c_eff is not None:
            resid -= c_eff[j]
        if ar.rational:
            if resid != 0:
                raise SolverFailure("exact dual stationarity failed")
        elif abs(float(resid)) > math.sqrt(cfg.tol):
            raise SolverFailure(
                f"dual stationarity residual {float(resid):.3e} exceeds tolerance")


def _two_phase(ar: _Arith, cfg: SolverConfig, A, b, cost, slack_col_of_row):
    """Both simplex phases on [A | b]; returns status plus solution or duals."""
    m, ntot = A.shape
    need_art = [i for i in range(m)
                if slack_col_of_row[i] is None or A[i, slack_col_of_row[i]] != ar.one]
    nart = len(need_art)
    ncols_all = ntot + nart

    T = ar.zeros((m, ncols_all + 1))
    if m:
        T[:, :ntot] = A
        T[:, -1] = b
    art_col_of_row = {}
    for k, i in enumerate(need_art):
        T[i, ntot + k] = ar.one
        art_col_of_row[i] = ntot + k
    basis = [art_col_of_row.get(i, slack_col_of_row[i]) for i in range(m)]

    if nart:
        c1 = ar.zeros(ncols_all)
        for k in range(nart):
            c1[ntot + k] = ar.one
        r = _price(ar, T, basis, c1)
        status = _pivot_loop(ar, cfg, T, r, basis, blocked=frozenset())
        if status != "optimal":
            raise SolverFailure("phase-1 simplex exhausted its pivot budget")
        obj = _objective(ar, T, basis, c1)
        feas_tol = ar.zero if ar.rational else 1e-8 * (
            1.0 + (float(np.max(np.abs(np.asarray(b, dtype=float)))) if m else 0.0))
        if obj > feas_tol:
            y = _duals(ar, T, basis, c1, slack_col_of_row, art_col_of_row, m)
            return {"status": "infeasible", "y": y}

    blocked = frozenset(range(ntot, ncols_all))
    c2 = ar.zeros(ncols_all)
    c2[:ntot] = cost
    r = _price(ar, T, basis, c2)
    status = _pivot_loop(ar, cfg, T, r, basis, blocked=blocked)
    if status == "iterations":
        raise SolverFailure("phase-2 simplex exhausted its pivot budget")
    if isinstance(status, tuple):  # ("unbounded", entering column)
        j = status[1]
        ray = [ar.zero] * ntot
        if j < ntot:
            ray[j] = ar.one
        for i in range(m):
            if basis[i] < ntot and T[i, j] != 0:
                ray[basis[i]] -= T[i, j]
        return {"status": "unbounded", "ray": ray}

    x = [ar.zero] * ntot
    for i in range(m):
        if basis[i] < ntot:
            x[basis[i]] = T[i, -1]
    y = _duals(ar, T, basis, c2, slack_col_of_row, art_col_of_row, m)
    return {"status": "optimal", "x": x, "y": y}


def _price(ar, T, basis, c):
    """Reduced-cost row r = c - c_B B^-1 A from the current tableau."""
    if T.shape[0] == 0:
        return np.array(c, copy=True)
    cb = np.array([c[basis[i]] for i in range(T.shape[0])], dtype=T.dtype)
    return c - cb @ T[:, :-1]


def _objective(ar, T, basis, c):
    s = ar.zero
    for i in range(T.shape[0]):
        s += c[basis[i]] * T[i, -1]
    return s


def _duals(ar, T, basis, c, slack_col_of_row, art_col_of_row, m):
    """y_i = c_j - r_j read from row i's original unit column j."""
    if m == 0:
        return []
    cb = np.array([c[basis[i]] for i in range(m)], dtype=T.dtype)
    y = []
    for i in range(m):
        j = art_col_of_row.get(i, slack_col_of_row[i])
        rj = c[j] - (cb @ T[:, j])
        y.append(c[j] - rj)
    return y


def _pivot_loop(ar, cfg, T, r, basis, blocked):
    """Bland-rule pivoting; mutates T, r and basis in place."""
    m = T.shape[0]
    ncols = T.shape[1] - 1
    eps = ar.zero if ar.rational else 1e-9
    piv_eps = ar.zero if ar.rational else 1e-11
    for _ in range(cfg.max_iter):
        enter = -1
        for j in range(ncols):
            if j in blocked:
                continue
            if r[j] < -eps:
                enter = j
                break
        if enter < 0:
            return "optimal"
        best_ratio = None
        leave = -1
        for i in range(m):
            ci = T[i, enter]
            if ci > piv_eps:
                ratio = T[i, -1] / ci
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return ("unbounded", enter)
        piv = T[leave, enter]
        T[leave, :] = T[leave, :] / piv
        col = np.array(T[:, enter], copy=True)
        col[leave] = ar.zero
        T -= np.outer(col, T[leave, :])
        T[:, enter] = ar.zero
        T[leave, enter] = ar.one
        re = r[enter]
        if re != 0:
            r -= re * T[leave, :-1]
        r[enter] = ar.zero
        basis[leave] = enter
    return "iterations"


# ---------------------------------------------------------------------------
# minimum-norm point over the simplex


@dataclass(frozen=True)
class MinNormResult:
    """Outcome of ``min_{mu in simplex} || sum_i mu_i u_i ||_p``.

    ``witness`` is a dual-unit functional w with margins <w, u_i> that
    certify the lower bound ``value - gap`` on the true minimum; it is
    None when the minimum is (numerically) zero, where no norming
    functional exists.  ``gap`` is the certified slack: 0 in rational
    mode, <= tol on normal float convergence, possibly larger when an
    early-exit target already decided the caller's question.  Rational
    mode fills ``mu_exact`` / ``value_sq_exact`` / ``witness_exact``
    (the latter a rational vector with an Exact scale factor).
    """

    mu: np.ndarray
    value: float
    witness: np.ndarray | None
    gap: float
    iterations: int
    converged: bool
    method: str
    mu_exact: tuple | None = None
    value_sq_exact: Fraction | None = None
    witness_exact: tuple | None = None


def min_norm_point(points, space: NormSpec, config: SolverConfig | None = None,
                   mu0=None, stop_margin: float | None = None,
                   stop_value: float | None = None) -> MinNormResult:
    """Minimize ``|| sum_i mu_i u_i ||_p`` over simplex weights mu.

    Float mode: away-step conditional gradient for p in (1, inf), LP
    reformulation for p in {1, inf}.  Rational mode: exact LP for p in
    {1, inf} and Wolfe's algorithm for p = 2; other exponents admit no
    exact arithmetic here and raise :class:`~marginlab.errors.InputError`.

    ``stop_margin`` / ``stop_value`` are optional early exits for the
    iterative path: return as soon as the certified lower bound
    (min witness margin) reaches stop_margin, or the current value drops
    to stop_value.  Certificates stay valid; only optimality is traded.
    """
    cfg = config or DEFAULT_CONFIG
    if not isinstance(space, NormSpec):
        raise InputError("space must be a NormSpec")
    X = as_points(points)
    if cfg.rational:
        if space.p == 2:
            return _wolfe_result(points, cfg)
        if space.p in (1, math.inf):
            return _min_norm_lp(points, X, space, cfg)
        raise InputError("rational arithmetic supports p in {1, 2, inf} only")
    if space.p in (1, math.inf):
        return _min_norm_lp(points, X, space, cfg)
    return _away_step_fw(X, space, cfg, mu0=mu0,
                         stop_margin=stop_margin, stop_value=stop_value)


# ---- away-step conditional gradient (float, 1 < p < inf) -------------------


def _line_search(a, b, p, t_max):
    """argmin over t in [0, t_max] of || a + t b ||_p for 1 < p < inf."""
    if t_max <= 0.0:
        return 0.0
    if p == 2.0:
        bb = float(b @ b)
        if bb <= 0.0:
            return 0.0
        t = -float(a @ b) / bb
        return min(max(t, 0.0), t_max)

    def g(t):
        # d/dt ||a + t b||_p^p up to the positive factor p
        v = a + t * b
        return float((np.sign(v) * np.abs(v) ** (p - 1.0)) @ b)

    lo, hi = 0.0, t_max
    if g(lo) >= 0.0:
        return 0.0
    if g(hi) <= 0.0:
        return t_max
    # Newton clipped into the shrinking bracket; g is increasing
    t = 0.5 * (lo + hi)
    for _ in range(60):
        v = a + t * b
        av = np.abs(v)
        gt = float((np.sign(v) * av ** (p - 1.0)) @ b)
        if gt < 0.0:
            lo = t
        else:
            hi = t
        if hi - lo <= 1e-14 * (1.0 + t_max):
            break
        gpt = float((p - 1.0) * (av ** (p - 2.0) @ (b * b))) if p >= 2.0 else 0.0
        if gpt > 0.0:
            t_new = t - gt / gpt
            t = t_new if lo < t_new < hi else 0.5 * (lo + hi)
        else:
            t = 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def _away_step_fw(X, space: NormSpec, cfg: SolverConfig, mu0=None,
                  stop_margin=None, stop_value=None) -> MinNormResult:
    n, _d = X.shape
    p = space.p
    if mu0 is None:
        mu = np.full(n, 1.0 / n)
    else:
        mu = as_simplex_weights(mu0)
        mu = mu / mu.sum()
    v = mu @ X
    gap = math.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        val = norm(v, space)
        if val < cfg.tol or (stop_value is not None and val <= stop_value):
            return MinNormResult(mu=mu, value=val, witness=None, gap=val,
                                 iterations=it, converged=True, method="away-fw")
        w = duality_map(v, space)
        margins = X @ w
        s = int(np.argmin(margins))
        gap = val - float(margins[s])
        if gap <= cfg.tol or (stop_margin is not None
                              and float(margins[s]) >= stop_margin):
            return MinNormResult(mu=mu, value=val, witness=w, gap=max(gap, 0.0),
                                 iterations=it, converged=True, method="away-fw")
        support = np.flatnonzero(mu > 0.0)
        a = int(support[np.argmax(margins[support])])
        away_gap = float(margins[a]) - val
        if gap >= away_gap or len(support) == 1:
            direction = X[s] - v
            t_max = 1.0
            drop = None
        else:
            direction = v - X[a]
            t_max = mu[a] / (1.0 - mu[a])
            drop = a
        t = _line_search(v, direction, p, t_max)
        if t <= 0.0:
            # descent stalled below float resolution; report honestly
            return MinNormResult(mu=mu, value=val, witness=w, gap=max(gap, 0.0),
                                 iterations=it, converged=gap <= cfg.tol,
                                 method="away-fw")
        if drop is None:
            mu *= (1.0 - t)
            mu[s] += t
        else:
            mu *= (1.0 + t)
            mu[drop] -= t
            if t >= t_max - 1e-15:
                mu[drop] = 0.0
        mu = np.clip(mu, 0.0, None)
        mu /= mu.sum()
        if it % 64 == 0:
            v = mu @ X
        else:
            v = v + t * direction
    val = norm(v, space)
    w = duality_map(v, space) if val > 0 else None
    raise SolverFailure(
        f"minimum-norm iteration budget exhausted at gap {gap:.3e}",
        best=MinNormResult(mu=mu, value=val, witness=w, gap=gap,
                           iterations=it, converged=False, method="away-fw"))


# ---- LP reformulations (p = 1 and p = inf) ---------------------------------


def _min_norm_lp(points, X, space: NormSpec, cfg: SolverConfig) -> MinNormResult:
    n, d = X.shape
    if cfg.rational:
        rows = [[to_fraction(x) for x in row] for row in points]
    else:
        rows = [[float(x) for x in row] for row in X]
    if space.p == 1:
        # vars mu (n), v+ (d), v- (d); min sum(v+ + v-)
        # eq rows: (X^T mu)_t - v+_t + v-_t = 0, then sum mu = 1
        c = [0] * n + [1] * (2 * d)
        A_eq = []
        b_eq = []
        for t in range(d):
            row = [rows[i][t] for i in range(n)]
            row += [-1 if k == t else 0 for k in range(d)]
            row += [1 if k == t else 0 for k in range(d)]
            A_eq.append(row)
            b_eq.append(0)
        A_eq.append([1] * n + [0] * (2 * d))
        b_eq.append(1)
        out = lp_solve(c, A_eq=A_eq, b_eq=b_eq, sense="min", config=cfg)
        if not isinstance(out, LpOptimal):
            raise SolverFailure("minimum-norm LP did not reach an optimum")
        # the d linking-row duals are exactly a dual-unit functional with
        # min_i <w, u_i> equal to the optimal value
        w_raw = list(out.duals["y_eq"][:d])
        method = "lp-l1"
    else:
        # vars mu (n), t; min t with -t <= (X^T mu)_j <= t as row pairs
        c = [0] * n + [1]
        A_ub = []
        b_ub = []
        for t_idx in range(d):
            col = [rows[i][t_idx] for i in range(n)]
            A_ub.append(col + [-1])
            b_ub.append(0)
            A_ub.append([-x for x in col] + [-1])
            b_ub.append(0)
        A_eq = [[1] * n + [0]]
        b_eq = [1]
        out = lp_solve(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                       sense="min", config=cfg)
        if not isinstance(out, LpOptimal):
            raise SolverFailure("minimum-norm LP did not reach an optimum")
        y_ub = out.duals["y_ub"]
        w_raw = [y_ub[2 * j] - y_ub[2 * j + 1] for j in range(d)]
        method = "lp-linf"

    q_is_inf = space.p == 1  # dual exponent
    mu_f = np.clip(np.array([float(v) for v in out.x[:n]], dtype=float), 0.0, None)
    mu_f /= mu_f.sum()
    value_f = float(out.value)

    if cfg.rational:
        mu_exact = tuple(to_fraction(v) for v in out.x[:n])
        value_exact = to_fraction(out.value)
        w_exact = [to_fraction(v) for v in w_raw]
        v_exact = [sum(mu_exact[i] * rows[i][t] for i in range(n)) for t in range(d)]
        if sum(we * ve for we, ve in zip(w_exact, v_exact)) < 0:
            w_exact = [-v for v in w_exact]
        if value_exact == 0:
            return MinNormResult(mu=mu_f, value=0.0, witness=None, gap=0.0,
                                 iterations=1, converged=True, method=method,
                                 mu_exact=mu_exact, value_sq_exact=Fraction(0),
                                 witness_exact=None)
        dual_norm = (max(abs(v) for v in w_exact) if q_is_inf
                     else sum(abs(v) for v in w_exact))
        mins = min(sum(we * rows[i][t] for t, we in enumerate(w_exact))
                   for i in range(n))
        if dual_norm > 1 or mins != value_exact:
            raise SolverFailure("exact minimum-norm witness failed verification")
        w_f = np.array([float(v) for v in w_exact], dtype=float)
        return MinNormResult(mu=mu_f, value=value_f, witness=w_f, gap=0.0,
                             iterations=1, converged=True, method=method,
                             mu_exact=mu_exact,
                             value_sq_exact=value_exact * value_exact,
                             witness_exact=(tuple(w_exact), Exact.rational(1)))

    Xf = np.asarray(X, dtype=float)
    vstar = mu_f @ Xf
    w = np.array([float(v) for v in w_raw], dtype=float)
    if float(w @ vstar) < 0:
        w = -w
    dual_norm = float(np.max(np.abs(w)) if q_is_inf else np.sum(np.abs(w)))
    if dual_norm > 1.0:
        w = w / dual_norm
    if value_f < cfg.tol:
        return MinNormResult(mu=mu_f, value=value_f, witness=None, gap=value_f,
                             iterations=1, converged=True, method=method)
    gap = value_f - float(np.min(Xf @ w))
    return MinNormResult(mu=mu_f, value=value_f, witness=w, gap=max(gap, 0.0),
                         iterations=1, converged=True, method=method)


# ---- Wolfe minimum-norm point (rational, p = 2) -----------------------------


def wolfe_min_norm_point(points, max_iter: int = 10_000):
    """Exact minimum-norm point of conv{points} in l2 over Fractions.

    Returns ``(mu, value_sq, v)``: simplex weights as Fractions,
    ||v||_2^2 as a Fraction, and the optimal point v itself.  Finite by
    Wolfe's corral argument; ``max_iter`` is a safety net only.
    """
    P = [[to_fraction(x) for x in row] for row in points]
    n = len(P)
    if n == 0:
        raise DegenerateInputError("need at least one point")
    d = len(P[0])
    for row in P:
        if len(row) != d:
            raise InputError("points must share one dimension")
    G = [[sum(P[i][t] * P[j][t] for t in range(d)) for j in range(n)]
         for i in range(n)]

    start = min(range(n), key=lambda i: (G[i][i], i))
    corral = [start]
    mu_c = [Fraction(1)]

    def q_of(j):
        return sum(mu_c[k] * G[corral[k]][j] for k in range(len(corral)))

    for _ in range(max_iter):
        xx = sum(mu_c[k] * q_of(corral[k]) for k in range(len(corral)))
        best_j, best_q = -1, None
        for j in range(n):
            qj = q_of(j)
            if best_q is None or qj < best_q:
                best_q, best_j = qj, j
        if best_q >= xx or best_j in corral:
            break
        corral.append(best_j)
        mu_c.append(Fraction(0))
        while True:
            alpha = _affine_min_norm(G, corral)
            if alpha is None:
                # affinely dependent corral: shed a zero-weight member
                drop = next((k for k in range(len(corral)) if mu_c[k] == 0),
                            len(corral) - 1)
                corral.pop(drop)
                mu_c.pop(drop)
                continue
            if all(a >= 0 for a in alpha):
                mu_c = list(alpha)
                break
            t = min(mu_c[k] / (mu_c[k] - alpha[k])
                    for k in range(len(corral)) if alpha[k] < 0)
            mu_c = [(1 - t) * mu_c[k] + t * alpha[k] for k in range(len(corral))]
            keep = [k for k in range(len(corral)) if mu_c[k] > 0]
            if len(keep) == len(corral):
                raise SolverFailure("exact contraction failed to shed a vertex")
            corral = [corral[k] for k in keep]
            mu_c = [mu_c[k] for k in keep]
    else:
        raise SolverFailure("minimum-norm iteration budget exhausted")

    mu = [Fraction(0)] * n
    for k, idx in enumerate(corral):
        mu[idx] += mu_c[k]
    v = [sum(mu[i] * P[i][t] for i in range(n)) for t in range(d)]
    value_sq = sum(vt * vt for vt in v)
    return tuple(mu), value_sq, tuple(v)


def _affine_min_norm(G, corral):
    """Exact min of ||sum a_i P_i||^2 over sum a_i = 1 with a free.

    KKT: G_SS a = theta 1 and 1^T a = 1; returns None when the corral is
    affinely dependent (singular system).
    """
    k = len(corral)
    M = [[G[corral[i]][corral[j]] for j in range(k)] + [Fraction(-1)]
         for i in range(k)]
    M.append([Fraction(1)] * k + [Fraction(0)])
    rhs = [Fraction(0)] * k + [Fraction(1)]
    sol = _solve_exact(M, rhs)
    if sol is None:
        return None
    return sol[:k]


def _solve_exact(M, rhs):
    """Gauss-Jordan over Fractions; None if singular."""
    k = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(k)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][k] for i in range(k)]


def _wolfe_result(points, cfg: SolverConfig) -> MinNormResult:
    mu_exact, value_sq, v_exact = wolfe_min_norm_point(points, max_iter=cfg.max_iter)
    mu = np.array([float(m) for m in mu_exact], dtype=float)
    value = math.sqrt(float(value_sq))
    if value_sq == 0:
        return MinNormResult(mu=mu, value=0.0, witness=None, gap=0.0,
                             iterations=1, converged=True, method="wolfe",
                             mu_exact=mu_exact, value_sq_exact=value_sq,
                             witness_exact=None)
    # witness w = v / ||v||: a rational vector under an Exact scale
    scale = Exact.sqrt(Fraction(1, 1) / value_sq)
    w = np.array([float(c) for c in v_exact], dtype=float) * float(scale)
    return MinNormResult(mu=mu, value=value, witness=w, gap=0.0,
                         iterations=1, converged=True, method="wolfe",
                         mu_exact=mu_exact, value_sq_exact=value_sq,
                         witness_exact=(v_exact, scale))
