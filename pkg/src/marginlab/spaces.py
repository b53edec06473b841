"""Ground spaces: finite-dimensional p-norms and finite metric spaces.

Two kinds of ground space appear throughout the package.  Vector samples
live in R^d under an l_p norm; metric samples live in an explicit finite
metric space given by a distance matrix.  This module holds the norm and
duality-map arithmetic, metric-axiom validation with deterministic
violation reporting, diameter normalization, and the JSON formats used by
the command line tools.

All functions are pure; spaces are immutable once constructed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, InputError
from .exact import Exact, to_fraction

__all__ = [
    "NormSpec",
    "norm",
    "norm_exact",
    "duality_map",
    "FiniteMetricSpace",
    "MetricCheck",
    "validate_metric",
    "diameter",
    "rescale_to_unit_diameter",
    "as_point",
    "as_points",
    "load_points",
    "dump_points",
    "load_metric_space",
    "dump_metric_space",
]


@dataclass(frozen=True)
class NormSpec:
    """An l_p norm on R^d, p in [1, inf].

    ``dual_exponent`` is the Holder conjugate q with 1/p + 1/q = 1; the
    pairing of the two is an involution (the dual of the dual is p).
    """

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise InputError(f"norm exponent must satisfy p >= 1, got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def dual_exponent(self) -> float:
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def dual(self) -> "NormSpec":
        return NormSpec(self.dual_exponent)

    def is_smooth(self) -> bool:
        """True for p in (1, inf), where the norm is differentiable away from 0."""
        return 1.0 < self.p < math.inf


def as_point(v) -> np.ndarray:
    """Validate one vector: 1-d, finite coordinates, float64."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"a point must be a 1-d coordinate vector, got shape {arr.shape}")
    if arr.size == 0:
        raise DegenerateInputError("a point needs at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise InputError("non-finite coordinate in point")
    return arr


def as_points(vs) -> np.ndarray:
    """Validate a family of equal-dimension vectors, returned as an (n, d) array."""
    arr = np.asarray(vs, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InputError(f"expected an (n, d) family of points, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DegenerateInputError("empty point family")
    if not np.all(np.isfinite(arr)):
        raise InputError("non-finite coordinate in point family")
    return arr


def norm(v, spec: NormSpec) -> float:
    """l_p norm of a vector, p from ``spec``."""
    arr = as_point(v)
    p = spec.p
    if math.isinf(p):
        return float(np.max(np.abs(arr)))
    if p == 1.0:
        return float(np.sum(np.abs(arr)))
    if p == 2.0:
        return float(np.linalg.norm(arr))
    return float(np.sum(np.abs(arr) ** p) ** (1.0 / p))


def norm_exact(v: Sequence, spec: NormSpec) -> Exact:
    """Exact l_p norm for rational coordinates, p in {1, 2, inf}.

    p = 2 returns sqrt of the exact sum of squares; other smooth exponents
    have no exact representation here and are rejected.
    """
    vals = [to_fraction(x) for x in v]
    if not vals:
        raise DegenerateInputError("a point needs at least one coordinate")
    p = spec.p
    if p == 1.0:
        return Exact.rational(sum(abs(x) for x in vals))
    if math.isinf(p):
        return Exact.rational(max(abs(x) for x in vals))
    if p == 2.0:
        return Exact.sqrt(sum(x * x for x in vals))
    raise InputError(f"exact norms support p in {{1, 2, inf}}, got p={p}")


def duality_map(v, spec: NormSpec) -> np.ndarray:
    """A norming functional for v: dual-norm(w) = 1 and <w, v> = norm(v).

    For p in (1, inf) the map is unique: w_j = sign(v_j) |v_j|^(p-1) / norm^(p-1).
    At the non-smooth exponents a deterministic subdifferential element is
    picked: for p = 1 the componentwise sign vector (zero off the support),
    for p = inf the sign on the single largest-magnitude coordinate, lowest
    index on ties.
    """
    arr = as_point(v)
    p = spec.p
    nv = norm(arr, spec)
    if nv == 0.0:
        raise InputError("the zero vector has no norming functional")
    if p == 1.0:
        return np.sign(arr)
    if math.isinf(p):
        j = int(np.argmax(np.abs(arr)))
        w = np.zeros_like(arr)
        w[j] = math.copysign(1.0, arr[j])
        return w
    return np.sign(arr) * (np.abs(arr) ** (p - 1.0)) / nv ** (p - 1.0)


# ---------------------------------------------------------------------------
# finite metric spaces


@dataclass(frozen=True)
class MetricCheck:
    """Outcome of a metric-axiom scan.

    ``ok`` is True when all axioms hold.  Otherwise ``kind`` is one of
    ``symmetry``, ``diagonal``, ``positivity``, ``triangle`` and ``indices``
    names the first offending entry in the documented scan order.  For a
    triangle violation the tuple (i, j, k) means d(i,k) > d(i,j) + d(j,k).
    """

    ok: bool
    kind: str | None = None
    indices: tuple[int, ...] | None = None

    def __bool__(self):
        return self.ok


def _matrix_rows(dist) -> list[list]:
    if isinstance(dist, np.ndarray):
        return [list(row) for row in dist]
    return [list(row) for row in dist]


def validate_metric(dist, exact: bool = False) -> MetricCheck:
    """Scan a candidate distance matrix for metric-axiom violations.

    Checks run in a fixed order -- symmetry, zero diagonal, positivity off
    the diagonal, then every triangle in lexicographic (i, j, k) order --
    and the first violation is reported, so the result is deterministic.
    The triangle scan is exhaustive, O(n^3); intended for n up to a few
    hundred points.

    With ``exact=True`` entries are taken as rationals (Fractions, ints or
    'a/b' strings) and all comparisons are exact; otherwise float64
    comparisons are used, with a vectorized pre-pass so the cubic Python
    scan only runs when a violation actually exists.
    """
    rows = _matrix_rows(dist)
    n = len(rows)
    if n == 0:
        raise DegenerateInputError("empty distance matrix")
    if any(len(r) != n for r in rows):
        raise InputError("distance matrix must be square")

    if exact:
        m = [[to_fraction(x) for x in r] for r in rows]
        return _scan_metric(m, n)

    arr = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputError("non-finite distance entry")
    # cheap full checks first; fall into the ordered scan only on failure
    sym_ok = np.array_equal(arr, arr.T)
    diag_ok = bool(np.all(np.diag(arr) == 0.0))
    off = arr + np.eye(n)
    pos_ok = bool(np.all(off > 0.0))
    tri_ok = True
    if sym_ok and diag_ok and pos_ok:
        # d(i,k) <= d(i,j) + d(j,k), broadcast over all (i, j, k) at once
        tri_ok = bool(np.all(arr[:, None, :] <= arr[:, :, None] + arr[None, :, :]))
    if sym_ok and diag_ok and pos_ok and tri_ok:
        return MetricCheck(True)
    return _scan_metric([list(map(float, r)) for r in rows], n)


def _scan_metric(m, n: int) -> MetricCheck:
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] != m[j][i]:
                return MetricCheck(False, "symmetry", (i, j))
    for i in range(n):
        if m[i][i] != 0:
            return MetricCheck(False, "diagonal", (i,))
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] <= 0:
                return MetricCheck(False, "positivity", (i, j))
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(n):
                if k == i or k == j:
                    continue
                if m[i][k] > m[i][j] + m[j][k]:
                    return MetricCheck(False, "triangle", (i, j, k))
    return MetricCheck(True)


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite metric space: point ids plus a validated distance matrix.

    ``dist`` is the float64 matrix used by numeric routines.  When the
    space was built from rational data, ``dist_exact`` carries the same
    matrix as Fractions for exact-arithmetic paths; otherwise it is None.
    """

    ids: tuple[str, ...]
    dist: np.ndarray
    dist_exact: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        if len(self.ids) != self.dist.shape[0]:
            raise InputError("ids and distance matrix sizes disagree")
        if len(set(self.ids)) != len(self.ids):
            raise InputError("point ids must be unique")
        self.dist.setflags(write=False)

    @classmethod
    def create(cls, ids: Sequence[str], dist, exact: bool = False,
               validate: bool = True) -> "FiniteMetricSpace":
        """Build a space, validating the metric axioms by default.

        ``exact=True`` keeps a Fraction copy of the matrix alongside the
        float one and validates with exact comparisons.
        """
        ids = tuple(str(s) for s in ids)
        rows = _matrix_rows(dist)
        if validate:
            check = validate_metric(rows, exact=exact)
            if not check.ok:
                raise InputError(
                    f"not a metric: {check.kind} violation at indices {check.indices}")
        exact_rows = None
        if exact:
            exact_rows = tuple(tuple(to_fraction(x) for x in r) for r in rows)
            arr = np.array([[float(x) for x in r] for r in exact_rows], dtype=float)
        else:
            arr = np.asarray(rows, dtype=float)
        return cls(ids, arr, exact_rows)

    @property
    def n(self) -> int:
        return len(self.ids)

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def index_of(self, point_id: str) -> int:
        try:
            return self.ids.index(point_id)
        except ValueError:
            raise InputError(f"unknown point id {point_id!r}") from None


def diameter(space: FiniteMetricSpace) -> float:
    if space.n < 2:
        raise DegenerateInputError("diameter needs at least two points")
    return float(np.max(space.dist))


def rescale_to_unit_diameter(space: FiniteMetricSpace, force: bool = False) -> FiniteMetricSpace:
    """Divide all distances by the diameter so it becomes exactly 1.

    Spaces whose diameter is already <= 1 are returned unchanged unless
    ``force`` is set.
    """
    diam = diameter(space)
    if diam <= 1.0 and not force:
        return space
    exact = None
    if space.dist_exact is not None:
        diam_exact = max(max(row) for row in space.dist_exact)
        exact = tuple(tuple(x / diam_exact for x in row) for row in space.dist_exact)
        arr = np.array([[float(x) for x in row] for row in exact], dtype=float)
    else:
        arr = space.dist / diam
    return FiniteMetricSpace(space.ids, arr, exact)


# ---------------------------------------------------------------------------
# JSON formats
#
# Point sets:     {"points": [[...], ...]}
# Metric spaces:  {"ids": ["a", ...], "dist": [[...], ...]}
#
# Exact files may carry rational entries as "a/b" strings; loaders accept
# numbers and strings interchangeably.


def _entry_to_json(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def load_points(source) -> np.ndarray:
    """Read a point set from a path, file object or already-parsed dict."""
    obj = _load_json(source)
    if "points" not in obj:
        raise InputError("point-set JSON must have a 'points' field")
    pts = [[float(to_fraction(x)) if isinstance(x, str) else float(x) for x in row]
           for row in obj["points"]]
    return as_points(pts)


def dump_points(points, path) -> None:
    arr = as_points(points)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"points": [list(map(float, row)) for row in arr]}, fh, indent=1)
        fh.write("\n")


def load_metric_space(source, exact: bool = False, validate: bool = True) -> FiniteMetricSpace:
    obj = _load_json(source)
    if "dist" not in obj:
        raise InputError("metric-space JSON must have a 'dist' field")
    n = len(obj["dist"])
    ids = obj.get("ids") or [f"x{i}" for i in range(n)]
    rows = [[to_fraction(x) if exact or isinstance(x, str) else x for x in row]
            for row in obj["dist"]]
    if not exact:
        rows = [[float(x) for x in row] for row in rows]
    return FiniteMetricSpace.create(ids, rows, exact=exact, validate=validate)


def dump_metric_space(space: FiniteMetricSpace, path) -> None:
    if space.dist_exact is not None:
        dist = [[_entry_to_json(x) for x in row] for row in space.dist_exact]
    else:
        dist = [list(map(float, row)) for row in space.dist]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"ids": list(space.ids), "dist": dist}, fh, indent=1)
        fh.write("\n")


def _load_json(source):
    if isinstance(source, dict):
        return source
    if hasattr(source, "read"):
        return json.load(source)
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)
