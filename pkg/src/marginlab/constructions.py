"""Reference constructions with predicted certificates.

Each constructor returns a :class:`ConstructionBundle`: the object (a
point set, a metric space, or an oracle), the margin at which something
is predicted to happen, the predicted verdict, and any named witnesses.
The decision procedures must reproduce the predicted verdict; tests
treat that as a golden contract.

The constructions: scaled Hadamard rows (a square-root-rate shattered
set for every p-norm), standard basis vectors (the tight rate for
p <= 2), a two-radius metric space whose subsets are shattered by
ball-pair concepts, a three-distance metric space whose labelings are
realized by explicit half-difference distance combinations, and the
coordinate-threshold class whose dimension profile follows a chosen
growth function.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classes import (
    BallPairParams,
    PhiOracle,
    PhiSpec,
    oracle_to_json,
)
from .errors import InputError
from .exact import Exact, to_fraction
from .spaces import FiniteMetricSpace, NormSpec, validate_metric

__all__ = [
    "HadamardMatrix",
    "ConstructionBundle",
    "sylvester_hadamard",
    "hadamard_shattered_set",
    "standard_basis_set",
    "intro_counterexample_space",
    "gamma_counterexample_space",
    "phi_class_truncation",
    "bundle_to_json",
    "dump_bundle",
]


@dataclass(frozen=True)
class HadamardMatrix:
    """A +-1 matrix of order n = 2^m with pairwise orthogonal rows."""

    order: int
    entries: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.entries, dtype=np.int64)
        n = self.order
        if H.shape != (n, n):
            raise InputError("entry matrix must be order x order")
        if not np.isin(H, (-1, 1)).all():
            raise InputError("entries must be +-1")
        if not np.array_equal(H @ H.T, n * np.eye(n, dtype=np.int64)):
            raise InputError("rows are not orthogonal")
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)


@dataclass(frozen=True)
class ConstructionBundle:
    """A constructed object together with its predicted certificate.

    ``predicted_status`` is one of Shattered, NotShattered, MetricValid,
    MetricInvalid; ``provenance`` names the construction recipe.
    ``witnesses`` carries any named realizing functions (as reusable
    witness dicts keyed by labeling), ``params`` the construction
    parameters, ``note`` free-form caveats.
    """

    kind: str
    obj: object
    predicted_status: str
    provenance: str
    predicted_gamma: float | None = None
    predicted_gamma_exact: object = None
    witnesses: dict | None = None
    params: dict | None = None
    note: str = ""


def sylvester_hadamard(m: int) -> HadamardMatrix:
    """The order-2^m Hadamard matrix from the doubling recursion.

    H_1 = [1] and H_{2n} = [[H, H], [H, -H]]; integer arithmetic, with
    the orthogonality H H^T = n I checked exactly on return.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 0):
        raise InputError("m must be a nonnegative integer")
    if m > 13:
        raise InputError("orders above 2^13 are not supported")
    H = np.array([[1]], dtype=np.int64)
    for _ in range(m):
        H = np.block([[H, H], [H, -H]])
    return HadamardMatrix(order=1 << m, entries=H)


def hadamard_shattered_set(m: int, p) -> ConstructionBundle:
    """n = 2^m unit vectors in l_p^n predicted shattered at 1/sqrt(n).

    Rows of the order-n Hadamard matrix scaled by n^(-1/p), so each row
    has l_p norm exactly 1.  For p >= 2 row orthogonality forces every
    signed unit-mass combination to have norm at least 1/sqrt(n).  Below
    p = 2 that bound fails (uniform weights on the all-plus pattern
    reach only n^(-1/p) < 1/sqrt(n), and the l_p >= l_2 comparison shows
    nothing goes lower), so the predicted margin drops to n^(-1/p)
    there; the basis construction is the sharp-rate one in that range,
    hence the note.
    """
    if m < 1:
        raise InputError("m must be at least 1")
    pf = float(p)
    if not pf >= 1:
        raise InputError("p must be at least 1")
    H = sylvester_hadamard(m)
    n = H.order
    scale = float(n) ** (-1.0 / pf)
    points = H.entries.astype(float) * scale
    exact = None
    if pf == 1:
        s = Fraction(1, n)
        exact = tuple(tuple(s * int(v) for v in row) for row in H.entries)
    elif pf == 2 and m % 2 == 0:
        s = Fraction(1, 1 << (m // 2))
        exact = tuple(tuple(s * int(v) for v in row) for row in H.entries)
    note = ""
    if pf < 2:
        gamma = float(n) ** (-1.0 / pf)
        gamma_exact = Exact.rational(Fraction(1, n)) if pf == 1 else None
        note = ("below p = 2 the threshold drops to n^(-1/p) and the "
                "square-root rate is lost; the standard basis attains "
                "the better rate there")
    else:
        gamma = 1.0 / math.sqrt(n)
        gamma_exact = Exact.sqrt(Fraction(1, n))
    return ConstructionBundle(
        kind="hadamard_shattered_set",
        obj={"points": points, "points_exact": exact, "space": NormSpec(pf)},
        predicted_status="Shattered",
        predicted_gamma=gamma,
        predicted_gamma_exact=gamma_exact,
        params={"m": m, "p": pf, "n": n},
        provenance="scaled Hadamard rows: unit l_p vectors whose signed "
                   "combinations keep norm at least the predicted margin",
        note=note,
    )


def standard_basis_set(n: int, p) -> ConstructionBundle:
    """The n standard basis vectors, predicted shattered at n^(1/p - 1).

    For any signs, the minimum-norm simplex combination is the uniform
    one with value n^(1/p - 1) exactly, so the set is shattered at that
    margin (closed comparison) and not at any larger one; the uniform
    weights are the collapse certificate above the threshold.
    """
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InputError("n must be a positive integer")
    pf = float(p)
    if not pf >= 1:
        raise InputError("p must be at least 1")
    points = np.eye(int(n))
    exact = tuple(tuple(Fraction(1 if i == j else 0) for j in range(n))
                  for i in range(n))
    if math.isinf(pf):
        gamma = 1.0 / n
        gamma_exact = Exact.rational(Fraction(1, int(n)))
    else:
        gamma = float(n) ** (1.0 / pf - 1.0)
        gamma_exact = None
        if pf == 1:
            gamma_exact = Exact.rational(Fraction(1))
        elif pf == 2:
            gamma_exact = Exact.sqrt(Fraction(1, int(n)))
    return ConstructionBundle(
        kind="standard_basis_set",
        obj={"points": points, "points_exact": exact, "space": NormSpec(pf)},
        predicted_status="Shattered",
        predicted_gamma=gamma,
        predicted_gamma_exact=gamma_exact,
        params={"n": int(n), "p": pf},
        provenance="standard basis vectors: uniform weights minimize the "
                   "signed combination at value n^(1/p-1)",
    )


def _snap(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**6)
    return to_fraction(x)


def _mask_str(mask: int, k: int) -> str:
    return format(mask, f"0{k}b")


def _mask_members(mask: int, k: int):
    s = _mask_str(mask, k)
    return [i for i in range(k) if s[i] == "1"]


def intro_counterexample_space(k: int, r, R,
                               include_empty: bool = False) -> ConstructionBundle:
    """Two-radius space whose point subsets are ball-pair shattered.

    Points a_1..a_k plus one point b_S per subset S (nonempty unless
    ``include_empty``), with d(a_i, b_S) = r for members, R otherwise,
    and (r + R)/2 between any two points of the same family.  The
    triangle inequality holds exactly when R <= 3r; then the center b_S
    realizes the labeling +1 on S, -1 off S with radii (r, R).

    Subset ids are "b" followed by the k-bit membership mask, a_1 first;
    masks run in binary-counter order.  Distances are rationals so the
    R = 3r boundary validates exactly.
    """
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= 12):
        raise InputError("k must be an integer in [1, 12]")
    rq, Rq = _snap(r), _snap(R)
    if not (0 < rq < Rq):
        raise InputError("radii must satisfy 0 < r < R")
    mid = (rq + Rq) / 2
    masks = list(range(0 if include_empty else 1, 1 << k))
    ids = [f"a{i + 1}" for i in range(k)] + [f"b{_mask_str(s, k)}" for s in masks]
    n = len(ids)
    dist = [[Fraction(0)] * n for _ in range(n)]

    def member(i: int, mask: int) -> bool:
        return (mask >> (k - 1 - i)) & 1 == 1

    for u in range(n):
        for v in range(u + 1, n):
            if u < k and v < k:
                d = mid
            elif u >= k and v >= k:
                d = mid
            else:
                i, mask = u, masks[v - k]
                d = rq if member(i, mask) else Rq
            dist[u][v] = dist[v][u] = d
    space = FiniteMetricSpace.create(ids, dist, exact=True, validate=False)
    valid = Rq <= 3 * rq
    witnesses = None
    if valid:
        witnesses = {}
        for pos, mask in enumerate(masks):
            labels = tuple(1 if member(i, mask) else -1 for i in range(k))
            witnesses[labels] = {"type": "center", "index": k + pos,
                                 "id": ids[k + pos],
                                 "r": float(rq), "R": float(Rq)}
    return ConstructionBundle(
        kind="intro_counterexample_space",
        obj=space,
        predicted_status="MetricValid" if valid else "MetricInvalid",
        params={"k": int(k), "r": str(rq), "R": str(Rq),
                "include_empty": bool(include_empty),
                "ball_pair": {"r": float(rq), "R": float(Rq)}},
        witnesses=witnesses,
        provenance="two-radius subset space: each subset center is at "
                   "distance r from members and R from non-members",
        note="" if valid else "triangle inequality fails whenever R > 3r",
    )


def intro_ball_pair_params(bundle: ConstructionBundle) -> BallPairParams:
    bp = bundle.params["ball_pair"]
    return BallPairParams(r=bp["r"], R=bp["R"])


def gamma_counterexample_space(k: int, gamma) -> ConstructionBundle:
    """Three-distance space realizing every labeling at margin gamma.

    Points a_1..a_k plus two mirrored points b1_S, b2_S per subset
    S (all 2^k of them).  All same-family and b-to-b distances are 2/3;
    d(a_i, b1_S) is 2/3 - gamma for members and 2/3 + gamma otherwise,
    with b2_S mirrored.  The diameter is 2/3 + gamma <= 1 and the
    triangle inequality holds exactly when gamma <= 1/3.

    For every subset S the half-difference delta_S = (d_{b1_S} -
    d_{b2_S})/2 takes value -gamma on S and +gamma off S, so the
    labeling -1 on S, +1 elsewhere is realized at margin gamma by a
    unit-mass distance combination; these are the named witnesses.
    """
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= 10):
        raise InputError("k must be an integer in [1, 10]")
    g = _snap(gamma)
    if not (0 < g < Fraction(2, 3)):
        raise InputError("gamma must lie in (0, 2/3) for positive distances")
    base = Fraction(2, 3)
    masks = list(range(1 << k))
    ids = ([f"a{i + 1}" for i in range(k)]
           + [f"b1{_mask_str(s, k)}" for s in masks]
           + [f"b2{_mask_str(s, k)}" for s in masks])
    n = len(ids)

    def member(i: int, mask: int) -> bool:
        return (mask >> (k - 1 - i)) & 1 == 1

    dist = [[Fraction(0)] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if u < k and v < k:
                d = base
            elif u >= k and v >= k:
                d = base
            else:
                i = u
                if v < k + (1 << k):
                    mask, sign = masks[v - k], 1
                else:
                    mask, sign = masks[v - k - (1 << k)], -1
                inside = member(i, mask)
                d = base - g if (inside if sign == 1 else not inside) else base + g
            dist[u][v] = dist[v][u] = d
    space = FiniteMetricSpace.create(ids, dist, exact=True, validate=False)
    valid = g <= Fraction(1, 3)
    witnesses = {}
    half = Fraction(1, 2)
    for mask in masks:
        labels = tuple(-1 if member(i, mask) else 1 for i in range(k))
        witnesses[labels] = {
            "type": "coeffs", "variant": "full",
            "centers": [k + mask, k + (1 << k) + mask],
            "center_ids": [ids[k + mask], ids[k + (1 << k) + mask]],
            "coeffs": [half, -half],
        }
    return ConstructionBundle(
        kind="gamma_counterexample_space",
        obj=space,
        predicted_status="MetricValid" if valid else "MetricInvalid",
        predicted_gamma=float(g),
        predicted_gamma_exact=Exact.rational(g),
        params={"k": int(k), "gamma": str(g)},
        witnesses=witnesses,
        provenance="three-distance subset space: half-differences of the "
                   "two mirrored subset points realize every labeling",
        note="" if valid else "triangle inequality fails whenever gamma > 1/3",
    )


def phi_class_truncation(spec: PhiSpec, gammas=None) -> ConstructionBundle:
    """Coordinate-threshold oracle whose dimension profile follows phi.

    The class over {1..N} with per-coordinate caps chosen so the number
    of coordinates with cap >= gamma is exactly min(phi(gamma), N);
    consequently {1..m} is gamma-shattered precisely when m is at most
    that count.  ``witnesses`` maps each grid margin to the predicted
    dimension.
    """
    if not isinstance(spec, PhiSpec):
        raise InputError("spec must be a PhiSpec")
    if spec.N > 10**6:
        raise InputError("domain truncation above 10^6 is not supported")
    if gammas is None:
        gammas = tuple(Fraction(1, j) for j in range(2, 11))
    grid = tuple(gammas)
    if not grid:
        raise InputError("margin grid must be nonempty")
    dims = {}
    for g in grid:
        gq = _snap(g)
        if not 0 < gq < 1:
            raise InputError("grid margins must lie in (0, 1)")
        dims[gq] = min(spec.phi(gq), spec.N)
    first = _snap(grid[0])
    return ConstructionBundle(
        kind="phi_class_truncation",
        obj=PhiOracle(spec=spec),
        predicted_status="Shattered",
        predicted_gamma=float(first),
        predicted_gamma_exact=Exact.rational(first),
        params={"preset": spec.preset, "N": spec.N,
                **({"k": spec.k} if spec.k is not None else {})},
        witnesses={"dims": {str(g): d for g, d in dims.items()}},
        provenance="coordinate-threshold class truncated to {1..N}: the "
                   "count of caps at or above gamma is the dimension",
    )


# ---------------------------------------------------------------------------
# serialization


def _json_val(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Exact):
        return {"coef": str(x.coef), "rad": str(x.rad)}
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_json_val(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_json_val(v) for v in x]
    if isinstance(x, dict):
        return {(k if isinstance(k, str) else ",".join(map(str, k))
                 if isinstance(k, tuple) else str(k)): _json_val(v)
                for k, v in x.items()}
    return x


def bundle_to_json(bundle: ConstructionBundle) -> dict:
    obj = bundle.obj
    if isinstance(obj, FiniteMetricSpace):
        if obj.dist_exact is not None:
            dist = [[str(x) if x.denominator != 1 else x.numerator
                     for x in row] for row in obj.dist_exact]
        else:
            dist = [[float(x) for x in row] for row in obj.dist]
        obj_json = {"ids": list(obj.ids), "dist": dist}
    elif isinstance(obj, PhiOracle):
        obj_json = {"class": oracle_to_json(obj)}
    elif isinstance(obj, dict) and "points" in obj:
        space = obj["space"]
        pts_exact = obj.get("points_exact")
        obj_json = {
            "points": [[float(v) for v in row] for row in obj["points"]],
            "space": {"p": "inf" if math.isinf(space.p) else space.p},
        }
        if pts_exact is not None:
            obj_json["points_exact"] = [[str(v) for v in row]
                                        for row in pts_exact]
    else:
        raise InputError(f"cannot serialize bundle object {type(obj).__name__}")
    out = {
        "kind": bundle.kind,
        "object": obj_json,
        "predicted_status": bundle.predicted_status,
        "predicted_gamma": bundle.predicted_gamma,
        "predicted_gamma_exact": _json_val(bundle.predicted_gamma_exact),
        "params": _json_val(bundle.params),
        "provenance": bundle.provenance,
        "note": bundle.note,
    }
    if bundle.witnesses is not None:
        out["witnesses"] = _json_val(bundle.witnesses)
    return out


def dump_bundle(bundle: ConstructionBundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle_to_json(bundle), fh, indent=1)
        fh.write("\n")


def check_bundle_metric(bundle: ConstructionBundle) -> bool:
    """Re-run the axiom scan on a bundle's metric space; True when valid."""
    space = bundle.obj
    if not isinstance(space, FiniteMetricSpace):
        raise InputError("bundle does not hold a metric space")
    if space.dist_exact is not None:
        return bool(validate_metric(space.dist_exact, exact=True))
    return bool(validate_metric(space.dist))
