"""Convex bodies in V-representation and their primitive queries.

Bodies are polytopes (finite vertex lists), norm balls, or translates of
another body.  The V-representation is load-bearing: every supremum of a
convex function over a body becomes a finite maximum over vertices, and
every infimum a small convex program over convex-combination weights.

Balls are kept exact only when the ambient p-norm admits an exact support
formula (p = 2) or an exact polytope conversion (p = 1: cross-polytope,
p = inf: box).  For other p a ball in dimension two is replaced by an
inscribed polygon with a recorded Hausdorff error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._opt import lp_pair_distance, min_norm_point, fw_pnorm_distance, Certificate
from .norms import DimensionMismatch, NormSpec, dual_maximizer, dual_norm, norm

__all__ = [
    "Polytope",
    "Ball",
    "Translate",
    "Body",
    "BodyPair",
    "UnsupportedBody",
    "vertices",
    "body_dim",
    "resolve",
    "as_vertex_body",
    "contains",
    "dist_to_body",
    "support",
    "convex_hull",
    "translate_offset",
    "TranslateOffset",
    "sample",
    "body_to_dict",
    "body_from_dict",
]

BALL_POLYGON_SIDES = 64


class UnsupportedBody(ValueError):
    """Body representation not supported under the ambient norm."""


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of finitely many points, stored as a (k, n) vertex array."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("polytope needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise ValueError("polytope vertices must be finite")
        object.__setattr__(self, "vertices", v)


@dataclass(frozen=True, eq=False)
class Ball:
    """Norm ball {x : ||x - center|| <= radius} in the ambient norm."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValueError("ball center must be finite")
        if not (self.radius >= 0.0 and math.isfinite(self.radius)):
            raise ValueError("ball radius must be finite and nonnegative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True, eq=False)
class Translate:
    """A body shifted by a fixed vector."""

    base: "Body"
    shift: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.shift, dtype=float).reshape(-1)
        if s.shape[0] != body_dim(self.base):
            raise DimensionMismatch("translate shift dimension mismatch")
        object.__setattr__(self, "shift", s)


Body = Union[Polytope, Ball, Translate]


def body_dim(body: Body) -> int:
    if isinstance(body, Polytope):
        return body.vertices.shape[1]
    if isinstance(body, Ball):
        return body.center.shape[0]
    return body_dim(body.base)


def resolve(body: Body) -> Union[Polytope, Ball]:
    """Flatten nested translates into a plain polytope or ball."""
    if isinstance(body, Translate):
        base = resolve(body.base)
        if isinstance(base, Polytope):
            return Polytope(base.vertices + body.shift)
        return Ball(base.center + body.shift, base.radius)
    return body


def _pball_polygon(center: np.ndarray, radius: float, spec: NormSpec) -> Polytope:
    # Inscribed polygon for a 2-D p-ball, p not in {1, 2, inf}.
    thetas = 2.0 * math.pi * np.arange(BALL_POLYGON_SIDES) / BALL_POLYGON_SIDES
    u = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    u = u / norm(u, spec)[:, None]
    return Polytope(center + radius * u)


def pball_polygon_error(spec: NormSpec) -> float:
    """Hausdorff error bound of the inscribed polygon for a unit 2-D p-ball."""
    thetas = 2.0 * math.pi * (np.arange(BALL_POLYGON_SIDES) + 0.5) / BALL_POLYGON_SIDES
    u = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    u = u / norm(u, spec)[:, None]
    err = 0.0
    poly = _pball_polygon(np.zeros(2), 1.0, spec).vertices
    for x in u:
        err = max(err, dist_to_body(x, Polytope(poly), spec, tol=1e-6)[0])
    return err


def as_vertex_body(body: Body, spec: NormSpec) -> Union[Polytope, Ball]:
    """Resolve to a polytope, or an exact p=2 ball.

    Balls under p in {1, inf} convert exactly (cross-polytope / box); balls
    under other finite p != 2 are approximated in dimension two only.
    """
    b = resolve(body)
    if isinstance(b, Polytope):
        return b
    n = b.center.shape[0]
    w = spec.weight_array()
    wa = np.ones(n) if w is None else w
    if spec.is_inf:
        # Box with half-widths radius / w_i.
        corners = np.array(
            [[b.center[i] + s * b.radius / wa[i] for i, s in enumerate(signs)]
             for signs in _sign_patterns(n)]
        )
        return Polytope(corners)
    if spec.p == 1.0:
        pts = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = b.radius / wa[i]
            pts.append(b.center + e)
            pts.append(b.center - e)
        return Polytope(np.array(pts))
    if spec.p == 2.0:
        return b
    if n == 2:
        return _pball_polygon(b.center, b.radius, spec)
    raise UnsupportedBody(
        f"balls under p={spec.p} are supported exactly only for p in (1,2,inf); "
        "dimension-2 polygon fallback does not apply here"
    )


def _sign_patterns(n: int):
    for mask in range(1 << n):
        yield [1.0 if mask & (1 << i) else -1.0 for i in range(n)]


def vertices(body: Body, spec: NormSpec) -> np.ndarray:
    """Vertex array of the polytope form; raises for exact balls."""
    b = as_vertex_body(body, spec)
    if isinstance(b, Ball):
        raise UnsupportedBody("exact ball has no finite vertex list")
    return b.vertices


@dataclass(frozen=True, eq=False)
class BodyPair:
    """The pair (A, B) together with its ambient norm."""

    A: Body
    B: Body
    norm: NormSpec

    def __post_init__(self):
        da, db = body_dim(self.A), body_dim(self.B)
        if da != db or da != self.norm.dim:
            raise DimensionMismatch(
                f"pair dimensions ({da}, {db}) must match norm dimension {self.norm.dim}"
            )

    def swapped(self) -> "BodyPair":
        return BodyPair(self.B, self.A, self.norm)


def dist_to_body(x, body: Body, spec: NormSpec, tol: float = 1e-9):
    """Distance from a point to a body in the ambient norm.

    Returns (distance, nearest_point, certificate).  Polytopes are handled by
    a certified convex solve matched to p (quadratic min-norm point for p=2,
    linear program for p in {1, inf}, first-order descent otherwise).
    """
    xv = np.asarray(x, dtype=float).reshape(-1)
    b = as_vertex_body(body, spec)
    if isinstance(b, Ball):
        r = float(norm(xv - b.center, spec))
        if r <= b.radius:
            return 0.0, xv.copy(), Certificate("analytic-ball", 0.0, 0, True)
        q = b.center + (b.radius / r) * (xv - b.center)
        return r - b.radius, q, Certificate("analytic-ball", 0.0, 0, True)
    V = b.vertices
    if spec.p == 2.0:
        gap_tol = max(tol * tol * 0.25, 1e-15)
        d, z, nu, cert = min_norm_point(V - xv, weights=spec.weight_array(), gap_tol=gap_tol)
        return d, xv + z, cert
    if spec.p == 1.0 or spec.is_inf:
        d, _, y, cert = lp_pair_distance(xv[None, :], V, spec)
        return d, y, cert
    d, _, y, cert = fw_pnorm_distance(xv[None, :], V, spec, tol=tol)
    return d, y, cert


def contains(body: Body, v, spec: NormSpec, tol: float = 1e-9) -> bool:
    """Whether ``v`` lies within ``tol`` of the body in the ambient norm."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    xv = np.asarray(v, dtype=float).reshape(-1)
    if xv.shape[0] != body_dim(body):
        raise DimensionMismatch("point dimension does not match body")
    # Exact-path norms (p in {1, 2, inf}) solve to machine precision; the
    # general-p route only needs the distance at half the membership scale.
    solve_tol = min(tol, 1e-9) if spec.p in (1.0, 2.0) or spec.is_inf else 0.5 * tol
    d, _, _ = dist_to_body(xv, body, spec, tol=solve_tol)
    return d <= tol


def support(body: Body, direction, spec: NormSpec):
    """Maximize <direction, .> over the body.

    Returns (value, argpoint).  For polytopes the argpoint is a vertex with
    ties broken by lowest vertex index; for balls it is
    center + radius * (dual-norm maximizer).
    """
    d = np.asarray(direction, dtype=float).reshape(-1)
    if not np.any(d != 0.0):
        raise ValueError("support direction must be nonzero")
    b = as_vertex_body(body, spec)
    if isinstance(b, Ball):
        u = dual_maximizer(d, spec)
        val = float(d @ b.center) + b.radius * dual_norm(d, spec)
        return val, b.center + b.radius * u
    scores = b.vertices @ d
    i = int(np.argmax(scores))
    return float(scores[i]), b.vertices[i].copy()


# ---------------------------------------------------------------------------
# Convex hull with redundant-vertex removal
# ---------------------------------------------------------------------------

def _dedup(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # Straightforward O(k^2) pass; k is small throughout this package.
    out = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return np.array(out)


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """2-D convex hull in counter-clockwise order, collinear points dropped."""
    pts = sorted(map(tuple, points))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _affine_rank(points: np.ndarray, tol: float = 1e-10) -> int:
    if points.shape[0] <= 1:
        return 0
    diff = points[1:] - points[0]
    return int(np.linalg.matrix_rank(diff, tol=tol))


def convex_hull(points) -> Polytope:
    """Polytope with redundant points removed.

    No returned vertex is a convex combination of the others.  Degenerate
    inputs (single point, collinear sets) are first-class.  Dimension two
    uses the monotone chain; higher dimensions remove redundancy with one
    feasibility solve per candidate vertex.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("convex_hull of empty input")
    pts = _dedup(pts)
    if pts.shape[0] == 1:
        return Polytope(pts)
    rank = _affine_rank(pts)
    if rank == 0:
        return Polytope(pts[:1])
    if rank == 1:
        u = pts[1:] - pts[0]
        direction = u[np.argmax(np.einsum("ij,ij->i", u, u))]
        t = (pts - pts[0]) @ direction
        return Polytope(np.array([pts[int(np.argmin(t))], pts[int(np.argmax(t))]]))
    if pts.shape[1] == 2:
        return Polytope(_monotone_chain(pts))
    keep = _lp_extreme_filter(pts)
    return Polytope(pts[keep])


def _lp_extreme_filter(pts: np.ndarray) -> list:
    from scipy.optimize import linprog

    k, n = pts.shape
    keep = []
    for i in range(k):
        others = np.delete(np.arange(k), i)
        A_eq = np.vstack([pts[others].T, np.ones(k - 1)])
        b_eq = np.concatenate([pts[i], [1.0]])
        res = linprog(
            np.zeros(k - 1), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (k - 1),
            method="highs",
        )
        feasible = res.status == 0 and res.x is not None
        if feasible:
            # Guard against LP tolerance: re-verify the combination.
            x = pts[others].T @ res.x
            feasible = float(np.max(np.abs(x - pts[i]))) <= 1e-7
        if not feasible:
            keep.append(i)
    return keep if keep else [0]


# ---------------------------------------------------------------------------
# Translate detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TranslateOffset:
    """Shift h with B = A + h, plus the ||h|| = d(A, B) check outcome."""

    h: np.ndarray
    h_norm: float
    d: float
    norm_matches_d: bool


def _match_vertex_sets(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    used = np.zeros(B.shape[0], dtype=bool)
    for a in A:
        hit = -1
        for j in range(B.shape[0]):
            if not used[j] and np.max(np.abs(a - B[j])) <= tol:
                hit = j
                break
        if hit < 0:
            return False
        used[hit] = True
    return bool(used.all())


def translate_offset(pair: BodyPair, tol: float = 1e-9) -> Optional[TranslateOffset]:
    """Detect B = A + h; returns the shift and whether ||h|| equals d(A, B).

    Polytopes are compared by canonical vertex sets, balls by center and
    radius.  Absence of a translate relation is encoded as None.
    """
    a = resolve(pair.A)
    b = resolve(pair.B)
    if isinstance(a, Ball) and isinstance(b, Ball):
        if abs(a.radius - b.radius) > tol:
            return None
        h = b.center - a.center
    elif isinstance(a, Polytope) and isinstance(b, Polytope):
        va = convex_hull(a.vertices).vertices
        vb = convex_hull(b.vertices).vertices
        if va.shape[0] != vb.shape[0]:
            return None
        h = vb.mean(axis=0) - va.mean(axis=0)
        if not _match_vertex_sets(va + h, vb, tol) or not _match_vertex_sets(vb - h, va, tol):
            return None
    else:
        return None
    from .metrics import pair_distance  # local import to avoid a module cycle

    d = pair_distance(pair, tol=1e-9).d
    hn = float(norm(h, pair.norm))
    return TranslateOffset(h=h, h_norm=hn, d=d, norm_matches_d=abs(hn - d) <= max(tol, 1e-9))


# ---------------------------------------------------------------------------
# Seeded sampling
# ---------------------------------------------------------------------------

def sample(body: Body, count: int, seed: int, spec: NormSpec) -> np.ndarray:
    """Deterministic points of the body, shape (count, dim).

    Polytopes are sampled by Dirichlet-weighted convex combinations of the
    vertices, exact balls (p = 2) by the usual radial construction in the
    weighted metric.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    b = as_vertex_body(body, spec)
    if isinstance(b, Polytope):
        k = b.vertices.shape[0]
        if k == 1:
            return np.repeat(b.vertices, count, axis=0)
        lam = rng.dirichlet(np.ones(k), size=count)
        return lam @ b.vertices
    n = b.center.shape[0]
    w = spec.weight_array()
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = rng.random(count) ** (1.0 / n)
    u = g * rad[:, None]
    if w is not None:
        u = u / np.sqrt(w)
    return b.center + b.radius * u


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def body_to_dict(body: Body) -> dict:
    if isinstance(body, Polytope):
        return {"polytope": [[float(x) for x in row] for row in body.vertices]}
    if isinstance(body, Ball):
        return {"ball": {"center": [float(x) for x in body.center], "r": float(body.radius)}}
    return {"translate": {"base": body_to_dict(body.base), "shift": [float(x) for x in body.shift]}}


def body_from_dict(data: dict) -> Body:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError("body must be an object with exactly one of: polytope, ball, translate")
    kind, payload = next(iter(data.items()))
    if kind == "polytope":
        return Polytope(np.asarray(payload, dtype=float))
    if kind == "ball":
        return Ball(np.asarray(payload["center"], dtype=float), float(payload["r"]))
    if kind == "translate":
        return Translate(body_from_dict(payload["base"]), np.asarray(payload["shift"], dtype=float))
    raise ValueError(f"unknown body kind {kind!r}")
