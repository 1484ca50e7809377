"""Metric quantities of a convex pair and its classification.

Computes the pair distance d(A, B), the pair diameter, restricted Chebyshev
radii, certified proximal cores (the subsets of A and B that attain the pair
distance), semisharpness and uniqueness-of-approach diagnostics, and the
Pythagorean identity residual of inner-product geometry.

Equality with the pair distance is always implemented as ``<= d + tol`` with
a single configurable tolerance; exact infima are not available in floating
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import _opt
from ._opt import Certificate
from .bodies import (
    Ball,
    Body,
    BodyPair,
    Polytope,
    as_vertex_body,
    body_dim,
    convex_hull,
    dist_to_body,
    sample,
    translate_offset,
)
from .norms import NormSpec, is_strictly_convex, norm

__all__ = [
    "DistanceResult",
    "DiameterResult",
    "RadiusResult",
    "ProximalCore",
    "SemisharpVerdict",
    "UCWitness",
    "PairMetrics",
    "UnresolvableMate",
    "pair_distance",
    "pair_diameter",
    "point_radius",
    "restricted_radius",
    "proximal_core",
    "semisharp_check",
    "pythagorean_residual",
    "property_uc_falsify",
    "analyze_pair",
]

DEFAULT_TOL = 1e-7


class UnresolvableMate(ValueError):
    """No point of the opposite body attains the pair distance for this point."""


# ---------------------------------------------------------------------------
# d(A, B)
# ---------------------------------------------------------------------------

@dataclass
class DistanceResult:
    d: float
    x: np.ndarray
    y: np.ndarray
    certificate: Certificate


def _ball_ball_distance(a: Ball, b: Ball, spec: NormSpec):
    sep = float(norm(b.center - a.center, spec))
    if sep <= a.radius + b.radius:
        alpha = a.radius / (a.radius + b.radius) if (a.radius + b.radius) > 0 else 0.0
        q = a.center + alpha * (b.center - a.center)
        return 0.0, q, q.copy()
    u = (b.center - a.center) / sep
    return sep - a.radius - b.radius, a.center + a.radius * u, b.center - b.radius * u


def pair_distance(pair: BodyPair, tol: float = DEFAULT_TOL) -> DistanceResult:
    """Certified pair distance inf ||x - y|| over (A, B) with witnesses.

    p = 2 solves the min-norm-point quadratic program over vertex-pair
    differences by away-step Frank-Wolfe (the FW gap is the certificate);
    p in {1, inf} solves an exact linear program; other p run certified
    first-order descent.  Ball-ball and ball-polytope cases under p = 2 are
    analytic.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = pair.norm
    a = as_vertex_body(pair.A, spec)
    b = as_vertex_body(pair.B, spec)
    if isinstance(a, Ball) and isinstance(b, Ball):
        d, x, y = _ball_ball_distance(a, b, spec)
        return DistanceResult(d, x, y, Certificate("analytic-ball", 0.0, 0, True))
    if isinstance(a, Ball) or isinstance(b, Ball):
        ball, poly, flipped = (a, b, False) if isinstance(a, Ball) else (b, a, True)
        dp, q, cert = dist_to_body(ball.center, poly, spec, tol=tol)
        if dp <= ball.radius:
            x = y = q
            d = 0.0
        else:
            u = (q - ball.center) / dp
            x = ball.center + ball.radius * u
            y = q
            d = dp - ball.radius
        if flipped:
            x, y = y, x
        return DistanceResult(d, x, y, cert)
    Va, Vb = a.vertices, b.vertices
    if spec.p == 2.0:
        D = (Va[:, None, :] - Vb[None, :, :]).reshape(-1, spec.dim)
        gap_tol = max(min(tol * tol, 1e-12), 2e-15)
        d, z, nu, cert = _opt.min_norm_point(D, weights=spec.weight_array(), gap_tol=gap_tol)
        l = Vb.shape[0]
        lam = np.zeros(Va.shape[0])
        mu = np.zeros(l)
        for t, wt in enumerate(nu):
            if wt > 0.0:
                lam[t // l] += wt
                mu[t % l] += wt
        return DistanceResult(d, Va.T @ lam, Vb.T @ mu, cert)
    if spec.p == 1.0 or spec.is_inf:
        d, x, y, cert = _opt.lp_pair_distance(Va, Vb, spec)
        return DistanceResult(d, x, y, cert)
    d, x, y, cert = _opt.fw_pnorm_distance(Va, Vb, spec, tol=tol)
    return DistanceResult(d, x, y, cert)


# ---------------------------------------------------------------------------
# delta(A, B) and delta(x, K)
# ---------------------------------------------------------------------------

@dataclass
class DiameterResult:
    delta: float
    x: np.ndarray
    y: np.ndarray


def _vertex_pair_max(Va: np.ndarray, Vb: np.ndarray, spec: NormSpec):
    dmat = norm(Va[:, None, :] - Vb[None, :, :], spec)
    flat = int(np.argmax(dmat))
    i, j = divmod(flat, Vb.shape[0])
    return float(dmat[i, j]), i, j


def pair_diameter(pair: BodyPair) -> DiameterResult:
    """Exact sup ||x - y|| over (A, B).

    Convexity of the norm puts the maximum at vertices, so polytopes reduce
    to a finite vertex-pair maximum (ties broken by lowest index pair);
    exact balls use the support-function formula.
    """
    spec = pair.norm
    a = as_vertex_body(pair.A, spec)
    b = as_vertex_body(pair.B, spec)
    if isinstance(a, Ball) and isinstance(b, Ball):
        sep = float(norm(b.center - a.center, spec))
        if sep > 0.0:
            u = (b.center - a.center) / sep
        else:
            u = np.zeros(spec.dim)
            u[0] = 1.0
            u = u / float(norm(u, spec))
        return DiameterResult(
            sep + a.radius + b.radius, a.center - a.radius * u, b.center + b.radius * u
        )
    if isinstance(a, Ball) or isinstance(b, Ball):
        ball, poly, flipped = (a, b, False) if isinstance(a, Ball) else (b, a, True)
        dists = norm(poly.vertices - ball.center, spec)
        j = int(np.argmax(dists))
        v = poly.vertices[j]
        if dists[j] > 0.0:
            u = (ball.center - v) / dists[j]
        else:
            u = np.zeros(spec.dim)
            u[0] = 1.0
            u = u / float(norm(u, spec))
        x = ball.center + ball.radius * u
        y = v.copy()
        if flipped:
            x, y = y, x
        return DiameterResult(float(dists[j]) + ball.radius, x, y)
    delta, i, j = _vertex_pair_max(a.vertices, b.vertices, pair.norm)
    return DiameterResult(delta, a.vertices[i].copy(), b.vertices[j].copy())


def point_radius(x, K: Body, spec: NormSpec) -> float:
    """sup ||x - y|| over y in K; exact for polytopes and p = 2 balls."""
    xv = np.asarray(x, dtype=float).reshape(-1)
    if xv.shape[0] != body_dim(K):
        raise ValueError("point dimension does not match body")
    b = as_vertex_body(K, spec)
    if isinstance(b, Ball):
        return float(norm(xv - b.center, spec)) + b.radius
    return float(np.max(norm(xv[None, :] - b.vertices, spec)))


# ---------------------------------------------------------------------------
# Restricted Chebyshev radius r(H, K)
# ---------------------------------------------------------------------------

@dataclass
class RadiusResult:
    r: float
    center: np.ndarray
    certificate: Certificate


def _affine_direction(V: np.ndarray) -> Optional[np.ndarray]:
    """Direction of a segment-like vertex set, or None if affine rank > 1."""
    diffs = V - V[0]
    norms2 = np.einsum("ij,ij->i", diffs, diffs)
    j = int(np.argmax(norms2))
    if norms2[j] <= 1e-24:
        return None
    u = diffs[j] / math.sqrt(norms2[j])
    resid = diffs - np.outer(diffs @ u, u)
    if float(np.max(np.abs(resid))) > 1e-10 * (1.0 + float(np.max(np.abs(V)))):
        return None
    return u


def _segment_minimax(V: np.ndarray, K: np.ndarray, spec: NormSpec):
    u = _affine_direction(V)
    t = (V - V[0]) @ u
    lo, hi = float(t.min()), float(t.max())

    def phi(ts):
        x = V[0][None, :] + ts[:, None] * u[None, :]
        return norm(x[:, None, :] - K[None, :, :], spec).max(axis=1)

    s, val = _opt.batched_line_min(phi, lo, hi)
    return val, V[0] + s * u


def _planar_edge_minimax(V: np.ndarray, K: np.ndarray, spec: NormSpec):
    from .bodies import _monotone_chain

    hull = _monotone_chain(V)
    best_val = math.inf
    best_x = hull[0]
    m = hull.shape[0]
    for i in range(m):
        a = hull[i]
        bb = hull[(i + 1) % m] if m > 1 else hull[i]

        def phi(ts, a=a, bb=bb):
            x = a[None, :] + ts[:, None] * (bb - a)[None, :]
            return norm(x[:, None, :] - K[None, :, :], spec).max(axis=1)

        s, val = _opt.batched_line_min(phi, 0.0, 1.0)
        if val < best_val:
            best_val = val
            best_x = a + s * (bb - a)
    return best_val, best_x


def _translate_orthogonal_shift(H: np.ndarray, K: np.ndarray, spec: NormSpec) -> Optional[np.ndarray]:
    # Row-wise translate with shift W-orthogonal to the span of H; this is how
    # the sub-pair samplers construct mate hulls, so the rowwise test suffices.
    if spec.p != 2.0 or H.shape != K.shape:
        return None
    diffs = K - H
    h = diffs[0]
    if float(np.max(np.abs(diffs - h))) > 1e-10 * (1.0 + float(np.max(np.abs(K)))):
        return None
    w = spec.weight_array()
    wh = h if w is None else w * h
    inplane = (H - H[0]) @ wh
    if float(np.max(np.abs(inplane))) > 1e-10 * (1.0 + float(np.max(np.abs(H)))):
        return None
    return h


def restricted_radius(H: Body, K: Body, spec: NormSpec, tol: float = 1e-9) -> RadiusResult:
    """min over x in H of max over K of ||x - k||, with a solve certificate.

    Dispatch: exact epigraph linear program for p in {1, inf}; for p = 2 the
    minimum enclosing ball dual (valid whenever its center lies in H), the
    orthogonal-translate reduction, planar boundary search in dimension two,
    or the smooth epigraph program; segment-shaped H uses exact 1-D search
    under any norm.
    """
    hb = as_vertex_body(H, spec)
    kb = as_vertex_body(K, spec)
    if isinstance(kb, Ball):
        d, q, cert = dist_to_body(kb.center, hb, spec, tol=tol)
        return RadiusResult(d + kb.radius, q, cert)
    if isinstance(hb, Ball):
        raise _opt.SolverBudgetExceeded(
            "restricted radius over an exact ball H is not supported; "
            "convert H to a polytope"
        )
    Hv, Kv = hb.vertices, kb.vertices
    if Hv.shape[0] == 1:
        x = Hv[0]
        return RadiusResult(point_radius(x, kb, spec), x.copy(), Certificate("singleton", 0.0, 0, True))
    if Kv.shape[0] == 1:
        d, q, cert = dist_to_body(Kv[0], hb, spec, tol=tol)
        return RadiusResult(d, q, cert)
    if _affine_direction(Hv) is not None:
        val, x = _segment_minimax(Hv, Kv, spec)
        return RadiusResult(val, x, Certificate("segment-ternary", 0.0, 100, True))
    h = _translate_orthogonal_shift(Hv, Kv, spec)
    if h is not None:
        rr, center, cert = _opt.minimum_enclosing_ball(Hv, weights=spec.weight_array())
        hn = float(norm(h, spec))
        return RadiusResult(
            math.hypot(rr, hn), center,
            Certificate("meb-orthogonal-translate", cert.gap, cert.iterations, cert.converged),
        )
    if spec.p == 1.0 or spec.is_inf:
        r, center, cert = _opt.lp_restricted_radius(Hv, Kv, spec)
        return RadiusResult(r, center, cert)
    if spec.p == 2.0:
        rr, center, cert = _opt.minimum_enclosing_ball(Kv, weights=spec.weight_array())
        din, _, _ = dist_to_body(center, hb, spec, tol=1e-12)
        if din <= 1e-10:
            r = float(np.max(norm(center[None, :] - Kv, spec)))
            return RadiusResult(r, center, Certificate("meb-interior", cert.gap, cert.iterations, True))
        if spec.dim == 2:
            val, x = _planar_edge_minimax(Hv, Kv, spec)
            return RadiusResult(val, x, Certificate("planar-boundary", 0.0, 100, True))
    r, center, cert = _opt.slsqp_restricted_radius(Hv, Kv, spec, tol=max(tol * 1e-3, 1e-12))
    lb = _opt.radius_lower_bound(Hv, Kv, spec, center)
    cert = Certificate(cert.method, max(r - lb, 0.0), cert.iterations, cert.converged)
    return RadiusResult(r, center, cert)


# ---------------------------------------------------------------------------
# Proximal core A0 / B0
# ---------------------------------------------------------------------------

@dataclass
class ProximalCore:
    """Certified points of A and B attaining the pair distance.

    ``certified_exact`` is set only when an analytic characterization applies
    (translate pairs with ||h|| = d, disjoint-ball tangency).  Otherwise the
    core is the hull of certified screened points, and an empty screen is
    reported as undetected rather than as emptiness.
    """

    pair: BodyPair
    d: float
    tol: float
    kind: str
    certified_exact: bool
    detected: bool
    A0: Optional[Body]
    B0: Optional[Body]
    h: Optional[np.ndarray] = None
    a_points: Optional[np.ndarray] = None
    a_mates: Optional[np.ndarray] = None
    b_points: Optional[np.ndarray] = None
    b_mates: Optional[np.ndarray] = None
    a_screened: int = 0
    a_certified: int = 0
    b_screened: int = 0
    b_certified: int = 0
    a0_equals_A: Optional[bool] = None
    b0_equals_B: Optional[bool] = None

    def mate(self, x, side: str = "A") -> np.ndarray:
        """The point of the opposite body at pair distance from ``x``."""
        xv = np.asarray(x, dtype=float).reshape(-1)
        if self.kind == "parallel-translate":
            return xv + self.h if side == "A" else xv - self.h
        if self.kind == "ball-tangency":
            target = self.B0 if side == "A" else self.A0
            return as_vertex_body(target, self.pair.norm).vertices[0].copy()
        other = self.pair.B if side == "A" else self.pair.A
        dist, ynear, _ = dist_to_body(xv, other, self.pair.norm, tol=self.tol)
        if dist > self.d + 2.0 * self.tol:
            raise UnresolvableMate(
                f"point at distance {dist:.6g} > d + 2 tol = {self.d + 2 * self.tol:.6g}"
            )
        return ynear

    def summary(self) -> dict:
        out = {
            "kind": self.kind,
            "certified_exact": self.certified_exact,
            "detected": self.detected,
            "d": self.d,
            "tol": self.tol,
            "a0_equals_A": self.a0_equals_A,
            "b0_equals_B": self.b0_equals_B,
            "a_screened": self.a_screened,
            "a_certified": self.a_certified,
            "b_screened": self.b_screened,
            "b_certified": self.b_certified,
        }
        if self.h is not None:
            out["h"] = [float(v) for v in self.h]
        return out


def _screen_side(body: Body, other: Body, spec: NormSpec, d: float, tol: float,
                 budget: int, seed: int):
    """Candidate screening: vertices, seeded samples, projection refinement."""
    b = as_vertex_body(body, spec)
    cands = []
    if isinstance(b, Polytope):
        cands.append(b.vertices)
    n_samples = max(budget, 4)
    cands.append(sample(body, n_samples, seed, spec))
    cand = np.vstack(cands)
    kept, mates = [], []
    near = []
    for x in cand:
        dist, y, _ = dist_to_body(x, other, spec, tol=tol)
        if dist <= d + tol:
            kept.append(x)
            mates.append(y)
        else:
            near.append((dist, x))
    # Alternating-projection refinement from the most promising misses.
    near.sort(key=lambda t: t[0])
    for _, x in near[:8]:
        z = x
        for _ in range(8):
            _, y, _ = dist_to_body(z, other, spec, tol=tol)
            _, z, _ = dist_to_body(y, body, spec, tol=tol)
        dist, y, _ = dist_to_body(z, other, spec, tol=tol)
        if dist <= d + tol:
            kept.append(z)
            mates.append(y)
    screened = cand.shape[0]
    if not kept:
        return None, None, screened, 0
    return np.array(kept), np.array(mates), screened, len(kept)


def proximal_core(pair: BodyPair, tol: float = DEFAULT_TOL, budget: int = 64,
                  seed: int = 0) -> ProximalCore:
    """Certified proximal core (A0, B0) of the pair.

    Translate pairs with ||h|| = d(A, B) have A0 = A and B0 = B exactly with
    mates x + h / y - h; disjoint p=2 balls have singleton tangency cores.
    Otherwise candidates are screened by convex projection and the core is
    the hull of certified points.
    """
    spec = pair.norm
    t = translate_offset(pair, tol=max(tol, 1e-9))
    dres = pair_distance(pair, tol=tol)
    d = dres.d
    if t is not None and t.norm_matches_d:
        a = as_vertex_body(pair.A, spec)
        b = as_vertex_body(pair.B, spec)
        a_pts = a.vertices if isinstance(a, Polytope) else None
        b_pts = b.vertices if isinstance(b, Polytope) else None
        return ProximalCore(
            pair=pair, d=d, tol=tol, kind="parallel-translate", certified_exact=True,
            detected=True, A0=pair.A, B0=pair.B, h=t.h,
            a_points=a_pts, a_mates=None if a_pts is None else a_pts + t.h,
            b_points=b_pts, b_mates=None if b_pts is None else b_pts - t.h,
            a_screened=0 if a_pts is None else a_pts.shape[0],
            a_certified=0 if a_pts is None else a_pts.shape[0],
            b_screened=0 if b_pts is None else b_pts.shape[0],
            b_certified=0 if b_pts is None else b_pts.shape[0],
            a0_equals_A=True, b0_equals_B=True,
        )
    a = as_vertex_body(pair.A, spec)
    b = as_vertex_body(pair.B, spec)
    if isinstance(a, Ball) and isinstance(b, Ball) and d > tol:
        sep = float(norm(b.center - a.center, spec))
        u = (b.center - a.center) / sep
        x0 = a.center + a.radius * u
        y0 = b.center - b.radius * u
        return ProximalCore(
            pair=pair, d=d, tol=tol, kind="ball-tangency", certified_exact=True,
            detected=True, A0=Polytope(x0[None, :]), B0=Polytope(y0[None, :]),
            a_points=x0[None, :], a_mates=y0[None, :],
            b_points=y0[None, :], b_mates=x0[None, :],
            a_screened=1, a_certified=1, b_screened=1, b_certified=1,
            a0_equals_A=bool(a.radius == 0.0), b0_equals_B=bool(b.radius == 0.0),
        )
    ka, ma, sa, ca = _screen_side(pair.A, pair.B, spec, d, tol, budget, seed)
    kb, mb, sb, cb = _screen_side(pair.B, pair.A, spec, d, tol, budget, seed + 1)
    detected = ka is not None and kb is not None
    return ProximalCore(
        pair=pair, d=d, tol=tol, kind="sampled", certified_exact=False,
        detected=detected,
        A0=convex_hull(ka) if ka is not None else None,
        B0=convex_hull(kb) if kb is not None else None,
        a_points=ka, a_mates=ma, b_points=kb, b_mates=mb,
        a_screened=sa, a_certified=ca, b_screened=sb, b_certified=cb,
        a0_equals_A=None, b0_equals_B=None,
    )


# ---------------------------------------------------------------------------
# Semisharpness and property UC
# ---------------------------------------------------------------------------

@dataclass
class SemisharpVerdict:
    holds: bool
    analytic: bool
    checked: int
    witness: Optional[tuple] = None  # (x, y, z): two mates y != z of x

    def to_dict(self) -> dict:
        out = {"holds": self.holds, "analytic": self.analytic, "checked": self.checked}
        if self.witness is not None:
            x, y, z = self.witness
            out["witness"] = {"x": list(map(float, x)), "y": list(map(float, y)),
                              "z": list(map(float, z))}
        return out


def _mate_set_extremes(z: np.ndarray, V: np.ndarray, spec: NormSpec, dmax: float,
                       direction: np.ndarray):
    """max/min of <direction, y> over {y in conv(V) : ||y - z|| <= dmax}.

    Linear program for p in {1, inf}.  Returns (ymax, ymin) or None when the
    constraint set is empty.
    """
    m, n = V.shape
    w = spec.weight_array()
    wa = np.ones(n) if w is None else w
    if spec.is_inf:
        nv = m
        rows, rhs = [], []
        for i in range(n):
            r = wa[i] * V[:, i]
            rows.append(r)
            rhs.append(dmax + wa[i] * z[i])
            rows.append(-r)
            rhs.append(dmax - wa[i] * z[i])
        A_ub, b_ub = np.vstack(rows), np.array(rhs)
        bounds = [(0, None)] * m
        A_eq = np.ones((1, m))
    else:  # p == 1 with slack block s
        nv = m + n
        rows, rhs = [], []
        r = np.zeros(nv)
        r[m:] = 1.0
        rows.append(r)
        rhs.append(dmax)
        for i in range(n):
            r1 = np.zeros(nv)
            r1[:m] = wa[i] * V[:, i]
            r1[m + i] = -1.0
            rows.append(r1)
            rhs.append(wa[i] * z[i])
            r2 = np.zeros(nv)
            r2[:m] = -wa[i] * V[:, i]
            r2[m + i] = -1.0
            rows.append(r2)
            rhs.append(-wa[i] * z[i])
        A_ub, b_ub = np.vstack(rows), np.array(rhs)
        bounds = [(0, None)] * nv
        A_eq = np.concatenate([np.ones(m), np.zeros(n)])[None, :]
    out = []
    for sgn in (-1.0, 1.0):
        c = np.zeros(nv)
        c[:m] = sgn * (V @ direction)
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.array([1.0]),
                      bounds=bounds, method="highs")
        if res.status != 0:
            return None
        out.append(V.T @ res.x[:m])
    return out[0], out[1]  # (argmax, argmin)


def _two_mates(z: np.ndarray, other: Body, spec: NormSpec, d: float, tol: float):
    """Two certified mates of z at mutual distance > 10 tol, if they exist."""
    ob = as_vertex_body(other, spec)
    if isinstance(ob, Ball):
        return None
    V = ob.vertices
    n = spec.dim
    dirs = [np.eye(n)[i] for i in range(n)]
    if n >= 2:
        extra = np.zeros(n)
        extra[0] = 1.0
        extra[1] = 1.0
        dirs.append(extra.copy())
        extra[1] = -1.0
        dirs.append(extra)
    best = None
    best_sep = 10.0 * tol
    for direction in dirs:
        got = _mate_set_extremes(z, V, spec, d + tol, direction)
        if got is None:
            continue
        y1, y2 = got
        sep = float(norm(y1 - y2, spec))
        if sep > best_sep:
            best, best_sep = (y1, y2), sep
    if best is None:
        return None
    y1, y2 = best
    ok = (
        float(norm(z - y1, spec)) <= d + tol
        and float(norm(z - y2, spec)) <= d + tol
        and float(norm(y1 - y2, spec)) > 10.0 * tol
    )
    return (y1, y2) if ok else None


def _side_candidates(body: Body, spec: NormSpec, budget: int, seed: int) -> np.ndarray:
    b = as_vertex_body(body, spec)
    pts = [sample(body, max(budget, 4), seed, spec)]
    if isinstance(b, Polytope):
        pts.append(b.vertices)
    return np.vstack(pts)


def semisharp_check(pair: BodyPair, tol: float = DEFAULT_TOL, budget: int = 32,
                    seed: int = 0) -> SemisharpVerdict:
    """Mate-uniqueness check.

    Strictly convex norms give an analytic "holds" (closed convex pairs in
    strictly convex spaces have unique mates).  Otherwise candidate points on
    both sides are searched for two distinct mates; a returned failure
    witness is re-verified by three norm evaluations.  "holds" from the
    search is a bounded-budget sampled claim, never a proof.
    """
    if is_strictly_convex(pair.norm).kind == "strictly_convex":
        return SemisharpVerdict(holds=True, analytic=True, checked=0)
    d = pair_distance(pair, tol=tol).d
    checked = 0
    for side, body, other in (("A", pair.A, pair.B), ("B", pair.B, pair.A)):
        for x in _side_candidates(body, pair.norm, budget // 2, seed):
            dist, _, _ = dist_to_body(x, other, pair.norm, tol=tol)
            checked += 1
            if dist > d + tol:
                continue
            got = _two_mates(x, other, pair.norm, d, tol)
            if got is not None:
                return SemisharpVerdict(
                    holds=False, analytic=False, checked=checked, witness=(x, got[0], got[1])
                )
    return SemisharpVerdict(holds=True, analytic=False, checked=checked)


@dataclass
class UCWitness:
    """Failure of uniqueness-of-approach: two far-apart points chasing one."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    side_of_z: str
    separation: float

    def to_dict(self) -> dict:
        return {
            "x": list(map(float, self.x)),
            "y": list(map(float, self.y)),
            "z": list(map(float, self.z)),
            "side_of_z": self.side_of_z,
            "separation": self.separation,
        }


def property_uc_falsify(pair: BodyPair, tol: float = DEFAULT_TOL, budget: int = 32,
                        seed: int = 0) -> Optional[UCWitness]:
    """Search for a uniqueness-of-approach counterexample.

    In the compact setting a failure reduces to one point z with two mates at
    mutual distance above threshold in the opposite body; both orientations
    are searched.  Strictly convex norms return None analytically.
    """
    if is_strictly_convex(pair.norm).kind == "strictly_convex":
        return None
    d = pair_distance(pair, tol=tol).d
    for side, body, other in (("B", pair.B, pair.A), ("A", pair.A, pair.B)):
        for z in _side_candidates(body, pair.norm, budget // 2, seed):
            dist, _, _ = dist_to_body(z, other, pair.norm, tol=tol)
            if dist > d + tol:
                continue
            got = _two_mates(z, other, pair.norm, d, tol)
            if got is not None:
                x, y = got
                return UCWitness(x=x, y=y, z=z, side_of_z=side,
                                 separation=float(norm(x - y, pair.norm)))
    return None


# ---------------------------------------------------------------------------
# Pythagorean residual
# ---------------------------------------------------------------------------

def pythagorean_residual(pair: BodyPair, x, y, core: ProximalCore) -> float:
    """Residual of the orthogonal-decomposition identity across the pair.

    Returns the larger of | ||x-y'||^2 + ||x-x'||^2 - ||x-y||^2 | and
    | ||x'-y||^2 + ||y'-y||^2 - ||x-y||^2 |, mates resolved through the core.
    Zero (to rounding) in inner-product geometry on translate pairs; genuinely
    nonzero off it.
    """
    xv = np.asarray(x, dtype=float).reshape(-1)
    yv = np.asarray(y, dtype=float).reshape(-1)
    spec = pair.norm
    xp = core.mate(xv, side="A")
    yp = core.mate(yv, side="B")
    nxy2 = float(norm(xv - yv, spec)) ** 2
    r1 = abs(float(norm(xv - yp, spec)) ** 2 + float(norm(xv - xp, spec)) ** 2 - nxy2)
    r2 = abs(float(norm(xp - yv, spec)) ** 2 + float(norm(yp - yv, spec)) ** 2 - nxy2)
    return max(r1, r2)


# ---------------------------------------------------------------------------
# Full pair classification
# ---------------------------------------------------------------------------

@dataclass
class PairMetrics:
    """Every metric quantity of a pair plus classification flags."""

    d: float
    delta: float
    r12: float
    r21: float
    rmax: float
    x_d: np.ndarray
    y_d: np.ndarray
    x_delta: np.ndarray
    y_delta: np.ndarray
    proximal: bool
    proximal_exact: bool
    semisharp: bool
    semisharp_analytic: bool
    sharp: bool
    parallel: bool
    h: Optional[np.ndarray]
    ordering_ok: bool
    certificates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        flags = {
            "proximal": self.proximal,
            "semisharp": self.semisharp,
            "sharp": self.sharp,
            "parallel": self.parallel,
        }
        if self.h is not None:
            flags["h"] = [float(v) for v in self.h]
        return {
            "d": self.d,
            "delta": self.delta,
            "r12": self.r12,
            "r21": self.r21,
            "Rmax": self.rmax,
            "witnesses": {
                "x_d": list(map(float, self.x_d)),
                "y_d": list(map(float, self.y_d)),
                "x_delta": list(map(float, self.x_delta)),
                "y_delta": list(map(float, self.y_delta)),
            },
            "flags": flags,
            "proximal_exact": self.proximal_exact,
            "semisharp_analytic": self.semisharp_analytic,
            "ordering_ok": self.ordering_ok,
            "certificates": self.certificates,
        }


def analyze_pair(pair: BodyPair, tol: float = DEFAULT_TOL, seed: int = 0,
                 budget: int = 64):
    """Compute PairMetrics and the proximal core of a pair.

    Returns (metrics, core).  The proximal flag is exact when the core has an
    analytic characterization and a sampled claim otherwise (all screened
    candidates certified).
    """
    dres = pair_distance(pair, tol=tol)
    dia = pair_diameter(pair)
    core = proximal_core(pair, tol=tol, budget=budget, seed=seed)
    rr12 = restricted_radius(pair.A, pair.B, pair.norm)
    rr21 = restricted_radius(pair.B, pair.A, pair.norm)
    semi = semisharp_check(pair, tol=tol, budget=budget // 2, seed=seed + 2)

    if core.certified_exact:
        proximal = bool(core.a0_equals_A and core.b0_equals_B)
        proximal_exact = True
    else:
        proximal = bool(
            core.detected
            and core.a_certified == core.a_screened
            and core.b_certified == core.b_screened
        )
        proximal_exact = False
    sharp = proximal and semi.holds
    t = translate_offset(pair, tol=max(tol, 1e-9))
    parallel = bool(sharp and t is not None and t.norm_matches_d)
    slack = 1e-9 * (1.0 + dia.delta)
    ordering_ok = (
        dres.d <= rr12.r + slack
        and dres.d <= rr21.r + slack
        and rr12.r <= dia.delta + slack
        and rr21.r <= dia.delta + slack
        and dres.d <= dia.delta + slack
    )
    metrics = PairMetrics(
        d=dres.d, delta=dia.delta, r12=rr12.r, r21=rr21.r, rmax=max(rr12.r, rr21.r),
        x_d=dres.x, y_d=dres.y, x_delta=dia.x, y_delta=dia.y,
        proximal=proximal, proximal_exact=proximal_exact,
        semisharp=semi.holds, semisharp_analytic=semi.analytic,
        sharp=sharp, parallel=parallel,
        h=t.h if (t is not None and parallel) else None,
        ordering_ok=ordering_ok,
        certificates={
            "d": dres.certificate.to_dict(),
            "r12": rr12.certificate.to_dict(),
            "r21": rr21.certificate.to_dict(),
            "semisharp": semi.to_dict(),
            "core": core.summary(),
        },
    )
    return metrics, core
