"""Independent brute-force oracles for the test suite.

Everything here is deliberately dumb: dense grids, exhaustive pair scans and
interval refinement.  Nothing imports the solver paths it is used to check
(norm evaluation and body resolution are shared, the optimizers are not).
"""

from __future__ import annotations

import numpy as np

from proxpair.bodies import Ball, BodyPair, Polytope, as_vertex_body, resolve
from proxpair.norms import norm


def _segment_grid(a: np.ndarray, b: np.ndarray, step: float) -> np.ndarray:
    length = float(np.linalg.norm(b - a))
    n = max(int(np.ceil(length / step)), 1)
    t = np.linspace(0.0, 1.0, n + 1)
    return a[None, :] + t[:, None] * (b - a)[None, :]


def _polygon_boundary_grid(verts: np.ndarray, step: float) -> np.ndarray:
    """Boundary grid of a CCW polygon; includes all vertices.

    The pair distance and diameter of convex bodies are attained on the
    boundaries (at extreme points for the max), so a boundary grid at the
    stated step is equivalent to the full bounding-box grid for these two
    quantities.
    """
    chunks = []
    m = verts.shape[0]
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        chunks.append(_segment_grid(a, b, step)[:-1])
    return np.vstack(chunks)


def _triangle_grid(verts: np.ndarray, step: float) -> np.ndarray:
    a, b, c = verts
    e1, e2 = b - a, c - a
    n1 = max(int(np.ceil(np.linalg.norm(e1) / step)), 1)
    n2 = max(int(np.ceil(np.linalg.norm(e2) / step)), 1)
    s = np.linspace(0.0, 1.0, n1 + 1)
    t = np.linspace(0.0, 1.0, n2 + 1)
    S, T = np.meshgrid(s, t)
    mask = S + T <= 1.0 + 1e-12
    return a[None, :] + S[mask][:, None] * e1[None, :] + T[mask][:, None] * e2[None, :]


def body_grid(body, spec, step: float = 1e-3) -> np.ndarray:
    """Dense grid of a body: exact for segments/points, boundary+interior for
    2-D polygons, barycentric for 3-D triangles, angular for 2-D balls."""
    b = as_vertex_body(body, spec)
    if isinstance(b, Ball):
        if b.center.shape[0] != 2:
            raise NotImplementedError("grid oracle only supports 2-D balls")
        n = max(int(np.ceil(2 * np.pi * b.radius / step)), 8)
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        ring = b.center + b.radius * np.stack([np.cos(th), np.sin(th)], axis=1)
        return np.vstack([ring, b.center[None, :]])
    V = b.vertices
    if V.shape[0] == 1:
        return V.copy()
    rank = np.linalg.matrix_rank(V[1:] - V[0], tol=1e-10)
    if rank <= 1:
        t = (V - V[0]) @ (V[-1] - V[0])
        lo, hi = V[int(np.argmin(t))], V[int(np.argmax(t))]
        return _segment_grid(lo, hi, step)
    if V.shape[1] == 2:
        from proxpair.bodies import _monotone_chain

        hull = _monotone_chain(V)
        boundary = _polygon_boundary_grid(hull, step)
        # Coarse interior grid so overlapping pairs still report distance 0.
        lo = hull.min(axis=0)
        hi = hull.max(axis=0)
        xs = np.arange(lo[0], hi[0] + 1e-12, step * 20)
        ys = np.arange(lo[1], hi[1] + 1e-12, step * 20)
        X, Y = np.meshgrid(xs, ys)
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        inside = _points_in_polygon(pts, hull)
        return np.vstack([boundary, pts[inside]])
    if V.shape[0] == 3:
        return _triangle_grid(V, step)
    raise NotImplementedError("grid oracle supports segments, 2-D polygons, 3-D triangles")


def _points_in_polygon(pts: np.ndarray, hull: np.ndarray) -> np.ndarray:
    m = hull.shape[0]
    ok = np.ones(pts.shape[0], dtype=bool)
    for i in range(m):
        a, b = hull[i], hull[(i + 1) % m]
        e = b - a
        cross = e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])
        ok &= cross >= -1e-12
    return ok


def grid_extreme_cross_distance(pair: BodyPair, step: float = 1e-3):
    """(min, max) of ||x - y|| over dense grids of the two bodies."""
    ga = body_grid(pair.A, pair.norm, step)
    gb = body_grid(pair.B, pair.norm, step)
    dmin, dmax = np.inf, -np.inf
    chunk = max(1, int(2e6 // max(gb.shape[0], 1)))
    for i in range(0, ga.shape[0], chunk):
        block = norm(ga[i : i + chunk, None, :] - gb[None, :, :], pair.norm)
        dmin = min(dmin, float(block.min()))
        dmax = max(dmax, float(block.max()))
    return dmin, dmax


def grid_distance(pair: BodyPair, step: float = 1e-3) -> float:
    return grid_extreme_cross_distance(pair, step)[0]


def grid_diameter(pair: BodyPair, step: float = 1e-3) -> float:
    return grid_extreme_cross_distance(pair, step)[1]


def grid_restricted_radius(H, K, spec, rounds: int = 4, n0: int = 41):
    """min over x in H of max_k ||x - k|| by grid refinement over H.

    K is reduced to its vertices (the inner sup of a convex function over a
    polytope is a vertex max by definition); the outer min is located by a
    shrinking box grid around the incumbent.
    """
    Kv = as_vertex_body(K, spec).vertices
    Hb = as_vertex_body(H, spec)
    Hv = Hb.vertices
    lo = Hv.min(axis=0).astype(float)
    hi = Hv.max(axis=0).astype(float)
    n = Hv.shape[1]
    hull2d = None
    if n == 2:
        from proxpair.bodies import _monotone_chain

        hull2d = _monotone_chain(Hv)
    best_x, best_val = None, np.inf
    for _ in range(rounds):
        axes = [np.linspace(lo[i], hi[i], n0) for i in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        if hull2d is not None and hull2d.shape[0] >= 3:
            keep = _points_in_polygon(pts, hull2d)
        else:
            keep = np.array([_in_hull_by_lp(p, Hv) for p in pts])
        pts = pts[keep]
        if pts.shape[0] == 0:
            break
        vals = norm(pts[:, None, :] - Kv[None, :, :], spec).max(axis=1)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_x = pts[j]
        span = (hi - lo) / (n0 - 1) * 3.0
        lo = np.maximum(best_x - span, Hv.min(axis=0))
        hi = np.minimum(best_x + span, Hv.max(axis=0))
    return best_val, best_x


def _in_hull_by_lp(p: np.ndarray, V: np.ndarray) -> bool:
    from scipy.optimize import linprog

    k = V.shape[0]
    res = linprog(
        np.zeros(k),
        A_eq=np.vstack([V.T, np.ones(k)]),
        b_eq=np.concatenate([p, [1.0]]),
        bounds=[(0, None)] * k,
        method="highs",
    )
    return res.status == 0


def grid_best_proximity(body, apply_map, spec, step: float = 1e-4):
    """argmin of ||x - T x|| over a dense grid of the body."""
    g = body_grid(body, spec, step)
    vals = norm(g - np.array([apply_map(x) for x in g]), spec)
    j = int(np.argmin(vals))
    return g[j], float(vals[j])
