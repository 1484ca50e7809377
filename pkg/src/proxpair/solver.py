"""Cyclic affine maps and the shrinking-pair best-proximity solver.

The solver realizes, at finite resolution, the standard contraction scheme:
pick near-Chebyshev centers of the current pair, average them with their
mates, close under the map and under mates to get an invariant hull pair,
keep the points whose relative radius beats c times the current gap, and
repeat.  Every level carries a verified certificate (gap decrease, map
invariance, distance preservation); a certificate violation aborts loudly
rather than silently continuing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bodies import Body, BodyPair, Polytope, as_vertex_body, convex_hull, dist_to_body, sample
from .metrics import ProximalCore, proximal_core, restricted_radius
from .norms import norm

__all__ = [
    "AffineMap",
    "CyclicMapSpec",
    "CyclicityError",
    "CertificateFailure",
    "NonexpCertificate",
    "MidpointResult",
    "ShrinkStepResult",
    "ShrinkTrace",
    "BppResult",
    "check_relatively_nonexpansive",
    "midpoint_refine",
    "shrink_step",
    "solve_bpp",
]


class CyclicityError(ValueError):
    """T does not map A into B and B into A."""


class CertificateFailure(RuntimeError):
    """A verification step of the shrinking scheme failed."""


@dataclass(frozen=True, eq=False)
class AffineMap:
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.offset, dtype=float).reshape(-1)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != b.shape[0]:
            raise ValueError("affine map needs a square matrix and matching offset")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", b)

    def __call__(self, x) -> np.ndarray:
        xv = np.asarray(x, dtype=float)
        return xv @ self.matrix.T + self.offset

    def to_dict(self) -> dict:
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "offset": [float(v) for v in self.offset],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AffineMap":
        return cls(np.asarray(data["matrix"], dtype=float), np.asarray(data["offset"], dtype=float))


@dataclass(frozen=True, eq=False)
class CyclicMapSpec:
    """A cyclic map given by two affine components A -> B and B -> A."""

    t_ab: AffineMap
    t_ba: AffineMap
    mode: str = "isometry"  # "isometry" | "audit"

    def __post_init__(self):
        if self.mode not in ("isometry", "audit"):
            raise ValueError(f"unknown certificate mode {self.mode!r}")

    def apply(self, x, side: str) -> np.ndarray:
        return self.t_ab(x) if side == "A" else self.t_ba(x)

    def to_dict(self) -> dict:
        return {"T_AB": self.t_ab.to_dict(), "T_BA": self.t_ba.to_dict(), "mode": self.mode}

    @classmethod
    def from_dict(cls, data: dict) -> "CyclicMapSpec":
        return cls(
            AffineMap.from_dict(data["T_AB"]),
            AffineMap.from_dict(data["T_BA"]),
            data.get("mode", "isometry"),
        )


@dataclass
class NonexpCertificate:
    ok: bool
    mode_used: str
    worst_ratio: float
    cyclic_ok: bool
    violation: Optional[tuple] = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {
            "ok": self.ok,
            "mode_used": self.mode_used,
            "worst_ratio": self.worst_ratio,
            "cyclic_ok": self.cyclic_ok,
            "detail": self.detail,
        }
        if self.violation is not None:
            out["violation"] = {
                "x": list(map(float, self.violation[0])),
                "y": list(map(float, self.violation[1])),
            }
        return out


def _check_cyclic(T: CyclicMapSpec, pair: BodyPair, tol: float = 1e-7) -> None:
    spec = pair.norm
    for side, src, dst in (("A", pair.A, pair.B), ("B", pair.B, pair.A)):
        b = as_vertex_body(src, spec)
        if isinstance(b, Polytope):
            # Affine image of a hull is the hull of vertex images, so vertex
            # containment decides cyclicity exactly.
            images = T.apply(b.vertices, side)
            for img in images:
                d, _, _ = dist_to_body(img, dst, spec, tol=tol)
                if d > 10.0 * tol:
                    raise CyclicityError(
                        f"T({side}) escapes the opposite body by {d:.3e}"
                    )
        else:
            pts = sample(src, 64, 1234, spec)
            images = T.apply(pts, side)
            for img in images:
                d, _, _ = dist_to_body(img, dst, spec, tol=tol)
                if d > 10.0 * tol:
                    raise CyclicityError(
                        f"T({side}) escapes the opposite body by {d:.3e} (sampled)"
                    )


def _cross_difference_vertices(pair: BodyPair):
    a = as_vertex_body(pair.A, pair.norm)
    b = as_vertex_body(pair.B, pair.norm)
    if not (isinstance(a, Polytope) and isinstance(b, Polytope)):
        return None
    return (a.vertices[:, None, :] - b.vertices[None, :, :]).reshape(-1, pair.norm.dim)


def check_relatively_nonexpansive(T: CyclicMapSpec, pair: BodyPair, budget: int = 512,
                                  seed: int = 0) -> NonexpCertificate:
    """Certify ||Tx - Ty|| <= ||x - y|| over all cross pairs, or find a violation.

    Cyclicity is verified first and raises separately.  Isometry mode proves
    the inequality (with equality) from map structure under a weighted
    Euclidean norm: equal norm-preserving linear parts plus the affine
    cross-difference identity checked at vertex differences.  Audit mode
    draws seeded cross pairs and reports the worst ratio; any violation is
    re-verified by two norm evaluations before being returned.
    """
    _check_cyclic(T, pair, tol=1e-7)
    spec = pair.norm

    if T.mode == "isometry":
        if spec.is_inf or spec.p != 2.0:
            raise CertificateFailure(
                "isometry certification is only available under a weighted "
                "Euclidean norm; declare audit mode instead"
            )
        M1, M2 = T.t_ab.matrix, T.t_ba.matrix
        if float(np.max(np.abs(M1 - M2))) > 1e-12:
            raise CertificateFailure("isometry mode requires equal linear parts")
        w = spec.weight_array()
        W = np.eye(spec.dim) if w is None else np.diag(w)
        if float(np.max(np.abs(M1.T @ W @ M1 - W))) > 1e-10:
            raise CertificateFailure("linear part is not an isometry of the norm")
        D = _cross_difference_vertices(pair)
        if D is None:
            raise CertificateFailure("isometry certification needs polytope bodies")
        c = T.t_ab.offset - T.t_ba.offset
        # ||M z + c||^2 - ||z||^2 = 2 <M z, c>_W + ||c||_W^2 is affine in z,
        # so vanishing at all vertex differences proves equality on the hull.
        resid = 2.0 * (D @ M1.T) @ (W @ c) + float(c @ W @ c)
        scale = 1.0 + float(np.max(np.abs(D))) + float(np.max(np.abs(c)))
        if float(np.max(np.abs(resid))) > 1e-9 * scale:
            raise CertificateFailure(
                "cross differences are not isometric under this map"
            )
        return NonexpCertificate(
            ok=True, mode_used="isometry", worst_ratio=1.0, cyclic_ok=True,
            detail="norm-preserving linear part; cross-difference identity verified "
                   "at all vertex differences",
        )

    xs = sample(pair.A, budget, seed, spec)
    ys = sample(pair.B, budget, seed + 1, spec)
    a = as_vertex_body(pair.A, spec)
    b = as_vertex_body(pair.B, spec)
    if isinstance(a, Polytope):
        xs = np.vstack([a.vertices, xs])
    if isinstance(b, Polytope):
        ys = np.vstack([b.vertices, ys])
    n = min(xs.shape[0], ys.shape[0])
    worst = 0.0
    violation = None
    for i in range(n):
        x, y = xs[i], ys[i % ys.shape[0]]
        den = float(norm(x - y, spec))
        if den <= 1e-12:
            continue
        num = float(norm(T.apply(x, "A") - T.apply(y, "B"), spec))
        ratio = num / den
        if ratio > worst:
            worst = ratio
            if ratio > 1.0 + 1e-9:
                violation = (x, y)
    if violation is not None:
        x, y = violation
        assert float(norm(T.apply(x, "A") - T.apply(y, "B"), spec)) > float(norm(x - y, spec))
        return NonexpCertificate(
            ok=False, mode_used="audit", worst_ratio=worst, cyclic_ok=True,
            violation=violation, detail="sampled cross pair expands",
        )
    return NonexpCertificate(
        ok=True, mode_used="audit", worst_ratio=worst, cyclic_ok=True,
        detail=f"worst sampled ratio over {n} cross pairs",
    )


# ---------------------------------------------------------------------------
# Midpoint refinement
# ---------------------------------------------------------------------------

@dataclass
class MidpointResult:
    z1: np.ndarray
    z2: np.ndarray
    separation: float
    radius_z1: float
    radius_z2: float


def midpoint_refine(H: Body, K: Body, u, v, core: ProximalCore) -> MidpointResult:
    """Average a point with the mate of its opposite to land at distance d.

    z1 = (u + v') / 2 and z2 = (u' + v) / 2; the separation ||z1 - z2|| is
    verified against the pair distance and the achieved radius bounds
    delta(z1, K), delta(z2, H) are returned.
    """
    spec = core.pair.norm
    uv = np.asarray(u, dtype=float).reshape(-1)
    vv = np.asarray(v, dtype=float).reshape(-1)
    up = core.mate(uv, side="A")
    vp = core.mate(vv, side="B")
    z1 = 0.5 * (uv + vp)
    z2 = 0.5 * (up + vv)
    sep = float(norm(z1 - z2, spec))
    from .metrics import point_radius

    return MidpointResult(
        z1=z1, z2=z2, separation=sep,
        radius_z1=point_radius(z1, K, spec), radius_z2=point_radius(z2, H, spec),
    )


# ---------------------------------------------------------------------------
# One shrinking step
# ---------------------------------------------------------------------------

@dataclass
class ShrinkCertificate:
    gap_in: float
    gap_out: float
    c: float
    d_level: float
    orbit_rounds: int
    closure_rounds: int
    gap_ok: bool
    invariance_ok: bool
    proximal_ok: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class ShrinkStepResult:
    H1: Polytope
    K1: Polytope
    certificate: ShrinkCertificate


def _hausdorff_vertex_change(old: np.ndarray, new: np.ndarray) -> float:
    if old.shape[0] == 0:
        return math.inf
    d1 = np.max(np.min(np.linalg.norm(new[:, None, :] - old[None, :, :], axis=2), axis=1))
    d2 = np.max(np.min(np.linalg.norm(old[:, None, :] - new[None, :, :], axis=2), axis=1))
    return float(max(d1, d2))


def _closure(points_a: np.ndarray, points_b: np.ndarray, T: CyclicMapSpec,
             core: ProximalCore, rounds: int, tol: float):
    """Close two point sets under the map and under mates, hull-reducing."""
    LA, LB = points_a, points_b
    used = 0
    for used in range(1, rounds + 1):
        mates_b = np.array([core.mate(y, side="B") for y in LB])
        mates_a = np.array([core.mate(x, side="A") for x in LA])
        newA = convex_hull(np.vstack([LA, T.apply(LB, "B"), mates_b])).vertices
        newB = convex_hull(np.vstack([LB, T.apply(LA, "A"), mates_a])).vertices
        change = max(_hausdorff_vertex_change(LA, newA), _hausdorff_vertex_change(LB, newB))
        LA, LB = newA, newB
        if change <= tol:
            return LA, LB, used
    raise CertificateFailure(f"orbit hull did not stabilize within {rounds} rounds")


def shrink_step(H: Body, K: Body, T: CyclicMapSpec, c: float, core: ProximalCore,
                tol: float = 1e-9, budget: int = 64, seed: int = 0) -> ShrinkStepResult:
    """One certified contraction step on a proximal invariant pair.

    (i) near-Chebyshev centers, (ii) midpoint refinement to a distance
    witness (z1, z2), (iii) invariant hull approximation by orbit and mate
    closure of {z1, z2} plus seed samples, (iv) the relative-radius sublevel
    points around (z1, z2), (v) map/mate closure of the kept points and
    verification of the gap inequality, invariance and proximality.
    """
    spec = core.pair.norm
    d = core.d
    Hv = as_vertex_body(H, spec).vertices
    Kv = as_vertex_body(K, spec).vertices
    delta_in = float(np.max(norm(Hv[:, None, :] - Kv[None, :, :], spec)))
    gap_in = delta_in - d
    u = restricted_radius(H, K, spec).center
    v = restricted_radius(K, H, spec).center
    mid = midpoint_refine(H, K, u, v, core)
    if abs(mid.separation - d) > 100.0 * tol + 1e-9:
        raise CertificateFailure(
            f"midpoint separation {mid.separation:.9g} does not match d={d:.9g}"
        )
    z1, z2 = mid.z1, mid.z2

    seeds_a = sample(Polytope(Hv), 2, seed, spec)
    seeds_b = sample(Polytope(Kv), 2, seed + 1, spec)
    LA, LB, orbit_rounds = _closure(
        np.vstack([z1[None, :], seeds_a]), np.vstack([z2[None, :], seeds_b]),
        T, core, rounds=budget, tol=max(tol, 1e-9),
    )

    slack = 1e-12 * (1.0 + delta_in)

    def sublevel(points: np.ndarray, own: np.ndarray, other: np.ndarray, side: str):
        kept = []
        for x in points:
            try:
                xm = core.mate(x, side=side)
            except Exception:
                continue
            val = max(
                float(np.max(norm(x[None, :] - other, spec))) - d,
                float(np.max(norm(xm[None, :] - own, spec))) - d,
            )
            if val <= c * gap_in + slack:
                kept.append(x)
        return kept

    cand_a = np.vstack([LA, sample(Polytope(LA), 4, seed + 2, spec), z1[None, :]])
    cand_b = np.vstack([LB, sample(Polytope(LB), 4, seed + 3, spec), z2[None, :]])
    kept_a = sublevel(cand_a, LA, LB, "A")
    kept_b = sublevel(cand_b, LB, LA, "B")
    if not kept_a or not kept_b:
        raise CertificateFailure("relative-radius sublevel set came out empty")
    H1v = convex_hull(np.vstack(kept_a + [z1[None, :]])).vertices
    K1v = convex_hull(np.vstack(kept_b + [z2[None, :]])).vertices
    H1v, K1v, closure_rounds = _closure(H1v, K1v, T, core, rounds=budget, tol=max(tol, 1e-9))

    delta_out = float(np.max(norm(H1v[:, None, :] - K1v[None, :, :], spec)))
    gap_out = delta_out - d
    gap_ok = gap_out <= c * gap_in + 1e-9 * (1.0 + delta_in)
    if not gap_ok:
        raise CertificateFailure(
            f"gap certificate failed: {gap_out:.3e} > c * {gap_in:.3e}"
        )
    inv_ok = True
    for img in T.apply(H1v, "A"):
        dd, _, _ = dist_to_body(img, Polytope(K1v), spec, tol=tol)
        inv_ok &= dd <= 1e-6
    for img in T.apply(K1v, "B"):
        dd, _, _ = dist_to_body(img, Polytope(H1v), spec, tol=tol)
        inv_ok &= dd <= 1e-6
    if not inv_ok:
        raise CertificateFailure("map invariance of the shrunk pair failed")
    prox_ok = True
    for x in H1v:
        prox_ok &= abs(float(norm(x - core.mate(x, side="A"), spec)) - d) <= 1e-6
    for y in K1v:
        prox_ok &= abs(float(norm(y - core.mate(y, side="B"), spec)) - d) <= 1e-6
    d_level = float(np.min(norm(H1v[:, None, :] - K1v[None, :, :], spec)))
    cert = ShrinkCertificate(
        gap_in=gap_in, gap_out=gap_out, c=c, d_level=d_level,
        orbit_rounds=orbit_rounds, closure_rounds=closure_rounds,
        gap_ok=gap_ok, invariance_ok=inv_ok, proximal_ok=prox_ok,
    )
    return ShrinkStepResult(H1=Polytope(H1v), K1=Polytope(K1v), certificate=cert)


# ---------------------------------------------------------------------------
# Full solve
# ---------------------------------------------------------------------------

@dataclass
class IterationRecord:
    n: int
    delta_n: float
    d_n: float
    bound: float
    within_bound: bool
    pair_snapshot: tuple

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "delta_n": self.delta_n,
            "d_n": self.d_n,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "pair_snapshot": [
                [[float(v) for v in row] for row in self.pair_snapshot[0]],
                [[float(v) for v in row] for row in self.pair_snapshot[1]],
            ],
        }


@dataclass
class ShrinkTrace:
    iterations: list
    c_used: float
    outcome: str  # "converged" | "budget_exhausted"
    nonexpansiveness: Optional[NonexpCertificate] = None

    def to_dict(self) -> dict:
        return {
            "c_used": self.c_used,
            "outcome": self.outcome,
            "iterations": [r.to_dict() for r in self.iterations],
            "nonexpansiveness": None
            if self.nonexpansiveness is None
            else self.nonexpansiveness.to_dict(),
        }


@dataclass
class BppResult:
    x: np.ndarray
    y: np.ndarray
    trace: ShrinkTrace
    gap_to_d: float


def solve_bpp(pair: BodyPair, T: CyclicMapSpec, tol: float = 1e-6, max_iter: int = 400,
              seed: int = 0) -> BppResult:
    """Best proximity pair of a certified relatively nonexpansive cyclic map.

    Iterates certified shrink steps until the pair gap falls under tol, then
    returns the Chebyshev center of the terminal set and its image.  The
    output satisfies ||x - Tx|| <= d + 2 tol and ||y - Ty|| <= d + 2 tol
    with both points inside their bodies; non-convergence within the budget
    returns the trace with outcome "budget_exhausted" for diagnosis.
    """
    spec = pair.norm
    nonexp = check_relatively_nonexpansive(T, pair, seed=seed)
    if not nonexp.ok:
        raise CertificateFailure(
            f"map is not relatively nonexpansive (worst ratio {nonexp.worst_ratio:.6f})"
        )
    core = proximal_core(pair, tol=min(tol, 1e-7), seed=seed)
    if core.certified_exact and core.a0_equals_A and core.b0_equals_B:
        H: Body = pair.A
        K: Body = pair.B
    else:
        if not core.detected:
            raise CertificateFailure("no certified proximal core to start from")
        H, K = core.A0, core.B0
    d = core.d

    Hv = as_vertex_body(H, spec).vertices
    Kv = as_vertex_body(K, spec).vertices
    delta0 = float(np.max(norm(Hv[:, None, :] - Kv[None, :, :], spec)))
    gap0 = delta0 - d
    if gap0 > 1e-12:
        ratio = max(
            restricted_radius(H, K, spec).r, restricted_radius(K, H, spec).r
        ) / delta0
    else:
        ratio = 0.0
    c_used = min(max((3.0 + ratio) / 4.0, 0.75) + 1e-3, 1.0 - 1e-6)

    records = [
        IterationRecord(
            0, delta0, d, gap0, True,
            (Hv.tolist(), Kv.tolist()),
        )
    ]
    outcome = "budget_exhausted"
    for n in range(1, max_iter + 1):
        Hv = as_vertex_body(H, spec).vertices
        Kv = as_vertex_body(K, spec).vertices
        delta_n = float(np.max(norm(Hv[:, None, :] - Kv[None, :, :], spec)))
        if delta_n - d <= tol:
            outcome = "converged"
            break
        step = shrink_step(H, K, T, c_used, core, tol=1e-9, seed=seed + n)
        H, K = step.H1, step.K1
        delta_n = float(
            np.max(norm(step.H1.vertices[:, None, :] - step.K1.vertices[None, :, :], spec))
        )
        bound = (c_used ** n) * gap0
        records.append(
            IterationRecord(
                n, delta_n, step.certificate.d_level,
                bound, delta_n - d <= bound + 1e-9 * (1.0 + delta0),
                (step.H1.vertices.tolist(), step.K1.vertices.tolist()),
            )
        )

    xstar = restricted_radius(H, K, spec).center
    ystar = T.apply(xstar, "A")
    trace = ShrinkTrace(records, c_used, outcome, nonexpansiveness=nonexp)
    gap_x = float(norm(xstar - T.apply(xstar, "A"), spec)) - d
    gap_y = float(norm(ystar - T.apply(ystar, "B"), spec)) - d
    if outcome == "converged":
        from .bodies import contains

        if gap_x > 2.0 * tol or gap_y > 2.0 * tol:
            raise CertificateFailure(
                f"terminal point fails the best-proximity check: gaps "
                f"({gap_x:.3e}, {gap_y:.3e}) exceed 2 tol"
            )
        if not contains(pair.A, xstar, spec, tol=1e-6) or not contains(
            pair.B, ystar, spec, tol=1e-6
        ):
            raise CertificateFailure("terminal points escaped their bodies")
    return BppResult(x=xstar, y=ystar, trace=trace, gap_to_d=max(gap_x, gap_y))
