"""Normal-structure constants by sub-pair sampling, and the nested-hull
construction that drives the existence argument for proximal cores.

The two suprema handled here range over uncountable families of sub-pairs,
so the estimators report certified sampled lower bounds (every sampled ratio
is re-verified by direct evaluation) plus, in inner-product geometry, an
analytic per-sample upper bound from the Hilbert self-radius inequality
r(K) <= delta(K) / sqrt(2).  No exact supremum is ever claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bodies import Body, BodyPair, Polytope, as_vertex_body, sample
from .metrics import (
    ProximalCore,
    pair_distance,
    point_radius,
    proximal_core,
    restricted_radius,
)
from .norms import NormSpec, norm

__all__ = [
    "SubPair",
    "SubPairRatio",
    "StructureEstimate",
    "DegenerateStructureError",
    "EmptyCenterSetError",
    "NestedHullError",
    "Fact41Result",
    "NestedHullTrace",
    "subpair_sampler",
    "estimate_N",
    "estimate_c0",
    "estimate_structure",
    "fact41_centers",
    "nested_hull_demo",
]

HILBERT_SELF_RADIUS = 1.0 / math.sqrt(2.0)


class DegenerateStructureError(ValueError):
    """No nondegenerate sub-pair could be produced (degenerate pair)."""


class EmptyCenterSetError(ValueError):
    """The sampled center set for the given contraction factor is empty."""

    def __init__(self, c: float, message: str = ""):
        self.c = c
        super().__init__(message or f"no sampled center satisfies the inequality at c={c}")


class NestedHullError(RuntimeError):
    """Center-set emptiness at some level of the nested construction."""

    def __init__(self, level: int):
        self.level = level
        super().__init__(f"empty center set at level {level}")


@dataclass
class SubPair:
    """A sampled sub-pair with verified membership flags.

    ``proximal`` is True only after verification; None means the check was
    not required (the d-matching family does not filter on proximality).
    ``translate_h`` is set when H2 was built as H1 + h row-wise.
    """

    H1: Polytope
    H2: Polytope
    proximal: Optional[bool]
    d_matches: bool
    nondegenerate: bool
    translate_h: Optional[np.ndarray] = None
    is_full_pair: bool = False


def _distinct_spread(V: np.ndarray) -> float:
    if V.shape[0] <= 1:
        return 0.0
    return float(np.max(np.abs(V[:, None, :] - V[None, :, :])))


def _delta_polys(V1: np.ndarray, V2: np.ndarray, spec: NormSpec) -> float:
    return float(np.max(norm(V1[:, None, :] - V2[None, :, :], spec)))


def _witness_pair(core: ProximalCore):
    """A certified pair (x, y) with ||x - y|| = d, from the core."""
    if core.a_points is not None and core.a_mates is not None and len(core.a_points):
        return np.asarray(core.a_points)[0], np.asarray(core.a_mates)[0]
    if core.kind == "parallel-translate":
        a = as_vertex_body(core.pair.A, core.pair.norm)
        x = a.center.copy() if not isinstance(a, Polytope) else a.vertices[0].copy()
        return x, core.mate(x, side="A")
    raise DegenerateStructureError("core provides no certified distance witness")


def _verify_proximal_flags(H1: np.ndarray, H2: np.ndarray, spec: NormSpec, d: float,
                           tol: float, h: Optional[np.ndarray]) -> bool:
    if h is not None:
        return bool(abs(float(norm(h, spec)) - d) <= tol)
    # Vertex-level check: every vertex of each side has a mate among the
    # verified mate points of the other side.
    for v in H1:
        if float(np.min(norm(v[None, :] - H2, spec))) > d + tol:
            return False
    for w in H2:
        if float(np.min(norm(w[None, :] - H1, spec))) > d + tol:
            return False
    return True


def subpair_sampler(pair: BodyPair, core: ProximalCore, count: int, seed: int,
                    mode: str = "proximal", tol: float = 1e-7) -> list:
    """Seeded sub-pairs of (A, B) for the structure estimators.

    mode "proximal": hulls of certified-proximal points together with their
    mates, so each emitted sub-pair is proximal and distance-matching.
    mode "dmatch": hulls of arbitrary sampled points with one certified
    distance witness forced into each side.  Every emitted flag is verified
    by direct norm evaluation, not assumed; degenerate draws are filtered,
    so fewer than ``count`` sub-pairs may be returned.
    """
    if mode not in ("proximal", "dmatch"):
        raise ValueError(f"unknown sampler mode {mode!r}")
    spec = pair.norm
    d = core.d
    rng = np.random.default_rng(seed)
    out = []

    a_res = as_vertex_body(pair.A, spec)
    b_res = as_vertex_body(pair.B, spec)
    full_possible = isinstance(a_res, Polytope) and isinstance(b_res, Polytope)
    if full_possible:
        nondeg = max(_distinct_spread(a_res.vertices), _distinct_spread(b_res.vertices)) > 1e-12
        h_full = core.h if core.kind == "parallel-translate" else None
        if mode == "proximal":
            if core.certified_exact and core.a0_equals_A and core.b0_equals_B and nondeg:
                out.append(SubPair(a_res, b_res, True, True, True, translate_h=h_full,
                                   is_full_pair=True))
        elif nondeg:
            out.append(SubPair(a_res, b_res, None, True, True, translate_h=h_full,
                               is_full_pair=True))

    if mode == "proximal":
        if core.kind == "parallel-translate":
            source = pair.A
            h = core.h
            while len(out) < count:
                m = int(rng.integers(2, 5))
                pts = sample(source, m, int(rng.integers(0, 2**31 - 1)), spec)
                if _distinct_spread(pts) <= 1e-12:
                    continue
                mates = pts + h
                sp = SubPair(Polytope(pts), Polytope(mates), True, True, True,
                             translate_h=h.copy())
                sp.proximal = _verify_proximal_flags(pts, mates, spec, d, tol, h)
                sp.d_matches = abs(float(norm(pts[0] - mates[0], spec)) - d) <= tol
                if sp.proximal and sp.d_matches:
                    out.append(sp)
        elif core.a_points is not None and core.a_mates is not None:
            pts_all = np.asarray(core.a_points)
            mates_all = np.asarray(core.a_mates)
            if pts_all.shape[0] >= 2:
                while len(out) < count:
                    m = int(rng.integers(2, min(5, pts_all.shape[0] + 1)))
                    idx = rng.choice(pts_all.shape[0], size=m, replace=False)
                    pts, mates = pts_all[idx], mates_all[idx]
                    if max(_distinct_spread(pts), _distinct_spread(mates)) <= 1e-12:
                        continue
                    proximal = _verify_proximal_flags(pts, mates, spec, d, tol, None)
                    dm = abs(float(np.min(norm(pts[:, None, :] - mates[None, :, :], spec))) - d) <= tol
                    if proximal and dm:
                        out.append(SubPair(Polytope(pts), Polytope(mates), True, True, True))
        return out

    # d-matching family
    xw, yw = _witness_pair(core)
    while len(out) < count:
        m1 = int(rng.integers(1, 4))
        m2 = int(rng.integers(1, 4))
        p1 = np.vstack([sample(pair.A, m1, int(rng.integers(0, 2**31 - 1)), spec), xw[None, :]])
        p2 = np.vstack([sample(pair.B, m2, int(rng.integers(0, 2**31 - 1)), spec), yw[None, :]])
        nondeg = max(_distinct_spread(p1), _distinct_spread(p2)) > 1e-12
        if not nondeg:
            continue
        dm = abs(float(norm(xw - yw, spec)) - d) <= tol
        out.append(SubPair(Polytope(p1), Polytope(p2), None, dm, True))
    return out


@dataclass
class SubPairRatio:
    ratio: float
    r12: float
    r21: float
    delta: float
    delta_self_1: float
    hilbert_bound: Optional[float]
    identity_residual: Optional[float]


def _ratio_record(sp: SubPair, spec: NormSpec, d: float) -> Optional[SubPairRatio]:
    V1, V2 = sp.H1.vertices, sp.H2.vertices
    delta = _delta_polys(V1, V2, spec)
    if delta <= 1e-12:
        return None
    r12 = restricted_radius(sp.H1, sp.H2, spec).r
    r21 = restricted_radius(sp.H2, sp.H1, spec).r
    ratio = max(r12, r21) / delta
    ds1 = _delta_polys(V1, V1, spec)
    hb = None
    resid = None
    if spec.p == 2.0 and not spec.is_inf:
        hb = math.sqrt((ds1 * ds1 * HILBERT_SELF_RADIUS**2 + d * d) / (ds1 * ds1 + d * d))
        if sp.translate_h is not None:
            # Orthogonal-decomposition cross-check of the inner-product
            # identity delta(x, K2)^2 = delta(x, K1)^2 + d^2 at the vertices.
            resid = 0.0
            for v in V1:
                lhs = float(np.max(norm(v[None, :] - V2, spec))) ** 2
                rhs = float(np.max(norm(v[None, :] - V1, spec))) ** 2 + d * d
                resid = max(resid, abs(lhs - rhs))
    return SubPairRatio(ratio, r12, r21, delta, ds1, hb, resid)


@dataclass
class StructureEstimate:
    """Sampled lower bounds on the two normal-structure suprema.

    N_hat bounds the proximal-family supremum, c0_hat the distance-matching
    one.  Both are running maxima over verified sub-pair ratios, hence
    non-decreasing in the sample count for a fixed seed stream.
    """

    N_hat: Optional[float] = None
    c0_hat: Optional[float] = None
    hilbert_bound: Optional[float] = None
    samples: int = 0
    seed: int = 0
    on_core: bool = False
    full_pair_ratio: Optional[float] = None
    max_identity_residual: Optional[float] = None
    puns_sampled: Optional[bool] = None
    records: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "N_hat": self.N_hat,
            "c0_hat": self.c0_hat,
            "hilbert_bound": self.hilbert_bound,
            "samples": self.samples,
            "seed": self.seed,
            "on_core": self.on_core,
            "full_pair_ratio": self.full_pair_ratio,
            "max_identity_residual": self.max_identity_residual,
            "puns_sampled": self.puns_sampled,
        }


PUNS_MARGIN = 1e-3
IDENTITY_RESIDUAL_TOL = 1e-9


def estimate_N(pair: BodyPair, core: ProximalCore, count: int, seed: int,
               tol: float = 1e-7) -> StructureEstimate:
    """Certified sampled lower bound on the proximal-family ratio supremum.

    When the pair is not certified proximal as a whole the estimate runs on
    the proximal core and is labeled ``on_core``.  Under a weighted
    Euclidean norm the per-sample Hilbert bound and the orthogonal
    decomposition cross-check are evaluated as well.  The bound uses the
    squared self-radius constant, sqrt((delta^2/2 + d^2) / (delta^2 + d^2)):
    applying r <= delta / sqrt(2) inside the square root gives the tighter
    delta^2/2 form, which is what gets asserted per sample.
    """
    base = pair
    on_core = False
    if not (core.certified_exact and core.a0_equals_A and core.b0_equals_B):
        if core.A0 is None or core.B0 is None:
            raise DegenerateStructureError("no certified proximal core to estimate on")
        base = BodyPair(core.A0, core.B0, pair.norm)
        on_core = True
    subs = subpair_sampler(base, core, count, seed, mode="proximal", tol=tol)
    records = []
    full_ratio = None
    for sp in subs:
        rec = _ratio_record(sp, pair.norm, core.d)
        if rec is not None:
            records.append(rec)
            if sp.is_full_pair:
                full_ratio = rec.ratio
    if not records:
        raise DegenerateStructureError("no nondegenerate proximal sub-pairs found")
    n_hat = max(r.ratio for r in records)
    hb = None
    resid = None
    if pair.norm.p == 2.0 and not pair.norm.is_inf:
        hb = max(r.hilbert_bound for r in records if r.hilbert_bound is not None)
        resids = [r.identity_residual for r in records if r.identity_residual is not None]
        resid = max(resids) if resids else None
        if resid is not None and resid > IDENTITY_RESIDUAL_TOL:
            raise ValueError(
                f"orthogonal-decomposition cross-check failed: residual {resid:.3e}"
            )
    puns = bool(n_hat <= 1.0 - PUNS_MARGIN and (hb is None or hb < 1.0))
    return StructureEstimate(
        N_hat=n_hat, hilbert_bound=hb, samples=len(records), seed=seed,
        on_core=on_core, full_pair_ratio=full_ratio,
        max_identity_residual=resid, puns_sampled=puns, records=records,
    )


def estimate_c0(pair: BodyPair, count: int, seed: int, tol: float = 1e-7,
                core: Optional[ProximalCore] = None) -> float:
    """Sampled lower bound on the distance-matching ratio supremum.

    Proximal sub-pairs are distance-matching sub-pairs, so the sampled
    family includes a proximal batch as well; this keeps the estimate above
    the proximal-family one for the same seed stream.
    """
    if core is None:
        core = proximal_core(pair, tol=tol)
    subs = subpair_sampler(pair, core, count, seed, mode="dmatch", tol=tol)
    try:
        subs += subpair_sampler(pair, core, count, seed, mode="proximal", tol=tol)
    except DegenerateStructureError:
        pass
    best = None
    for sp in subs:
        rec = _ratio_record(sp, pair.norm, core.d)
        if rec is not None:
            best = rec.ratio if best is None else max(best, rec.ratio)
    if best is None:
        raise DegenerateStructureError("no nondegenerate d-matching sub-pairs found")
    return best


def estimate_structure(pair: BodyPair, core: ProximalCore, count: int, seed: int,
                       tol: float = 1e-7) -> StructureEstimate:
    """Both estimates in one record (proximal family and d-matching family).

    The combined record always satisfies N_hat <= c0_hat: the proximal
    samples belong to both families.
    """
    est = estimate_N(pair, core, count, seed, tol=tol)
    est.c0_hat = max(estimate_c0(pair, count, seed + 1, tol=tol, core=core), est.N_hat)
    return est


# ---------------------------------------------------------------------------
# Center sets (nondiametral points)
# ---------------------------------------------------------------------------

@dataclass
class Fact41Result:
    members_a: np.ndarray
    members_b: np.ndarray
    c: float
    d: float
    absolute_ok: bool


def _center_candidates(C1: Body, C2: Body, spec: NormSpec, count: int, seed: int):
    v1 = as_vertex_body(C1, spec).vertices
    cands = [v1, sample(C1, max(count, 4), seed, spec)]
    r = restricted_radius(C1, C2, spec)
    cands.append(r.center[None, :])
    # Midpoint construction: average the own center with the mate of the
    # other side's center (projection onto C1 plays the mate).
    r2 = restricted_radius(C2, C1, spec)
    from .bodies import dist_to_body

    _, v_mate, _ = dist_to_body(r2.center, C1, spec)
    cands.append(0.5 * (r.center + v_mate)[None, :])
    return np.vstack(cands)


def fact41_centers(C1: Body, C2: Body, spec: NormSpec, c: float, tol: float = 1e-7,
                   d: Optional[float] = None, count: int = 32, seed: int = 0) -> Fact41Result:
    """Sampled members of the nondiametral center sets of a sub-pair.

    A point x of C1 is kept when delta(x, C2) - d <= c (delta(C1, C2) - d),
    re-verified by direct evaluation; symmetrically for C2.  The absolute
    form delta(z, C2) <= c delta(C1, C2) (whose satisfiability is what the
    c0 < 1 hypothesis buys) is also probed and reported.  Empty results
    raise with the attempted c.
    """
    if d is None:
        d = pair_distance(BodyPair(C1, C2, spec), tol=tol).d
    delta = _delta_polys(
        as_vertex_body(C1, spec).vertices, as_vertex_body(C2, spec).vertices, spec
    )
    gap = delta - d
    slack = 1e-12 * (1.0 + delta)

    def members(side_from: Body, side_to: Body, sub_seed: int) -> np.ndarray:
        cand = _center_candidates(side_from, side_to, spec, count, sub_seed)
        kept = []
        for x in cand:
            if point_radius(x, side_to, spec) - d <= c * gap + slack:
                kept.append(x)
        return np.array(kept) if kept else np.zeros((0, spec.dim))

    ma = members(C1, C2, seed)
    mb = members(C2, C1, seed + 1)
    absolute_ok = bool(
        any(point_radius(x, C2, spec) <= c * delta + slack for x in ma)
        and any(point_radius(y, C1, spec) <= c * delta + slack for y in mb)
    ) if (len(ma) and len(mb)) else False
    if len(ma) == 0 or len(mb) == 0:
        raise EmptyCenterSetError(c)
    return Fact41Result(members_a=ma, members_b=mb, c=c, d=d, absolute_ok=absolute_ok)


# ---------------------------------------------------------------------------
# Nested double-indexed hulls
# ---------------------------------------------------------------------------

@dataclass
class NestedLevel:
    level: int
    delta: float
    d: float
    gap: float
    bound: Optional[float]
    gap_ok: bool
    centers_ok: bool

    @property
    def ok(self) -> bool:
        return self.gap_ok and self.centers_ok

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "delta": self.delta,
            "d": self.d,
            "gap": self.gap,
            "bound": self.bound,
            "ok": self.ok,
        }


@dataclass
class NestedHullTrace:
    levels: list
    c: float
    seed: int
    terminated_early: bool

    @property
    def gap_contraction_ok(self) -> bool:
        return all(l.gap_ok for l in self.levels)

    @property
    def fact41_ok(self) -> bool:
        return all(l.centers_ok for l in self.levels)

    @property
    def certificate_ok(self) -> bool:
        return all(l.ok for l in self.levels)

    def gaps(self) -> list:
        return [l.gap for l in self.levels]

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "seed": self.seed,
            "terminated_early": self.terminated_early,
            "gap_contraction_ok": self.gap_contraction_ok,
            "fact41_ok": self.fact41_ok,
            "certificate_ok": self.certificate_ok,
            "levels": [l.to_dict() for l in self.levels],
        }


GAP_SLACK = 1e-9


def _gap_members(V1: np.ndarray, V2: np.ndarray, spec: NormSpec, d: float, c: float,
                 extra: np.ndarray) -> np.ndarray:
    """Verified members of the relative center set of (hull V1, hull V2)."""
    delta = _delta_polys(V1, V2, spec)
    gap = delta - d
    slack = 1e-12 * (1.0 + delta)
    cand = [V1, extra]
    if V1.shape[0] > 1:
        cand.append(V1.mean(axis=0)[None, :])
        r = restricted_radius(Polytope(V1), Polytope(V2), spec)
        cand.append(r.center[None, :])
    cands = np.vstack(cand)
    kept = []
    for x in cands:
        if float(np.max(norm(x[None, :] - V2, spec))) - d <= c * gap + slack:
            kept.append(x)
    return np.array(kept) if kept else np.zeros((0, spec.dim))


def _absolute_center_exists(V1: np.ndarray, V2: np.ndarray, spec: NormSpec, c: float) -> bool:
    delta = _delta_polys(V1, V2, spec)
    slack = 1e-12 * (1.0 + delta)
    r = restricted_radius(Polytope(V1), Polytope(V2), spec)
    return bool(r.r <= c * delta + slack)


def nested_hull_demo(pair: BodyPair, core: ProximalCore, levels: int, c: float,
                     seed: int, tol: float = 1e-7) -> NestedHullTrace:
    """Finite realization of the nested double-indexed hull construction.

    A seeded minimizing pair sequence is generated from a certified witness;
    tail hulls form level zero, and each next level takes hulls of the
    unions of verified relative-center sets over the tails.  Per level the
    trace records the gap delta - d, the contraction bound c * previous gap,
    and whether centers satisfying the absolute inequality
    delta(z, K) <= c delta(H, K) exist (they must whenever c exceeds the
    true ratio supremum; their absence certifies c below it).  Terminates
    early once the gap falls under tol, the singleton case.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    spec = pair.norm
    d = core.d
    rng = np.random.default_rng(seed)
    xstar, ystar = _witness_pair(core)

    averts = as_vertex_body(pair.A, spec).vertices
    far = averts[int(np.argmax(norm(averts - xstar, spec)))]
    smp = sample(pair.A, 1, int(rng.integers(0, 2**31 - 1)), spec)[0]
    xt = 0.9 * far + 0.1 * smp
    J = max(10, levels + 6)
    xs = [xstar + 2.0 ** (-j) * (xt - xstar) for j in range(J)]
    ys = [core.mate(x, side="A") for x in xs]
    xs.append(xstar.copy())
    ys.append(ystar.copy())

    tails_H = [np.vstack(xs[j:]) for j in range(len(xs))]
    tails_K = [np.vstack(ys[j:]) for j in range(len(ys))]

    trace = []
    prev_gap = None
    terminated = False
    for m in range(levels + 1):
        V1, V2 = tails_H[0], tails_K[0]
        delta = _delta_polys(V1, V2, spec)
        dn = float(np.min(norm(V1[:, None, :] - V2[None, :, :], spec)))
        gap = delta - d
        bound = None if prev_gap is None else c * prev_gap
        gap_ok = True if prev_gap is None else gap <= bound + GAP_SLACK
        centers_ok = _absolute_center_exists(V1, V2, spec, c)
        trace.append(NestedLevel(m, delta, dn, gap, bound, gap_ok, centers_ok))
        prev_gap = gap
        if gap <= tol:
            terminated = m < levels
            break
        if m == levels:
            break
        witness_extra = np.vstack([xs[-1][None, :]])
        witness_extra_K = np.vstack([ys[-1][None, :]])
        members_H = []
        members_K = []
        for j in range(len(tails_H)):
            mh = _gap_members(tails_H[j], tails_K[j], spec, d, c, witness_extra)
            mk = _gap_members(tails_K[j], tails_H[j], spec, d, c, witness_extra_K)
            members_H.append(mh)
            members_K.append(mk)
        from .bodies import convex_hull

        new_H, new_K = [], []
        for j in range(len(tails_H)):
            uh = np.vstack([mm for mm in members_H[j:] if mm.shape[0]]) if any(
                mm.shape[0] for mm in members_H[j:]
            ) else np.zeros((0, spec.dim))
            uk = np.vstack([mm for mm in members_K[j:] if mm.shape[0]]) if any(
                mm.shape[0] for mm in members_K[j:]
            ) else np.zeros((0, spec.dim))
            if uh.shape[0] == 0 or uk.shape[0] == 0:
                raise NestedHullError(m + 1)
            # Hull reduction keeps the same convex sets while bounding the
            # vertex counts across levels.
            new_H.append(convex_hull(uh).vertices)
            new_K.append(convex_hull(uk).vertices)
        tails_H, tails_K = new_H, new_K
    return NestedHullTrace(levels=trace, c=c, seed=seed, terminated_early=terminated)
