"""Internal optimization engines.

Everything here is deterministic given its inputs:

* away-step Frank-Wolfe for convex quadratics over a simplex (min-norm point
  and minimum enclosing ball duals), with the FW gap as certificate;
* HiGHS linear programs for l1 / linf distances and epigraph minimax;
* SLSQP epigraph minimax for intermediate p;
* exact 1-D ternary search for convex functions of one parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog, minimize

from .norms import NormSpec, norm

__all__ = ["SolverBudgetExceeded", "Certificate"]


class SolverBudgetExceeded(RuntimeError):
    """An iterative solver failed to reach its gap target within budget."""


@dataclass
class Certificate:
    """Status of a numerical solve attached to every reported quantity."""

    method: str
    gap: float
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _winner(w: Optional[np.ndarray], n: int) -> np.ndarray:
    return np.ones(n) if w is None else w


# ---------------------------------------------------------------------------
# Away-step Frank-Wolfe for f(nu) = ||D^T nu||_W^2 + <q, nu> over the simplex
# ---------------------------------------------------------------------------

def afw_quadratic_simplex(
    D: np.ndarray,
    weights: Optional[np.ndarray] = None,
    q: Optional[np.ndarray] = None,
    gap_tol: float = 1e-14,
    max_iter: int = 20000,
    require_convergence: bool = True,
):
    """Minimize ||D^T nu||_W^2 + <q, nu> over the probability simplex.

    Returns (nu, z, f, certificate) with z = D^T nu.  The FW gap bounds
    f - f*, so the certificate is a true optimality gap.
    """
    m, n = D.shape
    w = _winner(weights, n)
    DW = D * w  # rows scaled; grad = 2 * DW @ z + q
    qv = np.zeros(m) if q is None else q

    # Start from the single best atom.
    diag = np.einsum("ij,ij->i", DW, D)
    f0 = diag + qv
    i0 = int(np.argmin(f0))
    nu = np.zeros(m)
    nu[i0] = 1.0
    active = {i0}
    z = D[i0].astype(float).copy()

    def fval(zv, nuv):
        return float(np.dot(w * zv, zv) + np.dot(qv, nuv))

    # The FW gap is a difference of gradient-scale products, so its floating
    # point floor tracks the atom magnitudes, not the objective value.
    grad_scale = 1.0 + float(np.max(diag)) + float(np.max(np.abs(qv))) if m else 1.0
    floor = 4e-15 * grad_scale

    gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        grad = 2.0 * (DW @ z) + qv
        s = int(np.argmin(grad))
        gdotnu = float(np.dot(grad, nu))
        gap = gdotnu - float(grad[s])
        if gap <= max(gap_tol, floor):
            break
        # Away atom: worst active one.
        act = sorted(active)
        a = act[int(np.argmax(grad[act]))]
        away_gap = float(grad[a]) - gdotnu
        if gap >= away_gap:
            d_nu_atom, eta_max, toward = s, 1.0, True
            zdir = D[s] - z
        else:
            d_nu_atom, toward = a, False
            eta_max = nu[a] / (1.0 - nu[a]) if nu[a] < 1.0 else 0.0
            zdir = z - D[a]
        # Exact line search for the quadratic part; <q, dir> is linear.
        qdir = float(qv[d_nu_atom] - np.dot(qv, nu))
        if not toward:
            qdir = -qdir
        slope = 2.0 * float(np.dot(w * zdir, z)) + qdir
        curv = 2.0 * float(np.dot(w * zdir, zdir))
        if curv <= 0.0:
            eta = eta_max if slope < 0.0 else 0.0
        else:
            eta = min(max(-slope / curv, 0.0), eta_max)
        if eta <= 0.0:
            break
        if toward:
            nu *= 1.0 - eta
            nu[s] += eta
            z = (1.0 - eta) * z + eta * D[s]
            active.add(s)
        else:
            nu *= 1.0 + eta
            nu[a] -= eta
            z = (1.0 + eta) * z - eta * D[a]
            if nu[a] <= 1e-15:
                nu[a] = 0.0
                active.discard(a)
        if it % 128 == 0:
            # Kill accumulated drift.
            nu = np.maximum(nu, 0.0)
            nu /= nu.sum()
            active = {int(i) for i in np.flatnonzero(nu > 0.0)}
            z = D.T @ nu

    converged = gap <= max(gap_tol, floor)
    cert = Certificate("afw-quadratic", float(max(gap, 0.0)), it, converged)
    if require_convergence and not converged:
        raise SolverBudgetExceeded(
            f"Frank-Wolfe gap {gap:.3e} above target {gap_tol:.3e} after {it} iterations"
        )
    return nu, z, fval(z, nu), cert


def min_norm_point(D: np.ndarray, weights=None, gap_tol=1e-14, max_iter=200):
    """Min of ||D^T nu||_W over the simplex by Wolfe's algorithm.

    Finite-termination active-set method: alternates between adding the atom
    that most violates optimality and solving the affine least-norm problem
    over the current corral.  Returns (dist, z, nu, cert); the certificate
    gap is <z, z> - min_j <z, p_j>, which bounds f - f*.
    """
    m, n = D.shape
    w = _winner(weights, n)
    DW = D * w
    sq = np.einsum("ij,ij->i", DW, D)
    grad_scale = 1.0 + float(np.max(sq)) if m else 1.0
    floor = 4e-15 * grad_scale

    i0 = int(np.argmin(sq))
    corral = [i0]
    lam = np.array([1.0])
    z = D[i0].astype(float).copy()
    gap = math.inf
    outer = 0
    for outer in range(1, max_iter + 1):
        scores = DW @ z
        j = int(np.argmin(scores))
        zz = float(np.dot(w * z, z))
        gap = zz - float(scores[j])
        if gap <= max(gap_tol, floor):
            break
        if j not in corral:
            corral.append(j)
            lam = np.append(lam, 0.0)
        for _ in range(2 * n + 8):
            P = D[corral]
            G = (P * w) @ P.T
            k = len(corral)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = 2.0 * G
            A[:k, k] = 1.0
            A[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            alpha = sol[:k]
            if np.all(alpha >= -1e-13):
                lam = np.maximum(alpha, 0.0)
                ssum = lam.sum()
                lam = lam / ssum if ssum > 0 else np.full(k, 1.0 / k)
                break
            # Step toward alpha until some coordinate hits zero; drop it.
            neg = alpha < 1e-13
            denom = lam[neg] - alpha[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                thetas = np.where(denom > 0, lam[neg] / denom, np.inf)
            theta = min(1.0, float(np.min(thetas)))
            lam = (1.0 - theta) * lam + theta * alpha
            keep = lam > 1e-13
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            corral = [corral[i] for i in range(k) if keep[i]]
            lam = lam[keep]
            ssum = lam.sum()
            lam = lam / ssum if ssum > 0 else np.full(len(corral), 1.0 / len(corral))
        z = D[corral].T @ lam
    converged = gap <= max(gap_tol, floor)
    nu = np.zeros(m)
    for idx, wt in zip(corral, lam):
        nu[idx] += wt
    cert = Certificate("wolfe-min-norm", float(max(gap, 0.0)), outer, converged)
    if not converged:
        raise SolverBudgetExceeded(
            f"Wolfe min-norm gap {gap:.3e} above target after {outer} iterations"
        )
    f = float(np.dot(w * z, z))
    return math.sqrt(max(f, 0.0)), z, nu, cert


def minimum_enclosing_ball(points: np.ndarray, weights=None, gap_tol=1e-12, max_iter=20000):
    """Weighted-l2 minimum enclosing ball of finitely many points.

    Solves the dual max_nu sum nu_i ||p_i||^2 - ||sum nu_i p_i||^2 over the
    simplex; the center is the optimal combination and automatically lies in
    the convex hull of the points.  Returns (radius, center, cert).
    """
    P = np.asarray(points, dtype=float)
    w = _winner(weights, P.shape[1])
    sq = np.einsum("ij,ij->i", P * w, P)
    nu, z, f, cert = afw_quadratic_simplex(
        P, weights=weights, q=-sq, gap_tol=gap_tol, max_iter=max_iter
    )
    center = z
    diffs = P - center
    radius = float(np.sqrt(np.max(np.einsum("ij,ij->i", diffs * w, diffs))))
    return radius, center, cert


# ---------------------------------------------------------------------------
# Linear programs (p in {1, inf}) via HiGHS
# ---------------------------------------------------------------------------

def _simplex_eq_rows(k: int, l: int, extra: int):
    """Equality rows sum(lambda) = 1, sum(mu) = 1 in a [lambda, mu, extra] layout."""
    a1 = np.concatenate([np.ones(k), np.zeros(l + extra)])
    a2 = np.concatenate([np.zeros(k), np.ones(l), np.zeros(extra)])
    return np.vstack([a1, a2]), np.array([1.0, 1.0])


def lp_pair_distance(A: np.ndarray, B: np.ndarray, spec: NormSpec):
    """Exact min over conv(A) x conv(B) of the l1 or linf distance.

    Returns (d, x, y, cert).
    """
    k, n = A.shape
    l = B.shape[0]
    w = _winner(spec.weight_array(), n)
    if spec.is_inf:
        nv = k + l + 1
        c = np.zeros(nv)
        c[-1] = 1.0
        rows = []
        for i in range(n):
            r = np.zeros(nv)
            r[:k] = w[i] * A[:, i]
            r[k : k + l] = -w[i] * B[:, i]
            r[-1] = -1.0
            rows.append(r.copy())
            r2 = -r
            r2[-1] = -1.0
            rows.append(r2)
        A_ub = np.vstack(rows)
        b_ub = np.zeros(2 * n)
        A_eq, b_eq = _simplex_eq_rows(k, l, 1)
        bounds = [(0, None)] * (k + l) + [(0, None)]
    else:  # p == 1
        nv = k + l + n
        c = np.zeros(nv)
        c[k + l :] = 1.0
        rows = []
        for i in range(n):
            r = np.zeros(nv)
            r[:k] = w[i] * A[:, i]
            r[k : k + l] = -w[i] * B[:, i]
            r[k + l + i] = -1.0
            rows.append(r.copy())
            r2 = -r
            r2[k + l + i] = -1.0
            rows.append(r2)
        A_ub = np.vstack(rows)
        b_ub = np.zeros(2 * n)
        A_eq, b_eq = _simplex_eq_rows(k, l, n)
        bounds = [(0, None)] * nv
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverBudgetExceeded(f"HiGHS failed with status {res.status}: {res.message}")
    lam = res.x[:k]
    mu = res.x[k : k + l]
    x = A.T @ lam
    y = B.T @ mu
    d = float(norm(x - y, spec))
    cert = Certificate("highs-lp", abs(d - float(res.fun)), int(res.nit), True)
    return d, x, y, cert


def lp_restricted_radius(H: np.ndarray, K: np.ndarray, spec: NormSpec):
    """Exact min over x in conv(H) of max_j ||x - K_j|| for p in {1, inf}.

    Epigraph LP; returns (r, center, cert).
    """
    m, n = H.shape
    kk = K.shape[0]
    w = _winner(spec.weight_array(), n)
    if spec.is_inf:
        nv = m + 1
        c = np.zeros(nv)
        c[-1] = 1.0
        rows, rhs = [], []
        for j in range(kk):
            for i in range(n):
                r = np.zeros(nv)
                r[:m] = w[i] * H[:, i]
                r[-1] = -1.0
                rows.append(r.copy())
                rhs.append(w[i] * K[j, i])
                r2 = np.zeros(nv)
                r2[:m] = -w[i] * H[:, i]
                r2[-1] = -1.0
                rows.append(r2)
                rhs.append(-w[i] * K[j, i])
        A_eq = np.concatenate([np.ones(m), np.zeros(1)])[None, :]
        bounds = [(0, None)] * m + [(0, None)]
    else:  # p == 1: slack block s of shape (kk, n)
        nv = m + 1 + kk * n
        c = np.zeros(nv)
        c[m] = 1.0
        rows, rhs = [], []
        for j in range(kk):
            r = np.zeros(nv)
            r[m] = -1.0
            r[m + 1 + j * n : m + 1 + (j + 1) * n] = 1.0
            rows.append(r)
            rhs.append(0.0)
            for i in range(n):
                r1 = np.zeros(nv)
                r1[:m] = w[i] * H[:, i]
                r1[m + 1 + j * n + i] = -1.0
                rows.append(r1)
                rhs.append(w[i] * K[j, i])
                r2 = np.zeros(nv)
                r2[:m] = -w[i] * H[:, i]
                r2[m + 1 + j * n + i] = -1.0
                rows.append(r2)
                rhs.append(-w[i] * K[j, i])
        A_eq = np.concatenate([np.ones(m), np.zeros(1 + kk * n)])[None, :]
        bounds = [(0, None)] * nv
    res = linprog(
        c, A_ub=np.vstack(rows), b_ub=np.array(rhs), A_eq=A_eq, b_eq=np.array([1.0]),
        bounds=bounds, method="highs",
    )
    if res.status != 0:
        raise SolverBudgetExceeded(f"HiGHS failed with status {res.status}: {res.message}")
    lam = res.x[:m]
    center = H.T @ lam
    r = float(np.max(norm(center[None, :] - K, spec)))
    cert = Certificate("highs-epigraph", abs(r - float(res.fun if spec.is_inf else res.x[m])), int(res.nit), True)
    return r, center, cert


# ---------------------------------------------------------------------------
# Smooth epigraph minimax via SLSQP (p in (1, inf), any dimension)
# ---------------------------------------------------------------------------

def slsqp_restricted_radius(H: np.ndarray, K: np.ndarray, spec: NormSpec, tol: float = 1e-10):
    """min over x = H^T lambda of max_j ||x - K_j|| via the epigraph program.

    Variables are (lambda, t).  Constraint gradients are analytic; the
    returned radius is re-evaluated directly at the solution, so it is always
    a valid upper bound regardless of solver quality.
    """
    m, n = H.shape
    kk = K.shape[0]
    w = _winner(spec.weight_array(), n)
    p = spec.p

    def point(zv):
        return H.T @ zv[:m]

    def grad_norm(x, kj):
        z = x - kj
        r = norm(z, spec)
        if r <= 1e-300:
            return np.zeros(n)
        if p == 2.0:
            return w * z / r
        return w * np.abs(z) ** (p - 1.0) * np.sign(z) / r ** (p - 1.0)

    cons = [
        {
            "type": "eq",
            "fun": lambda zv: np.array([zv[:m].sum() - 1.0]),
            "jac": lambda zv: np.concatenate([np.ones(m), [0.0]])[None, :],
        }
    ]

    def make_con(j):
        kj = K[j]

        def fun(zv):
            return np.array([zv[m] - norm(point(zv) - kj, spec)])

        def jac(zv):
            g = H @ grad_norm(point(zv), kj)
            return np.concatenate([-g, [1.0]])[None, :]

        return {"type": "ineq", "fun": fun, "jac": jac}

    cons.extend(make_con(j) for j in range(kk))

    lam0 = np.full(m, 1.0 / m)
    x0 = H.T @ lam0
    t0 = float(np.max(norm(x0[None, :] - K, spec))) + 0.1
    z0 = np.concatenate([lam0, [t0]])
    res = minimize(
        lambda zv: zv[m],
        z0,
        jac=lambda zv: np.concatenate([np.zeros(m), [1.0]]),
        bounds=[(0.0, 1.0)] * m + [(0.0, None)],
        constraints=cons,
        method="SLSQP",
        options={"maxiter": 400, "ftol": tol},
    )
    lam = np.maximum(res.x[:m], 0.0)
    s = lam.sum()
    lam = lam / s if s > 0 else lam0
    center = H.T @ lam
    r = float(np.max(norm(center[None, :] - K, spec)))
    cert = Certificate("slsqp-epigraph", float("nan"), int(res.nit), bool(res.success))
    return r, center, cert


def radius_lower_bound(
    H: np.ndarray, K: np.ndarray, spec: NormSpec, center: np.ndarray
) -> float:
    """Lagrangian lower bound on min_{x in conv(H)} max_j ||x - K_j||.

    For any simplex weights nu over the K vertices and subgradients s_j of
    ||. - K_j|| at ``center``,

        r* >= sum_j nu_j ||center - K_j|| + min_{v in H} <sum nu_j s_j, v - center>,

    and the best nu solves a small LP.  Valid for any center; tight at the
    optimum.  Only used for certification, never for the value itself.
    """
    m, n = H.shape
    kk = K.shape[0]
    w = _winner(spec.weight_array(), n)
    p = spec.p
    dists = norm(center[None, :] - K, spec)
    subs = np.zeros((kk, n))
    for j in range(kk):
        z = center - K[j]
        r = dists[j]
        if r <= 1e-300:
            continue
        if spec.is_inf:
            i = int(np.argmax(w * np.abs(z)))
            subs[j, i] = w[i] * np.sign(z[i])
        elif p == 1.0:
            subs[j] = w * np.sign(z)
        elif p == 2.0:
            subs[j] = w * z / r
        else:
            subs[j] = w * np.abs(z) ** (p - 1.0) * np.sign(z) / r ** (p - 1.0)
    # LP over (nu, t): maximize t subject to
    # t <= sum_j nu_j (dists_j + <s_j, v - center>) for every vertex v of H.
    nv = kk + 1
    c = np.zeros(nv)
    c[-1] = -1.0
    rows, rhs = [], []
    off = (H - center) @ subs.T  # (m, kk): <s_j, v - center>
    for i in range(m):
        r = np.zeros(nv)
        r[:kk] = -(dists + off[i])
        r[-1] = 1.0
        rows.append(r)
        rhs.append(0.0)
    A_eq = np.concatenate([np.ones(kk), [0.0]])[None, :]
    res = linprog(
        c, A_ub=np.vstack(rows), b_ub=np.array(rhs), A_eq=A_eq, b_eq=np.array([1.0]),
        bounds=[(0, None)] * kk + [(None, None)], method="highs",
    )
    if res.status != 0:
        return 0.0
    return float(res.x[-1])


# ---------------------------------------------------------------------------
# General-p first-order distance (certified Frank-Wolfe on the p-power)
# ---------------------------------------------------------------------------

def fw_pnorm_distance(A: np.ndarray, B: np.ndarray, spec: NormSpec, tol=1e-9, max_iter=4000):
    """min over conv(A) x conv(B) of the weighted p-norm, 1 < p < inf, p != 2.

    Minimizes the norm itself (well scaled even for tiny distances) over the
    product of simplices with a sequential quadratic solve, then certifies
    a posteriori with the conditional-gradient gap of the convex norm
    objective, which bounds the distance error directly.  Falls back to
    conditional-gradient refinement when the certificate is not yet met.
    Returns (d, x, y, cert).
    """
    k, n = A.shape
    l = B.shape[0]
    w = _winner(spec.weight_array(), n)
    p = spec.p
    zero_floor = 1e-12

    def split(zv):
        return zv[:k], zv[k : k + l]

    def grad_z(diff):
        r = float(norm(diff, spec))
        if r <= zero_floor:
            return np.zeros(n), r
        return w * np.abs(diff) ** (p - 1.0) * np.sign(diff) / r ** (p - 1.0), r

    def fun(zv):
        lam, mu = split(zv)
        return float(norm(A.T @ lam - B.T @ mu, spec))

    def jac(zv):
        lam, mu = split(zv)
        g, _ = grad_z(A.T @ lam - B.T @ mu)
        return np.concatenate([A @ g, -(B @ g)])

    z0 = np.concatenate([np.full(k, 1.0 / k), np.full(l, 1.0 / l)])
    if fun(z0) <= zero_floor:
        x = A.T @ z0[:k]
        return 0.0, x, x.copy(), Certificate("pnorm-overlap", 0.0, 0, True)
    cons = [
        {"type": "eq", "fun": lambda zv: np.array([zv[:k].sum() - 1.0]),
         "jac": lambda zv: np.concatenate([np.ones(k), np.zeros(l)])[None, :]},
        {"type": "eq", "fun": lambda zv: np.array([zv[k:].sum() - 1.0]),
         "jac": lambda zv: np.concatenate([np.zeros(k), np.ones(l)])[None, :]},
    ]
    res = minimize(fun, z0, jac=jac, bounds=[(0.0, 1.0)] * (k + l),
                   constraints=cons, method="SLSQP",
                   options={"maxiter": 400, "ftol": 1e-14})
    zv = np.maximum(res.x, 0.0)
    lam, mu = split(zv)
    lam /= lam.sum()
    mu /= mu.sum()

    def fw_gap(lam_v, mu_v):
        g, r = grad_z(A.T @ lam_v - B.T @ mu_v)
        if r <= zero_floor:
            return 0.0
        ga, gb = A @ g, -(B @ g)
        return (float(np.dot(ga, lam_v) - np.min(ga))
                + float(np.dot(gb, mu_v) - np.min(gb)))

    gap = fw_gap(lam, mu)
    it = int(res.nit)
    while gap > tol and it < max_iter:
        g, r = grad_z(A.T @ lam - B.T @ mu)
        if r <= zero_floor:
            gap = 0.0
            break
        ga, gb = A @ g, -(B @ g)
        da = np.zeros(k)
        da[int(np.argmin(ga))] = 1.0
        db = np.zeros(l)
        db[int(np.argmin(gb))] = 1.0

        def phi(eta):
            la = (1 - eta) * lam + eta * da
            m = (1 - eta) * mu + eta * db
            return float(norm(A.T @ la - B.T @ m, spec))

        eta, _ = ternary_min(phi, 0.0, 1.0, iters=50)
        if eta <= 1e-16:
            break
        lam = (1 - eta) * lam + eta * da
        mu = (1 - eta) * mu + eta * db
        it += 1
        gap = fw_gap(lam, mu)
    x, y = A.T @ lam, B.T @ mu
    d = float(norm(x - y, spec))
    converged = gap <= tol or d <= zero_floor
    cert = Certificate("slsqp+cg-pnorm", gap, it, converged)
    if not converged:
        raise SolverBudgetExceeded(
            f"p-norm distance gap {gap:.3e} above tol after {it} iterations"
        )
    return d, x, y, cert


# ---------------------------------------------------------------------------
# 1-D convex minimization
# ---------------------------------------------------------------------------

def ternary_min(f: Callable[[float], float], lo: float, hi: float, iters: int = 100):
    """Exact-enough ternary search for a convex function on [lo, hi]."""
    a, b = float(lo), float(hi)
    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if f(m1) <= f(m2):
            b = m2
        else:
            a = m1
    t = 0.5 * (a + b)
    return t, f(t)


def batched_line_min(phi_batch: Callable[[np.ndarray], np.ndarray], lo: float,
                     hi: float, rounds: int = 7, pts: int = 33):
    """Grid-refinement minimizer for a convex function of one variable.

    ``phi_batch`` maps an array of parameters to an array of values; each
    round shrinks the bracket to one grid cell around the incumbent, so the
    final parameter error is (hi - lo) * (2 / (pts - 1))**rounds.
    """
    a, b = float(lo), float(hi)
    best_t, best_v = a, math.inf
    for _ in range(rounds):
        ts = np.linspace(a, b, pts)
        vals = np.asarray(phi_batch(ts))
        j = int(np.argmin(vals))
        if vals[j] < best_v:
            best_v = float(vals[j])
            best_t = float(ts[j])
        step = (b - a) / (pts - 1)
        a2, b2 = max(a, ts[j] - step), min(b, ts[j] + step)
        if b2 - a2 <= 0.0 or b2 - a2 == b - a:
            break
        a, b = a2, b2
    return best_t, best_v
