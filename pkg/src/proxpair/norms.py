"""Weighted p-norms on R^n and strict-convexity certification.

A norm here is always a (optionally weighted) p-norm with p in [1, inf]:

    ||x|| = (sum_i w_i |x_i|^p)^(1/p)      for finite p,
    ||x|| = max_i w_i |x_i|                for p = inf.

p = inf is encoded as ``math.inf`` (a distinct IEEE value, never a large
finite float).  Weights default to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "DimensionMismatch",
    "NormSpec",
    "StrictConvexityVerdict",
    "norm",
    "dual_norm",
    "dual_maximizer",
    "is_strictly_convex",
]

# Tolerances fixed by contract: exact-arithmetic equality of norms, and the
# threshold below which a witness segment counts as trivial.
NORM_EQ_TOL = 1e-12
SEGMENT_MIN_LEN = 1e-9


class DimensionMismatch(ValueError):
    """Vector dimension does not match the ambient space."""


@dataclass(frozen=True)
class NormSpec:
    """A weighted p-norm on R^dim.

    Parameters
    ----------
    p : float
        Exponent, >= 1 or ``math.inf``.
    dim : int
        Ambient dimension, >= 1.
    weights : tuple of float, optional
        Strictly positive per-coordinate weights of length ``dim``.
    """

    p: float
    dim: int
    weights: Optional[tuple] = None
    _w: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != self.dim:
                raise ValueError("weights length must equal dim")
            if any(not (x > 0.0 and math.isfinite(x)) for x in w):
                raise ValueError("weights must be finite and strictly positive")
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "_w", np.asarray(w, dtype=float))

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    def weight_array(self) -> Optional[np.ndarray]:
        return self._w

    def to_dict(self) -> dict:
        out = {"p": "inf" if self.is_inf else self.p, "dim": self.dim}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "NormSpec":
        p = data["p"]
        if isinstance(p, str):
            if p != "inf":
                raise ValueError(f'p must be a number or "inf", got {p!r}')
            p = math.inf
        weights = data.get("weights")
        return cls(p=float(p), dim=int(data["dim"]), weights=tuple(weights) if weights else None)


def _check_dim(a: np.ndarray, spec: NormSpec) -> None:
    if a.shape[-1] != spec.dim:
        raise DimensionMismatch(f"vector dimension {a.shape[-1]} != space dimension {spec.dim}")


def norm(v, spec: NormSpec):
    """Weighted p-norm of ``v``.

    Accepts a single vector of shape (dim,) or a batch of shape (..., dim);
    the norm is taken along the last axis.
    """
    a = np.asarray(v, dtype=float)
    _check_dim(a, spec)
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    x = np.abs(a)
    w = spec.weight_array()
    if spec.is_inf:
        y = x if w is None else w * x
        return y.max(axis=-1)
    p = spec.p
    if p == 1.0:
        y = x if w is None else w * x
        return y.sum(axis=-1)
    if p == 2.0:
        y = x * x if w is None else w * x * x
        return np.sqrt(y.sum(axis=-1))
    # Scale by the max entry so x**p cannot overflow for large p.
    m = x.max(axis=-1, keepdims=True)
    safe = np.where(m > 0.0, m, 1.0)
    y = (x / safe) ** p
    if w is not None:
        y = w * y
    return np.squeeze(safe, axis=-1) * y.sum(axis=-1) ** (1.0 / p)


def dual_norm(direction, spec: NormSpec) -> float:
    """Dual norm of a functional, i.e. max of <direction, x> over the unit ball."""
    d = np.asarray(direction, dtype=float)
    _check_dim(d, spec)
    w = spec.weight_array()
    x = np.abs(d)
    if spec.is_inf:
        # Unit ball is the box |x_i| <= 1/w_i.
        y = x if w is None else x / w
        return float(y.sum())
    p = spec.p
    if p == 1.0:
        y = x if w is None else x / w
        return float(y.max())
    q = p / (p - 1.0)
    y = x if w is None else x * w ** (-1.0 / p)
    return float(np.linalg.norm(y, ord=q))


def dual_maximizer(direction, spec: NormSpec) -> np.ndarray:
    """A point x with ||x|| = 1 and <direction, x> = dual_norm(direction).

    Ties (p = 1 with several maximal coordinates) are broken by lowest index.
    """
    d = np.asarray(direction, dtype=float)
    _check_dim(d, spec)
    if not np.any(d != 0.0):
        raise ValueError("direction must be nonzero")
    w = spec.weight_array()
    wa = np.ones(spec.dim) if w is None else w
    sgn = np.where(d >= 0.0, 1.0, -1.0)
    if spec.is_inf:
        return sgn / wa
    p = spec.p
    if p == 1.0:
        scores = np.abs(d) / wa
        i = int(np.argmax(scores))
        x = np.zeros(spec.dim)
        x[i] = sgn[i] / wa[i]
        return x
    # Interior p: maximizer of <d, x> subject to sum w|x|^p = 1 via Hoelder.
    q = p / (p - 1.0)
    t = np.abs(d) / wa
    x = sgn * t ** (q - 1.0)
    return x / norm(x, spec)


@dataclass(frozen=True)
class StrictConvexityVerdict:
    """Outcome of the strict-convexity test.

    kind is one of "strictly_convex", "not_strictly_convex", "unknown".
    For a negative verdict the witness is a pair (c1, c2) of distinct unit
    vectors whose midpoint also has norm one.
    """

    kind: str
    c1: Optional[np.ndarray] = None
    c2: Optional[np.ndarray] = None

    @property
    def midpoint(self) -> Optional[np.ndarray]:
        if self.c1 is None:
            return None
        return 0.5 * (self.c1 + self.c2)


def _verify_flat_segment(c1: np.ndarray, c2: np.ndarray, spec: NormSpec) -> bool:
    mid = 0.5 * (c1 + c2)
    return (
        abs(norm(c1, spec) - 1.0) <= NORM_EQ_TOL
        and abs(norm(c2, spec) - 1.0) <= NORM_EQ_TOL
        and abs(norm(mid, spec) - 1.0) <= NORM_EQ_TOL
        and norm(c1 - c2, spec) > SEGMENT_MIN_LEN
    )


def is_strictly_convex(spec: NormSpec) -> StrictConvexityVerdict:
    """Decide strict convexity of the unit ball.

    For p in (1, inf) the verdict is analytic.  For p in {1, inf} with
    dim >= 2 a flat segment of the unit sphere is constructed from the known
    axis-aligned faces and verified by direct norm evaluation before being
    returned.  Dimension one is strictly convex for every p.
    """
    if spec.dim == 1 or (1.0 < spec.p and not spec.is_inf):
        return StrictConvexityVerdict("strictly_convex")
    w = spec.weight_array()
    wa = np.ones(spec.dim) if w is None else w
    e0 = np.zeros(spec.dim)
    e1 = np.zeros(spec.dim)
    if spec.is_inf:
        # Two corners of the face {x : w_0 x_0 = 1} of the box.
        e0[0] = 1.0 / wa[0]
        e0[1] = 1.0 / wa[1]
        e1[0] = 1.0 / wa[0]
        e1[1] = -1.0 / wa[1]
    else:  # p == 1
        e0[0] = 1.0 / wa[0]
        e1[1] = 1.0 / wa[1]
    if _verify_flat_segment(e0, e1, spec):
        return StrictConvexityVerdict("not_strictly_convex", c1=e0, c2=e1)
    return StrictConvexityVerdict("unknown")
