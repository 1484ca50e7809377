"""Canonical fixture geometry.

Builders for the library's reference problems: the dimension-4 slice pair
(two congruent sections of the unit ball of a hyperplane, offset by h along
the first axis), the sup-norm segment pair, the mate-uniqueness
counterexample, parallel segments under the Euclidean norm, and the two
cyclic-map solve problems.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ball3_slice_vertices",
    "slice_support_gap",
    "example1_dim4_vertices",
    "canonical_problems",
]


def ball3_slice_vertices(rings: int = 5, azimuth: int = 24) -> np.ndarray:
    """Vertices on the unit 2-sphere: stacked regular polygons plus poles.

    Each horizontal section of the ball is approximated by a regular
    ``azimuth``-gon; ``rings`` is the number of non-pole latitude levels.
    All vertices lie exactly on the sphere, so the hull is inscribed.
    """
    levels = np.pi * np.arange(1, rings + 1) / (rings + 1)
    pts = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])]
    for phi in levels:
        r = math.sin(phi)
        z = math.cos(phi)
        for j in range(azimuth):
            th = 2.0 * math.pi * j / azimuth
            pts.append(np.array([r * math.cos(th), r * math.sin(th), z]))
    return np.array(pts)


def slice_support_gap(verts3: np.ndarray, directions: int = 4000) -> float:
    """Hausdorff distance estimate between the unit ball and the inscribed hull.

    For convex bodies the Hausdorff distance equals the sup of support-function
    differences; directions are sampled on a deterministic Fibonacci sphere.
    """
    i = np.arange(directions)
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    z = 1.0 - 2.0 * (i + 0.5) / directions
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    th = 2.0 * math.pi * i / golden
    U = np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)
    support = (U @ verts3.T).max(axis=1)
    return float(np.max(1.0 - support))


def example1_dim4_vertices(rings: int = 5, azimuth: int = 24) -> np.ndarray:
    """The slice body {x in R^4 : x_1 = 0, ||(x_2, x_3, x_4)|| <= 1} as an
    inscribed polytope."""
    v3 = ball3_slice_vertices(rings, azimuth)
    out = np.zeros((v3.shape[0], 4))
    out[:, 1:] = v3
    return out


def _poly(vertices) -> dict:
    return {"polytope": [[float(x) for x in row] for row in np.asarray(vertices)]}


def canonical_problems() -> dict:
    """The six canonical problem specifications, keyed by fixture name."""
    slice_verts = example1_dim4_vertices()
    gap = slice_support_gap(ball3_slice_vertices())
    segA = [[0.0, 0.0], [0.0, 1.0]]
    segB = [[1.0, 0.0], [1.0, 1.0]]
    square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    reflect = {"matrix": [[1.0, 0.0], [0.0, -1.0]]}
    rot90 = [[0.0, -1.0], [1.0, 0.0]]

    return {
        "example1-dim4": {
            "notes": (
                "Slice pair at h=0.5: hyperplane sections of the unit ball, "
                f"each section approximated by stacked 24-gon rings; inscribed-"
                f"polytope Hausdorff error <= {gap:.6f}."
            ),
            "norm": {"p": 2, "dim": 4},
            "bodies": {
                "A": _poly(slice_verts),
                "B": {"translate": {"base": _poly(slice_verts), "shift": [0.5, 0.0, 0.0, 0.0]}},
            },
            "pairs": [["A", "B"]],
            "maps": {},
            "tasks": [
                {"op": "analyze", "pair": ["A", "B"], "tol": 1e-7, "seed": 11, "budget": 96},
                {"op": "structure", "pair": ["A", "B"], "tol": 1e-7, "seed": 12, "count": 300},
            ],
        },
        "example2-linf": {
            "notes": "Sup-norm segment pair with A0 = A, B0 = B and c0 = 1.",
            "norm": {"p": "inf", "dim": 2},
            "bodies": {"A": _poly(segA), "B": _poly(segB)},
            "pairs": [["A", "B"]],
            "maps": {},
            "tasks": [
                {"op": "analyze", "pair": ["A", "B"], "tol": 1e-7, "seed": 21, "budget": 64},
                {"op": "structure", "pair": ["A", "B"], "tol": 1e-7, "seed": 22, "count": 1500},
            ],
        },
        "semisharp-counterexample-linf": {
            "notes": "Origin against a flat sup-norm sphere segment: mates are not unique.",
            "norm": {"p": "inf", "dim": 2},
            "bodies": {"A": _poly([[0.0, 0.0]]), "B": _poly([[1.0, 1.0], [1.0, -1.0]])},
            "pairs": [["A", "B"]],
            "maps": {},
            "tasks": [
                {"op": "analyze", "pair": ["A", "B"], "tol": 1e-7, "seed": 31, "budget": 32},
                {"op": "falsify", "pair": ["A", "B"], "tol": 1e-7, "seed": 32, "budget": 32},
            ],
        },
        "parallel-segments-l2": {
            "notes": "Euclidean parallel unit segments at distance 1.",
            "norm": {"p": 2, "dim": 2},
            "bodies": {"A": _poly(segA), "B": _poly(segB)},
            "pairs": [["A", "B"]],
            "maps": {},
            "tasks": [
                {"op": "analyze", "pair": ["A", "B"], "tol": 1e-7, "seed": 41, "budget": 64},
                {
                    "op": "structure", "pair": ["A", "B"], "tol": 1e-7, "seed": 42,
                    "count": 1500, "levels": 5, "c": 0.95,
                },
            ],
        },
        "reflection-bpp": {
            "notes": "Reflection-translate cyclic isometry on the parallel segments; "
                     "unique best proximity pair at the midpoints.",
            "norm": {"p": 2, "dim": 2},
            "bodies": {"A": _poly(segA), "B": _poly(segB)},
            "pairs": [["A", "B"]],
            "maps": {
                "T": {
                    "T_AB": {"matrix": reflect["matrix"], "offset": [1.0, 1.0]},
                    "T_BA": {"matrix": reflect["matrix"], "offset": [-1.0, 1.0]},
                    "mode": "isometry",
                }
            },
            "tasks": [
                {
                    "op": "solve", "pair": ["A", "B"], "map": "T",
                    "tol": 1e-6, "seed": 51, "max_iter": 400,
                }
            ],
        },
        "rotation-fixedpoint": {
            "notes": "Quarter turn of the unit square about its center; distance zero, "
                     "so the best proximity pair degenerates to the fixed point.",
            "norm": {"p": 2, "dim": 2},
            "bodies": {"A": _poly(square), "B": _poly(square)},
            "pairs": [["A", "B"]],
            "maps": {
                "T": {
                    "T_AB": {"matrix": rot90, "offset": [1.0, 0.0]},
                    "T_BA": {"matrix": rot90, "offset": [1.0, 0.0]},
                    "mode": "isometry",
                }
            },
            "tasks": [
                {
                    "op": "solve", "pair": ["A", "B"], "map": "T",
                    "tol": 1e-6, "seed": 61, "max_iter": 100,
                }
            ],
        },
    }
