"""Weighted p-norms and strict convexity of their unit balls.

Strictly convex norms have unit spheres with no flat segments; the sup and
sum norms fail this, and the failure is exactly what breaks mate uniqueness
for convex pairs.  This script evaluates a few norms and produces verified
flat-segment witnesses.
"""

import math

import numpy as np

from proxpair import NormSpec, dual_maximizer, dual_norm, is_strictly_convex, norm

print("== Evaluating weighted p-norms ==")
for p in (1.0, 1.5, 2.0, 3.0, math.inf):
    spec = NormSpec(p=p, dim=2)
    v = np.array([3.0, -4.0])
    print(f"  ||(3, -4)||_{p}: {norm(v, spec):.6f}")

spec_w = NormSpec(p=2, dim=2, weights=(4.0, 1.0))
print(f"  weighted l2 (w = (4, 1)) of (1, 1): {norm([1.0, 1.0], spec_w):.6f}"
      "   (ellipse metric)")

print()
print("== Strict convexity verdicts ==")
for p in (1.0, 1.5, 2.0, math.inf):
    spec = NormSpec(p=p, dim=2)
    verdict = is_strictly_convex(spec)
    print(f"  p = {p}: {verdict.kind}")
    if verdict.kind == "not_strictly_convex":
        c1, c2, mid = verdict.c1, verdict.c2, verdict.midpoint
        print(f"    witness segment on the unit sphere: {c1} -- {c2}")
        print(f"    both endpoints and the midpoint {mid} have norm "
              f"{norm(c1, spec):.0f}, {norm(c2, spec):.0f}, {norm(mid, spec):.0f}")

print()
print("== Support geometry: dual norms ==")
d = np.array([2.0, 1.0])
for p in (1.0, 2.0, math.inf):
    spec = NormSpec(p=p, dim=2)
    x = dual_maximizer(d, spec)
    print(f"  p = {p}: dual norm of (2, 1) is {dual_norm(d, spec):.6f}, "
          f"attained on the sphere at {np.round(x, 6)}")
