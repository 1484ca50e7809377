"""Distances, diameters, radii and proximal cores of convex pairs.

The running example is the sup-norm segment pair

    A = {0} x [0, 1],   B = {1} x [0, 1],

where every cross distance equals 1: the pair distance and the pair
diameter coincide, every point of each segment attains the distance
(A0 = A, B0 = B), and mates are wildly non-unique.  The same geometry under
the Euclidean norm behaves completely differently.
"""

import math

import numpy as np

from proxpair import (
    BodyPair,
    NormSpec,
    Polytope,
    analyze_pair,
    pair_diameter,
    pair_distance,
    property_uc_falsify,
    proximal_core,
    pythagorean_residual,
    restricted_radius,
    semisharp_check,
)

A = Polytope([[0.0, 0.0], [0.0, 1.0]])
B = Polytope([[1.0, 0.0], [1.0, 1.0]])

for label, p in (("sup norm", math.inf), ("Euclidean", 2.0)):
    spec = NormSpec(p=p, dim=2)
    pair = BodyPair(A, B, spec)
    print(f"== {label} ==")
    d = pair_distance(pair)
    delta = pair_diameter(pair)
    r = restricted_radius(A, B, spec)
    print(f"  d(A, B)      = {d.d:.9f}   witness {np.round(d.x, 6)} -- {np.round(d.y, 6)}")
    print(f"  delta(A, B)  = {delta.delta:.9f}")
    print(f"  r(A, B)      = {r.r:.9f}   center {np.round(r.center, 6)}")
    metrics, core = analyze_pair(pair, seed=0)
    print(f"  flags: proximal={metrics.proximal} semisharp={metrics.semisharp} "
          f"sharp={metrics.sharp} parallel={metrics.parallel}")
    semi = semisharp_check(pair)
    if not semi.holds:
        x, y, z = semi.witness
        print(f"  mate uniqueness FAILS: {np.round(x, 3)} has mates "
              f"{np.round(y, 3)} and {np.round(z, 3)}")
    print()

print("== The strict-convexity counterexample ==")
spec = NormSpec(p=math.inf, dim=2)
pair = BodyPair(Polytope([[0.0, 0.0]]), Polytope([[1.0, 1.0], [1.0, -1.0]]), spec)
v = semisharp_check(pair)
x, y, z = v.witness
print(f"  origin against a flat sphere segment: mates {np.round(y, 3)} and "
      f"{np.round(z, 3)} at mutual distance 2")
uc = property_uc_falsify(pair)
print(f"  uniqueness-of-approach counterexample: separation {uc.separation}")

print()
print("== Inner-product geometry: the Pythagorean identity ==")
spec2 = NormSpec(p=2, dim=2)
pair2 = BodyPair(A, B, spec2)
core2 = proximal_core(pair2)
res = pythagorean_residual(pair2, [0.0, 0.0], [1.0, 1.0], core2)
print(f"  l2 residual at (0,0), (1,1): {res:.3e}  (identity holds)")
spec1 = NormSpec(p=1, dim=2)
pair1 = BodyPair(A, B, spec1)
core1 = proximal_core(pair1)
res1 = pythagorean_residual(pair1, [0.0, 0.0], [1.0, 1.0], core1)
print(f"  l1 residual at the same points: {res1:.3f}  (identity genuinely fails)")
