"""Best proximity pairs of relatively nonexpansive cyclic maps.

Three affine cyclic maps on classic geometries:

* a translate swap on parallel segments (every proximal pair is already a
  best proximity pair),
* a reflection-translate on the same segments (a unique best proximity
  pair at the midpoints),
* a quarter turn of a square onto itself (distance zero: the solve
  degenerates to finding the fixed point).
"""

import numpy as np

from proxpair import BodyPair, NormSpec, Polytope, norm
from proxpair.solver import AffineMap, CyclicMapSpec, check_relatively_nonexpansive, solve_bpp

L2 = NormSpec(p=2, dim=2)
A = Polytope([[0.0, 0.0], [0.0, 1.0]])
B = Polytope([[1.0, 0.0], [1.0, 1.0]])
pair = BodyPair(A, B, L2)


def show(name, pair_, T):
    cert = check_relatively_nonexpansive(T, pair_)
    res = solve_bpp(pair_, T, tol=1e-6, seed=3)
    gap = float(norm(res.x - T.apply(res.x, "A"), pair_.norm))
    print(f"== {name} ==")
    print(f"  nonexpansiveness: {cert.mode_used} certificate, ok={cert.ok}")
    print(f"  outcome: {res.trace.outcome} in {len(res.trace.iterations) - 1} steps "
          f"(c = {res.trace.c_used:.4f})")
    print(f"  x* = {np.round(res.x, 6)},  T x* = {np.round(T.apply(res.x, 'A'), 6)}, "
          f"||x* - T x*|| = {gap:.9f}")
    gaps = [r.delta_n - r.d_n for r in res.trace.iterations[:6]]
    print(f"  first gaps: {[f'{g:.4f}' for g in gaps]}")
    print()


show("translate swap", pair, CyclicMapSpec(
    AffineMap(np.eye(2), [1.0, 0.0]), AffineMap(np.eye(2), [-1.0, 0.0]), "isometry",
))

show("reflection-translate (unique best proximity pair)", pair, CyclicMapSpec(
    AffineMap([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0]),
    AffineMap([[1.0, 0.0], [0.0, -1.0]], [-1.0, 1.0]),
    "isometry",
))

square = Polytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
show("quarter turn of the square (fixed point)", BodyPair(square, square, L2),
     CyclicMapSpec(
         AffineMap([[0.0, -1.0], [1.0, 0.0]], [1.0, 0.0]),
         AffineMap([[0.0, -1.0], [1.0, 0.0]], [1.0, 0.0]),
         "isometry",
     ))
