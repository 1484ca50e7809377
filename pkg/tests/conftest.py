import math

import numpy as np
import pytest

from proxpair import Ball, BodyPair, NormSpec, Polytope, Translate
from proxpair.fixtures import example1_dim4_vertices

L2 = NormSpec(p=2, dim=2)
LINF = NormSpec(p=math.inf, dim=2)
L1 = NormSpec(p=1, dim=2)

SEG_A = Polytope([[0.0, 0.0], [0.0, 1.0]])
SEG_B = Polytope([[1.0, 0.0], [1.0, 1.0]])


@pytest.fixture
def parallel_segments_l2():
    return BodyPair(SEG_A, SEG_B, L2)


@pytest.fixture
def example2_linf():
    return BodyPair(SEG_A, SEG_B, LINF)


@pytest.fixture
def semisharp_counterexample():
    return BodyPair(Polytope([[0.0, 0.0]]), Polytope([[1.0, 1.0], [1.0, -1.0]]), LINF)


@pytest.fixture(scope="session")
def example1_dim4():
    verts = example1_dim4_vertices()
    A = Polytope(verts)
    B = Translate(A, [0.5, 0.0, 0.0, 0.0])
    return BodyPair(A, B, NormSpec(p=2, dim=4))


def random_parallel_pair(seed: int, dim_choices=(2, 3, 4)):
    """Seeded random proximal parallel polytope pair under the l2 norm.

    The base polytope lives in a random hyperplane; the shift is along the
    unit normal, which makes the pair sharp proximal with mates x + h.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.choice(dim_choices))
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    plane = Q[:, : n - 1]
    normal = Q[:, n - 1]
    m = int(rng.integers(3, 7))
    coords = rng.uniform(-1.0, 1.0, size=(m, n - 1))
    base = coords @ plane.T + rng.uniform(-1.0, 1.0, size=n)
    t = float(rng.uniform(0.5, 2.0))
    h = t * normal
    spec = NormSpec(p=2, dim=n)
    return BodyPair(Polytope(base), Polytope(base + h), spec), h
