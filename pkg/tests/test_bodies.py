import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from proxpair import (
    Ball,
    BodyPair,
    NormSpec,
    Polytope,
    Translate,
    contains,
    convex_hull,
    norm,
    sample,
    support,
    translate_offset,
)
from proxpair.bodies import body_from_dict, body_to_dict, resolve

L2 = NormSpec(p=2, dim=2)
UNIT_SQUARE = Polytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class TestContains:
    def test_centroid_of_square(self):
        assert contains(UNIT_SQUARE, [0.5, 0.5], L2, tol=1e-9)

    def test_outside_bounding_box(self):
        assert not contains(UNIT_SQUARE, [2.0, 0.0], L2, tol=1e-9)

    def test_ball_boundary_point(self):
        assert contains(Ball([0.0, 0.0], 1.0), [1.0, 0.0], L2, tol=1e-9)

    def test_linf_polytope(self):
        spec = NormSpec(p=math.inf, dim=2)
        assert contains(UNIT_SQUARE, [0.25, 0.75], spec, tol=1e-9)
        assert not contains(UNIT_SQUARE, [1.5, 0.5], spec, tol=1e-9)


class TestSupport:
    def test_square_axis_direction(self):
        val, pt = support(UNIT_SQUARE, [1.0, 0.0], L2)
        assert val == 1.0
        assert pt[0] == 1.0

    def test_ball_support(self):
        val, pt = support(Ball([0.0, 0.0], 2.0), [0.0, 1.0], L2)
        assert val == pytest.approx(2.0, abs=1e-12)
        np.testing.assert_allclose(pt, [0.0, 2.0], atol=1e-12)

    def test_tie_broken_by_lowest_vertex_index(self):
        seg = Polytope([[0.0, 0.0], [1.0, 1.0]])
        # Both vertices score 0 under (1, -1); enumeration confirms the tie.
        scores = seg.vertices @ np.array([1.0, -1.0])
        assert scores[0] == scores[1] == 0.0
        val, pt = support(seg, [1.0, -1.0], L2)
        assert val == 0.0
        np.testing.assert_allclose(pt, [0.0, 0.0])

    def test_zero_direction_rejected(self):
        with pytest.raises(ValueError):
            support(UNIT_SQUARE, [0.0, 0.0], L2)

    def test_support_dominates_samples(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = rng.standard_normal(2)
            if not np.any(d):
                continue
            val, _ = support(UNIT_SQUARE, d, L2)
            pts = sample(UNIT_SQUARE, 200, 11, L2)
            assert np.all(pts @ d <= val + 1e-9)


class TestConvexHull:
    def test_singleton(self):
        h = convex_hull([[0.0, 0.0]])
        np.testing.assert_allclose(h.vertices, [[0.0, 0.0]])

    def test_collinear_interior_removed(self):
        h = convex_hull([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]])
        assert sorted(map(tuple, h.vertices)) == [(0.0, 0.0), (1.0, 0.0)]

    def test_triangle_with_interior_points(self):
        # Membership feasibility on each candidate: interior points must go.
        rng = np.random.default_rng(7)
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        lam = rng.dirichlet(np.ones(3), size=20)
        h = convex_hull(np.vstack([tri, lam @ tri]))
        assert sorted(map(tuple, h.vertices)) == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]

    def test_hull_idempotence(self):
        rng = np.random.default_rng(5)
        pts = rng.random((25, 2))
        h1 = convex_hull(pts)
        h2 = convex_hull(h1.vertices)
        assert sorted(map(tuple, h1.vertices)) == sorted(map(tuple, h2.vertices))

    def test_three_dim_hull(self):
        cube = np.array(
            [[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)]
        )
        inner = np.full((4, 3), 0.5)
        h = convex_hull(np.vstack([cube, inner]))
        assert sorted(map(tuple, h.vertices)) == sorted(map(tuple, cube))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            convex_hull(np.zeros((0, 2)))


class TestTranslateOffset:
    def test_parallel_segments(self):
        pair = BodyPair(
            Polytope([[0.0, 0.0], [0.0, 1.0]]), Polytope([[1.0, 0.0], [1.0, 1.0]]), L2
        )
        t = translate_offset(pair)
        np.testing.assert_allclose(t.h, [1.0, 0.0], atol=1e-12)
        assert t.norm_matches_d

    def test_identical_bodies(self):
        pair = BodyPair(UNIT_SQUARE, UNIT_SQUARE, L2)
        t = translate_offset(pair)
        np.testing.assert_allclose(t.h, [0.0, 0.0], atol=1e-12)
        assert t.norm_matches_d  # d = 0 = ||h||

    def test_square_vs_triangle_none(self):
        tri = Polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        assert translate_offset(BodyPair(UNIT_SQUARE, tri, L2)) is None

    def test_translate_with_shear_none(self):
        sheared = Polytope([[0.0, 0.0], [1.0, 0.2], [1.0, 1.0], [0.0, 1.0]])
        assert translate_offset(BodyPair(UNIT_SQUARE, sheared, L2)) is None

    def test_vertexwise_consistency(self):
        rng = np.random.default_rng(2)
        V = rng.random((6, 3))
        h = np.array([0.3, -0.2, 1.0])
        spec3 = NormSpec(p=2, dim=3)
        pair = BodyPair(Polytope(V), Polytope(V + h), spec3)
        t = translate_offset(pair)
        assert t is not None
        hullA = convex_hull(V).vertices
        hullB = convex_hull(V + h).vertices
        for a in hullA:
            assert min(np.max(np.abs(a + t.h - b)) for b in hullB) < 1e-9


class TestSample:
    def test_singleton_polytope(self):
        pts = sample(Polytope([[2.0, 3.0]]), 5, 0, L2)
        assert pts.shape == (5, 2)
        np.testing.assert_allclose(pts, np.tile([2.0, 3.0], (5, 1)))

    def test_determinism(self):
        a = sample(UNIT_SQUARE, 1000, 42, L2)
        b = sample(UNIT_SQUARE, 1000, 42, L2)
        np.testing.assert_array_equal(a, b)

    def test_ball_samples_inside(self):
        pts = sample(Ball([0.0, 0.0], 1.0), 1000, 9, L2)
        assert np.all(norm(pts, L2) <= 1.0 + 1e-9)

    def test_polytope_samples_inside(self):
        pts = sample(UNIT_SQUARE, 500, 1, L2)
        assert np.all((pts >= -1e-12) & (pts <= 1.0 + 1e-12))

    def test_weighted_ball_samples_inside(self):
        spec = NormSpec(p=2, dim=2, weights=(4.0, 1.0))
        pts = sample(Ball([1.0, 1.0], 0.7), 500, 3, spec)
        assert np.all(norm(pts - np.array([1.0, 1.0]), spec) <= 0.7 + 1e-9)

    def test_count_validation(self):
        with pytest.raises(ValueError):
            sample(UNIT_SQUARE, 0, 0, L2)


class TestTranslateBody:
    def test_resolve_nested(self):
        t = Translate(Translate(UNIT_SQUARE, [1.0, 0.0]), [0.0, 2.0])
        r = resolve(t)
        np.testing.assert_allclose(
            sorted(map(tuple, r.vertices)),
            sorted(map(tuple, UNIT_SQUARE.vertices + np.array([1.0, 2.0]))),
        )

    def test_ball_translate(self):
        r = resolve(Translate(Ball([0.0, 0.0], 1.5), [2.0, -1.0]))
        np.testing.assert_allclose(r.center, [2.0, -1.0])
        assert r.radius == 1.5


def test_serialization_round_trip():
    bodies = [
        UNIT_SQUARE,
        Ball([0.5, -1.0], 2.0),
        Translate(Ball([0.0, 0.0], 1.0), [3.0, 0.0]),
    ]
    for b in bodies:
        d = body_to_dict(b)
        b2 = body_from_dict(d)
        assert body_to_dict(b2) == d


def test_linf_ball_becomes_box():
    spec = NormSpec(p=math.inf, dim=2)
    from proxpair.bodies import as_vertex_body

    box = as_vertex_body(Ball([0.0, 0.0], 1.0), spec)
    assert sorted(map(tuple, box.vertices)) == [
        (-1.0, -1.0),
        (-1.0, 1.0),
        (1.0, -1.0),
        (1.0, 1.0),
    ]


def test_l1_ball_becomes_cross_polytope():
    spec = NormSpec(p=1, dim=2)
    from proxpair.bodies import as_vertex_body

    cross = as_vertex_body(Ball([0.0, 0.0], 2.0), spec)
    assert sorted(map(tuple, cross.vertices)) == [
        (-2.0, 0.0),
        (0.0, -2.0),
        (0.0, 2.0),
        (2.0, 0.0),
    ]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_sampled_points_always_contained(seed):
    pts = sample(UNIT_SQUARE, 32, seed, L2)
    for p in pts:
        assert contains(UNIT_SQUARE, p, L2, tol=1e-9)
