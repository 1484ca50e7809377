import math

import numpy as np
import pytest

from proxpair import BodyPair, NormSpec, Polytope, contains, norm, proximal_core
from proxpair.solver import (
    AffineMap,
    CertificateFailure,
    CyclicityError,
    CyclicMapSpec,
    check_relatively_nonexpansive,
    midpoint_refine,
    shrink_step,
    solve_bpp,
)

from .conftest import L2, SEG_A, SEG_B
from .oracles import grid_best_proximity

REFLECT = CyclicMapSpec(
    AffineMap([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0]),
    AffineMap([[1.0, 0.0], [0.0, -1.0]], [-1.0, 1.0]),
    "isometry",
)
TRANSLATE = CyclicMapSpec(
    AffineMap(np.eye(2), [1.0, 0.0]), AffineMap(np.eye(2), [-1.0, 0.0]), "isometry"
)
SQUARE = Polytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
ROT90 = CyclicMapSpec(
    AffineMap([[0.0, -1.0], [1.0, 0.0]], [1.0, 0.0]),
    AffineMap([[0.0, -1.0], [1.0, 0.0]], [1.0, 0.0]),
    "isometry",
)


@pytest.fixture
def segments_pair(parallel_segments_l2):
    return parallel_segments_l2


class TestNonexpansiveness:
    def test_translate_isometry_certificate(self, segments_pair):
        cert = check_relatively_nonexpansive(TRANSLATE, segments_pair)
        assert cert.ok and cert.mode_used == "isometry"

    def test_reflection_isometry_certificate(self, segments_pair):
        cert = check_relatively_nonexpansive(REFLECT, segments_pair)
        assert cert.ok
        # Audit agrees within float noise.
        audited = CyclicMapSpec(REFLECT.t_ab, REFLECT.t_ba, "audit")
        cert2 = check_relatively_nonexpansive(audited, segments_pair, budget=256)
        assert cert2.worst_ratio <= 1.0 + 1e-12

    def test_expanding_map_violation(self):
        # Cyclic but doubles the second coordinate from A to B.
        A = Polytope([[0.0, -1.0], [0.0, 1.0]])
        B = Polytope([[1.0, -2.0], [1.0, 2.0]])
        pair = BodyPair(A, B, L2)
        T = CyclicMapSpec(
            AffineMap([[1.0, 0.0], [0.0, 2.0]], [1.0, 0.0]),
            AffineMap([[1.0, 0.0], [0.0, 0.25]], [-1.0, 0.0]),
            "audit",
        )
        cert = check_relatively_nonexpansive(T, pair, budget=256, seed=1)
        assert not cert.ok
        x, y = cert.violation
        assert norm(T.apply(x, "A") - T.apply(y, "B"), L2) > norm(x - y, L2)

    def test_cyclicity_failure_is_distinct(self, segments_pair):
        T = CyclicMapSpec(AffineMap(2.0 * np.eye(2), [1.0, 0.0]),
                          AffineMap(np.eye(2), [-1.0, 0.0]), "audit")
        with pytest.raises(CyclicityError):
            check_relatively_nonexpansive(T, segments_pair)

    def test_isometry_mode_rejects_non_isometry(self, segments_pair):
        # Shrinking maps are nonexpansive but not isometric; the analytic
        # mode must refuse to certify them.
        T = CyclicMapSpec(
            AffineMap([[0.0, 0.0], [0.0, 0.0]], [1.0, 0.5]),
            AffineMap([[0.0, 0.0], [0.0, 0.0]], [0.0, 0.5]),
            "isometry",
        )
        with pytest.raises(CertificateFailure):
            check_relatively_nonexpansive(T, segments_pair)
        audited = CyclicMapSpec(T.t_ab, T.t_ba, "audit")
        assert check_relatively_nonexpansive(audited, segments_pair).ok


class TestMidpointRefine:
    def test_parallel_segments_midpoints(self, segments_pair):
        core = proximal_core(segments_pair)
        res = midpoint_refine(SEG_A, SEG_B, [0.0, 0.0], [1.0, 1.0], core)
        np.testing.assert_allclose(res.z1, [0.0, 0.5], atol=1e-12)
        np.testing.assert_allclose(res.z2, [1.0, 0.5], atol=1e-12)
        assert res.separation == pytest.approx(1.0, abs=1e-12)

    def test_proximal_pair_unchanged(self, segments_pair):
        core = proximal_core(segments_pair)
        res = midpoint_refine(SEG_A, SEG_B, [0.0, 0.0], [1.0, 0.0], core)
        np.testing.assert_allclose(res.z1, [0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(res.z2, [1.0, 0.0], atol=1e-12)

    def test_radius_chain_on_squares(self):
        # Diameter witness averaged toward the pair distance cannot beat the
        # averaged-radius chain bound.  Squares in parallel planes so every
        # point has a resolvable mate.
        from proxpair import pair_diameter, point_radius

        spec3 = NormSpec(p=2, dim=3)
        base = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
        A = Polytope(base)
        B = Polytope(base + np.array([0.0, 0.0, 2.0]))
        pair = BodyPair(A, B, spec3)
        core = proximal_core(pair)
        dia = pair_diameter(pair)
        res = midpoint_refine(A, B, dia.x, dia.y, core)
        du_K = point_radius(dia.x, B, spec3)
        delta = dia.delta
        assert res.radius_z1 <= 0.5 * du_K + 0.5 * delta + 1e-9
        assert res.separation == pytest.approx(2.0, abs=1e-12)


class TestShrinkStep:
    def test_translate_contracts_gap(self, segments_pair):
        core = proximal_core(segments_pair)
        step = shrink_step(SEG_A, SEG_B, TRANSLATE, 0.95, core, seed=2)
        cert = step.certificate
        assert cert.gap_ok and cert.invariance_ok and cert.proximal_ok
        assert cert.gap_out <= 0.95 * cert.gap_in + 1e-9
        assert abs(cert.d_level - core.d) <= 1e-7

    def test_singletons_unchanged(self):
        A = Polytope([[0.0, 0.5]])
        B = Polytope([[1.0, 0.5]])
        pair = BodyPair(A, B, L2)
        core = proximal_core(pair)
        step = shrink_step(A, B, REFLECT, 0.95, core, seed=0)
        assert step.certificate.gap_out <= 1e-12
        np.testing.assert_allclose(step.H1.vertices, [[0.0, 0.5]], atol=1e-9)

    def test_reflection_localizes_midpoint(self, segments_pair):
        core = proximal_core(segments_pair)
        H, K = SEG_A, SEG_B
        for n in range(12):
            step = shrink_step(H, K, REFLECT, 0.95, core, seed=n)
            H, K = step.H1, step.K1
        mid = H.vertices.mean(axis=0)
        assert abs(mid[1] - 0.5) <= 1e-3 and abs(mid[0]) <= 1e-9


class TestSolveBpp:
    def test_rotation_fixed_point(self):
        pair = BodyPair(SQUARE, SQUARE, L2)
        res = solve_bpp(pair, ROT90, tol=1e-6, seed=5)
        assert res.trace.outcome == "converged"
        np.testing.assert_allclose(res.x, [0.5, 0.5], atol=1e-6)
        assert norm(res.x - ROT90.apply(res.x, "A"), L2) <= 1e-6

    def test_translate_any_output_is_best_proximity(self, segments_pair):
        res = solve_bpp(segments_pair, TRANSLATE, tol=1e-6, seed=1)
        assert res.trace.outcome == "converged"
        assert norm(res.x - TRANSLATE.apply(res.x, "A"), L2) == pytest.approx(1.0, abs=1e-9)
        assert norm(res.y - TRANSLATE.apply(res.y, "B"), L2) == pytest.approx(1.0, abs=1e-9)

    def test_reflection_unique_point_vs_grid_oracle(self, segments_pair):
        res = solve_bpp(segments_pair, REFLECT, tol=1e-6, seed=3)
        xg, vg = grid_best_proximity(SEG_A, lambda x: REFLECT.apply(x, "A"), L2, step=1e-4)
        assert np.max(np.abs(res.x - xg)) <= 1e-4
        assert res.trace.outcome == "converged"

    def test_trace_invariants(self, segments_pair):
        res = solve_bpp(segments_pair, REFLECT, tol=1e-6, seed=3)
        its = res.trace.iterations
        d = 1.0
        deltas = [r.delta_n for r in its]
        assert all(deltas[i + 1] <= deltas[i] + 1e-12 for i in range(len(deltas) - 1))
        for r in its:
            assert abs(r.d_n - d) <= 1e-7
            assert r.within_bound
        # Geometric decrease against the recorded c.
        c = res.trace.c_used
        gap0 = deltas[0] - d
        for r in its:
            assert r.delta_n - d <= (c ** r.n) * gap0 + 1e-9

    def test_invariance_audit(self, segments_pair):
        res = solve_bpp(segments_pair, REFLECT, tol=1e-6, seed=3)
        spec = segments_pair.norm
        for r in res.trace.iterations:
            H = Polytope(np.array(r.pair_snapshot[0]))
            K = Polytope(np.array(r.pair_snapshot[1]))
            for img in REFLECT.apply(H.vertices, "A"):
                assert contains(K, img, spec, tol=1e-6)

    def test_outputs_contained(self, segments_pair):
        res = solve_bpp(segments_pair, REFLECT, tol=1e-6, seed=3)
        assert contains(segments_pair.A, res.x, L2, tol=1e-6)
        assert contains(segments_pair.B, res.y, L2, tol=1e-6)

    def test_budget_exhaustion_returns_trace(self, segments_pair):
        res = solve_bpp(segments_pair, REFLECT, tol=1e-12, max_iter=2, seed=3)
        assert res.trace.outcome == "budget_exhausted"
        assert len(res.trace.iterations) >= 1

    def test_isometry_audit_window(self, segments_pair):
        cert = check_relatively_nonexpansive(
            CyclicMapSpec(REFLECT.t_ab, REFLECT.t_ba, "audit"), segments_pair, budget=512
        )
        assert 1.0 - 1e-12 <= cert.worst_ratio <= 1.0 + 1e-12
