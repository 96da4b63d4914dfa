import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolab.errors import LoopTooLong, PreconditionError
from horolab.experiments import (
    auto_loops,
    axis_crossing,
    density_probe,
    horocyclic_zero_probe,
    lemma41_scan,
    lemma42_construct,
    offset_floor_b,
    return_candidate_check,
)
from horolab.flows import AnnulusPoint, asymptotic_offset, frame_distance, frame_endpoint, geodesic_flow, project_base
from horolab.groups import Word, enumerate_ball
from horolab.moebius import INF, MoebiusTransform, apply_boundary, apply_uhp

M = MoebiusTransform


def hyperbolic(att, rep, ell):
    # h sends infinity to att and 0 to rep
    h = M(att, rep, 1.0, 1.0) if att > rep else M(att, -rep, 1.0, -1.0)
    e = math.exp(ell / 2)
    return h @ M(e, 0, 0, 1 / e) @ h.inverse()


class TestOffsetFloor:
    @given(st.floats(0.01, 20.0))
    def test_closed_form(self, c):
        assert offset_floor_b(c) == pytest.approx(math.log(math.cosh(c / 2)), abs=1e-12, rel=1e-12)

    def test_value_at_three(self):
        assert offset_floor_b(3.0) == pytest.approx(0.8554402, abs=1e-7)

    def test_rejects_nonpositive(self):
        with pytest.raises(PreconditionError):
            offset_floor_b(0.0)


class TestAxisCrossing:
    def test_along_axis(self):
        g = M(2, 0, 0, 0.5)
        up = axis_crossing(g, INF)
        assert up.point == pytest.approx(1j) and up.distance == 0.0 and up.forward and up.angle == 0.0
        down = axis_crossing(g, 0.0)
        assert not down.forward and down.angle == math.pi

    def test_oblique(self):
        # axis is the half circle over [-1, 3]; the vertical ray meets it at sqrt(3) i
        cross = axis_crossing(hyperbolic(3.0, -1.0, 2.0), INF)
        assert cross.point == pytest.approx(math.sqrt(3) * 1j, abs=1e-12)
        assert cross.distance == pytest.approx(math.log(math.sqrt(3)), abs=1e-12)
        assert cross.angle == pytest.approx(math.pi / 3, abs=1e-12)
        assert cross.forward
        back = axis_crossing(hyperbolic(-1.0, 3.0, 2.0), INF)
        assert back.angle == pytest.approx(2 * math.pi / 3, abs=1e-12) and not back.forward

    def test_miss(self):
        # half circle over [1, 3] never meets the imaginary axis
        assert axis_crossing(hyperbolic(3.0, 1.0, 2.0), INF).point is None
        # over [-3, 3] it meets the axis at 3i, but over [-0.5, 0.5] only below i
        assert axis_crossing(hyperbolic(3.0, -3.0, 2.0), INF).point is not None
        assert axis_crossing(hyperbolic(0.5, -0.5, 2.0), INF).point is None


class TestReturnScan:
    def test_candidates_valid(self, tight_ball5):
        cands = lemma41_scan(tight_ball5, 0.37, 0.2)
        assert cands
        errs = [c.angular_error for c in cands]
        assert errs == sorted(errs)
        for c in cands[:20]:
            assert c.r > 0 and c.angular_error < 0.2
            assert c.word.weight(tight_ball5.spec.weights) == 0
            r, e = return_candidate_check(tight_ball5, c, 0.37)
            assert r == pytest.approx(c.r, abs=1e-9) and e == pytest.approx(c.angular_error, abs=1e-9)

    def test_nesting(self, tight, tight_ball5):
        small = enumerate_ball(tight, 4)
        best4 = lemma41_scan(small, -1.3, 0.5)[0].angular_error
        best5 = lemma41_scan(tight_ball5, -1.3, 0.5)[0].angular_error
        assert best5 <= best4

    def test_r_matches_norm(self, schottky_ball6):
        # along infinity, g0^k scales (1, 0) by 2^k with no angular error
        cands = lemma41_scan(schottky_ball6, INF, 1e-12)
        rs = sorted(round(c.r, 9) for c in cands)
        assert rs[:6] == pytest.approx([2 * k * math.log(2) for k in range(1, 7)], abs=1e-9)

    def test_rejects_bad_tol(self, tight_ball5):
        with pytest.raises(PreconditionError):
            lemma41_scan(tight_ball5, 0.0, 0.0)


class TestLoopConcatenation:
    XI = 0.37

    def test_auto_loops(self, tight_ball5):
        loops = auto_loops(tight_ball5, self.XI, 4)
        assert 1 <= len(loops) <= 4
        for w in loops:
            assert w.inverse() not in loops
            assert w.weight(tight_ball5.spec.weights) == 0

    def test_construction(self, tight_ball5):
        for w in auto_loops(tight_ball5, self.XI, 3):
            res = lemma42_construct(tight_ball5, self.XI, w)
            g = tight_ball5.spec.evaluate(res.loop)
            assert 3.0 - 1e-9 <= res.loop_length <= 3.2 + 1e-9
            assert project_base(res.v_n) == pytest.approx(1j, abs=1e-12)
            assert frame_endpoint(res.v_n) == pytest.approx(apply_boundary(g, self.XI), rel=1e-9)
            # r_n is the shift that makes the ray from gamma^-1 i asymptotic to the ray from i
            assert res.r_n == pytest.approx(asymptotic_offset(apply_uhp(g.inverse(), 1j), 1j, self.XI), abs=1e-9)
            if res.angle_ok:
                assert offset_floor_b(3.0) - 1e-6 < res.r_n <= 3.2 + 1e-6

    def test_decay_bounded_by_explicit_shadow(self, tight_ball5):
        w = auto_loops(tight_ball5, self.XI, 1)[0]
        res = lemma42_construct(tight_ball5, self.XI, w, t_grid=(0.0, 2.0, 4.0))
        g = tight_ball5.spec.evaluate(res.loop)
        assert tight_ball5.find(res.loop.inverse()) is not None
        for t, d in res.rows():
            shadow = g.inverse() @ geodesic_flow(res.v_n, t + res.r_n)
            assert d <= frame_distance(shadow, geodesic_flow(res.v, t)) + 1e-9
            assert d >= 0

    def test_identity_loop(self, tight_ball5):
        res = lemma42_construct(tight_ball5, self.XI, Word(), t_grid=(0.0, 1.0))
        assert res.r_n == 0.0 and np.all(res.decay <= 1e-12)

    def test_too_long(self, tight_ball5):
        long_word = Word.from_signed([2, 3, 4, 2, 3])
        with pytest.raises(LoopTooLong):
            lemma42_construct(tight_ball5, self.XI, long_word)

    def test_bad_arguments(self, tight_ball5):
        w = Word.from_signed([2])
        with pytest.raises(PreconditionError):
            lemma42_construct(tight_ball5, self.XI, w, c=3.3, C=3.2)
        with pytest.raises(PreconditionError):
            lemma42_construct(tight_ball5, self.XI, w, t_grid=(1.0, 0.0))


class TestDensity:
    def test_schottky_probe(self, schottky_ball6):
        assert horocyclic_zero_probe(schottky_ball6, AnnulusPoint(1, 0)) == 2.0 ** -6

    def test_probe_scales(self, schottky_ball6):
        assert horocyclic_zero_probe(schottky_ball6, AnnulusPoint(3, 0)) == 3 * 2.0 ** -6

    def test_covering_radius_monotone(self, octagon):
        radii = [density_probe(enumerate_ball(octagon, L), AnnulusPoint(1, 0), (-2, 2, 0, 2), 21).covering_radius
                 for L in (1, 2, 3)]
        assert radii[0] >= radii[1] >= radii[2]

    def test_distances_brute_force(self, octagon_ball4):
        rep = density_probe(octagon_ball4, AnnulusPoint(1, 0), (-1, 1, 0, 1), 5)
        m = octagon_ball4.matrices
        pts = np.stack([m[:, 0], m[:, 2]], axis=1)
        for (q1, q2, d) in rep.rows():
            ref = min(np.min(np.hypot(pts[:, 0] - q1, pts[:, 1] - q2)),
                      np.min(np.hypot(pts[:, 0] + q1, pts[:, 1] + q2)))
            assert d == pytest.approx(ref, abs=1e-12)

    def test_bad_arguments(self, octagon_ball4):
        with pytest.raises(PreconditionError):
            density_probe(octagon_ball4, AnnulusPoint(1, 0), (0, 1, 0, 1), 1)
        with pytest.raises(PreconditionError):
            density_probe(octagon_ball4, AnnulusPoint(1, 0), (1, 0, 0, 1), 3)
