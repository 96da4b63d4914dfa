import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolab.errors import FlowOverflow, PreconditionError
from horolab.flows import (
    AnnulusPoint,
    annulus_to_boundary,
    asymptotic_offset,
    busemann,
    busemann_arrays,
    busemann_limit_estimate,
    frame_angle,
    frame_distance,
    frame_endpoint,
    frame_toward,
    geodesic_flow,
    horocycle_flow,
    horodisk_contains,
    project_annulus,
    project_base,
    ray_point,
    signed_horocycle_distance,
)
from horolab.moebius import IDENTITY, INF, MoebiusTransform, apply_uhp, uhp_distance

from conftest import boundary_points, sl2, uhp_points

M = MoebiusTransform
times = st.floats(-10.0, 10.0)


def entry_close(f1, f2, tol):
    return np.max(np.abs(f1.as_array() - f2.as_array())) <= tol


class TestGeodesicFlow:
    def test_identity_frame(self):
        f = geodesic_flow(IDENTITY, 2 * math.log(2))
        assert entry_close(f, M(2, 0, 0, 0.5), 1e-15)
        assert project_base(f) == pytest.approx(4j, abs=1e-14)

    def test_zero_time(self):
        f = M(2, 1, 1, 1)
        assert geodesic_flow(f, 0.0) == f

    def test_overflow_guard(self):
        with pytest.raises(FlowOverflow):
            geodesic_flow(IDENTITY, 1400.5)
        geodesic_flow(IDENTITY, 1400.0)

    @given(sl2(bound=2.0), times, times)
    def test_additive(self, f, t1, t2):
        lhs = geodesic_flow(geodesic_flow(f, t2), t1)
        rhs = geodesic_flow(f, t1 + t2)
        scale = max(1.0, np.abs(rhs.as_array()).max())
        assert entry_close(lhs, rhs, 1e-12 * scale)

    @given(sl2(bound=2.0), times)
    def test_endpoint_invariant(self, f, t):
        e1, e2 = frame_endpoint(f), frame_endpoint(geodesic_flow(f, t))
        assert e1 == e2 or abs(e1 - e2) <= 1e-9 * max(1.0, abs(e1))

    @given(sl2(bound=2.0), st.floats(0.0, 8.0))
    def test_unit_speed(self, f, t):
        d = uhp_distance(project_base(f), project_base(geodesic_flow(f, t)))
        assert d == pytest.approx(t, abs=1e-8)


class TestHorocycleFlow:
    def test_identity_frame(self):
        f = horocycle_flow(IDENTITY, 1.0)
        assert f.as_tuple() == (1, 1, 0, 1)
        assert project_base(f) == 1 + 1j

    @given(sl2(bound=2.0), st.floats(-10, 10), st.floats(-10, 10))
    def test_additive(self, f, s1, s2):
        lhs = horocycle_flow(horocycle_flow(f, s2), s1)
        rhs = horocycle_flow(f, s1 + s2)
        scale = max(1.0, np.abs(rhs.as_array()).max()) * 20
        assert entry_close(lhs, rhs, 1e-12 * scale)

    @given(sl2(bound=2.0), st.floats(-10, 10), times)
    def test_commutation(self, f, s, t):
        # as matrices D_{-t} U_s D_t = U_{s e^{-t}}; right multiplication applies D_{-t} first
        lhs = geodesic_flow(horocycle_flow(geodesic_flow(f, -t), s), t)
        rhs = horocycle_flow(f, s * math.exp(-t))
        scale = max(1.0, np.abs(rhs.as_array()).max(), np.abs(f.as_array()).max() ** 2 * math.exp(abs(t)))
        assert entry_close(lhs, rhs, 1e-12 * scale * 4)

    def test_commutation_matrix_identity(self):
        f = geodesic_flow(horocycle_flow(geodesic_flow(IDENTITY, -2.0), 3.0), 2.0)
        assert entry_close(f, M(1, 3 * math.exp(-2.0), 0, 1), 1e-15)

    @given(sl2(bound=2.0), st.floats(-10, 10))
    def test_annulus_invariant(self, f, s):
        assert project_annulus(horocycle_flow(f, s)) == project_annulus(f)


class TestProjections:
    def test_base_points(self):
        assert project_base(IDENTITY) == 1j
        assert project_base(M(2, 0, 0, 0.5)) == 4j
        z = project_base(M(2, 1, 1, 1))
        assert z == pytest.approx((3 + 1j) / 2, abs=1e-15)
        assert z.imag == pytest.approx(1 / abs(1j + 1) ** 2, abs=1e-15)

    def test_annulus(self):
        assert project_annulus(IDENTITY) == AnnulusPoint(1, 0)

    @given(sl2(bound=2.0), times)
    def test_scalar_law(self, f, t):
        p, q = project_annulus(f), project_annulus(geodesic_flow(f, t))
        s = math.exp(t / 2)
        assert abs(q.p1 - s * p.p1) <= 1e-12 * max(1.0, abs(q.p1))
        assert abs(q.p2 - s * p.p2) <= 1e-12 * max(1.0, abs(q.p2))

    def test_endpoint(self):
        assert frame_endpoint(IDENTITY) == INF
        assert frame_endpoint(M(2, 1, 1, 1)) == 2.0

    @given(sl2(bound=2.0))
    def test_annulus_boundary_matches_endpoint(self, f):
        e1, e2 = annulus_to_boundary(project_annulus(f)), frame_endpoint(f)
        assert e1 == e2 or abs(e1 - e2) <= 1e-12 * max(1.0, abs(e1))


class TestAnnulusPoint:
    def test_canonical_sign(self):
        assert AnnulusPoint(-1, -2) == AnnulusPoint(1, 2)
        assert AnnulusPoint(-3, 0) == AnnulusPoint(3, 0)

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            AnnulusPoint(0, 0)

    def test_boundary(self):
        assert annulus_to_boundary(AnnulusPoint(1, 0)) == INF
        assert annulus_to_boundary(AnnulusPoint(2, 1)) == 2.0

    @given(st.floats(0.1, 10), st.floats(-5, 5), st.floats(0.1, 5))
    def test_scalar_invariance(self, lam, p1, p2):
        p = AnnulusPoint(p1, p2)
        assert annulus_to_boundary(p.scaled(lam)) == pytest.approx(annulus_to_boundary(p), rel=1e-12)

    @given(boundary_points, st.floats(0.1, 10))
    def test_toward(self, xi, norm):
        p = AnnulusPoint.toward(xi, norm)
        assert p.norm == pytest.approx(norm, rel=1e-12)
        back = annulus_to_boundary(p)
        assert back == xi or abs(back - xi) <= 1e-12 * max(1.0, abs(xi))


class TestBusemann:
    @pytest.mark.parametrize("xi", [INF, 0.0, 1.0, -3.0])
    def test_vanishes_at_i(self, xi):
        assert busemann(xi, 1j) == 0.0

    @given(st.floats(-5, 5))
    def test_vertical(self, t):
        assert busemann(INF, math.exp(t) * 1j) == pytest.approx(-t, abs=1e-12)

    def test_half_i_toward_zero(self):
        assert busemann(0.0, 0.5j) == pytest.approx(-math.log(2), abs=1e-15)
        assert busemann_limit_estimate(0.0, 0.5j, 15.0) == pytest.approx(-math.log(2), abs=1e-5)

    def test_limit_estimate_examples(self):
        assert busemann_limit_estimate(INF, 1j, 7.0) == pytest.approx(0.0, abs=1e-12)
        assert busemann_limit_estimate(INF, 2j, 15.0) == pytest.approx(-math.log(2), abs=1e-5)

    def test_limit_estimate_rejects_nonpositive_t(self):
        with pytest.raises(PreconditionError):
            busemann_limit_estimate(INF, 1j, 0.0)

    @given(boundary_points, uhp_points())
    def test_limit_estimate_converges(self, xi, z):
        assert busemann_limit_estimate(xi, z, 15.0) == pytest.approx(busemann(xi, z), abs=1e-5)

    @given(boundary_points, uhp_points())
    def test_limit_estimate_non_increasing(self, xi, z):
        e5, e10, e15 = (busemann_limit_estimate(xi, z, t) for t in (5.0, 10.0, 15.0))
        exact = busemann(xi, z)
        assert e5 >= e10 - 1e-12 and e10 >= e15 - 1e-12 and e15 >= exact - 1e-12

    def test_arrays_match(self):
        x, y = np.array([0.0, 1.0, -2.0]), np.array([1.0, 0.5, 3.0])
        for xi in (INF, 0.7):
            out = busemann_arrays(xi, x, y)
            assert out.tolist() == pytest.approx([busemann(xi, complex(a, b)) for a, b in zip(x, y)], abs=1e-15)

    @given(sl2(bound=2.0))
    def test_horocycle_identity(self, f):
        p = project_annulus(f)
        xi = annulus_to_boundary(p)
        assert busemann(xi, project_base(f)) == pytest.approx(-2 * math.log(p.norm), abs=1e-9)

    @given(sl2(bound=2.0), boundary_points, st.floats(0.2, 5))
    def test_orbit_identity(self, m, xi, lam):
        p = AnnulusPoint.toward(xi, lam)
        mp = p.moved_by(m)
        rhs = p.norm ** 2 * math.exp(busemann(xi, apply_uhp(m.inverse(), 1j)))
        assert mp.norm ** 2 == pytest.approx(rhs, rel=1e-9)


class TestHorocycles:
    def test_signed_distance(self):
        assert signed_horocycle_distance(AnnulusPoint(1, 0)) == 0.0
        assert signed_horocycle_distance(AnnulusPoint(2, 0)) == pytest.approx(2 * math.log(2), abs=1e-15)
        assert uhp_distance(1j, 4j) == pytest.approx(2 * math.log(2), abs=1e-15)
        assert signed_horocycle_distance(AnnulusPoint(0.5, 0)) == pytest.approx(-2 * math.log(2), abs=1e-15)

    def test_horodisk(self):
        assert horodisk_contains(AnnulusPoint(0.5, 0), 1j)
        assert not horodisk_contains(AnnulusPoint(2, 0), 1j)
        assert horodisk_contains(AnnulusPoint(1, 0), 8j)

    def test_horodisk_is_open(self):
        # i lies on H(p) for |p| = 1
        assert not horodisk_contains(AnnulusPoint(1, 0), 1j)

    @given(st.floats(-3, 3), st.floats(0.2, 5), st.floats(-3, 3))
    def test_horocycle_is_base_of_horocycle_orbit(self, xi, lam, s):
        # pi_1 of any frame over p lies on H(p)
        p = AnnulusPoint.toward(xi, lam)
        n2 = p.norm ** 2
        f = M(p.p1, -p.p2 / n2, p.p2, p.p1 / n2)
        z = project_base(horocycle_flow(f, s))
        assert busemann(xi, z) == pytest.approx(-signed_horocycle_distance(p), abs=1e-8)


class TestOffsets:
    def test_zero(self):
        assert asymptotic_offset(1 + 2j, 1 + 2j, 0.3) == 0.0

    def test_vertical(self):
        assert asymptotic_offset(1j, math.exp(0.7) * 1j, INF) == pytest.approx(0.7, abs=1e-15)

    @given(uhp_points(), uhp_points(), boundary_points)
    def test_antisymmetric(self, z1, z2, xi):
        assert asymptotic_offset(z1, z2, xi) == -asymptotic_offset(z2, z1, xi)

    @given(uhp_points(), uhp_points(), boundary_points)
    def test_rays_become_asymptotic(self, z1, z2, xi):
        r = asymptotic_offset(z1, z2, xi)
        t = 20.0
        w1, w2 = ray_point(z1, xi, t + r), ray_point(z2, xi, t)
        # near the boundary one ulp of x is already a sizeable hyperbolic step, and the
        # circle parametrization of the ray carries a few ulps of x
        floor = 32 * np.finfo(float).eps * max(1.0, abs(w1.real)) / min(w1.imag, w2.imag)
        assert uhp_distance(w1, w2) < 1e-6 + floor


class TestFrames:
    @given(uhp_points(), boundary_points)
    def test_frame_toward_points_at_target(self, z, xi):
        f = frame_toward(z, xi)
        assert project_base(f) == pytest.approx(z, abs=1e-12)
        e = frame_endpoint(f)
        assert e == xi or abs(e - xi) <= 1e-9 * max(1.0, abs(xi))

    def test_frame_angle(self):
        assert frame_angle(IDENTITY) == pytest.approx(math.pi / 2)
        s = math.sqrt(0.5)
        assert frame_angle(M(s, -s, s, s)) == pytest.approx(0.0, abs=1e-15)

    def test_frame_distance(self):
        assert frame_distance(IDENTITY, IDENTITY) == 0.0
        s = math.sqrt(0.5)
        assert frame_distance(IDENTITY, M(s, -s, s, s)) == pytest.approx(math.pi / 2)
        assert frame_distance(IDENTITY, M(2, 0, 0, 0.5)) == pytest.approx(2 * math.log(2))
