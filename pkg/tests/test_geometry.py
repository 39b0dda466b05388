"""Eigenvalues, geometry bundles, metric operators, mean curvature, slope."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lmce.geometry import (
    SlopeConstants,
    bundle,
    bundle_from_hessian,
    eigen_sym2,
    grad_g_norm2,
    laplace_beltrami,
    laplace_beltrami_nondiv,
    mean_curvature,
    modified_slope,
    negate_bundle,
    slope,
)
from lmce.grid import ScalarField2, build_grid, sample
from lmce.solver import manufacture, perturbed_family


def paraboloid(a=1.0):
    return lambda x1, x2: 0.5 * a * (x1 * x1 + x2 * x2)


class TestEigen:
    def test_identity(self):
        lam1, lam2 = eigen_sym2(1.0, 0.0, 1.0)
        assert (lam1, lam2) == (1.0, 1.0)

    def test_saddle(self):
        lam1, lam2 = eigen_sym2(0.0, 1.0, 0.0)
        assert (lam1, lam2) == (1.0, -1.0)

    def test_analytic(self):
        lam1, lam2 = eigen_sym2(2.0, 1.0, 2.0)
        assert lam1 == pytest.approx(3.0, abs=1e-14)
        assert lam2 == pytest.approx(1.0, abs=1e-14)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            eigen_sym2(np.inf, 0.0, 1.0)

    @settings(deadline=None, max_examples=100)
    @given(
        m11=st.floats(-50, 50),
        m12=st.floats(-50, 50),
        m22=st.floats(-50, 50),
    )
    def test_trace_det_recovered(self, m11, m12, m22):
        lam1, lam2 = eigen_sym2(m11, m12, m22)
        assert lam1 >= lam2
        scale = 1.0 + abs(m11) + abs(m22) + abs(m12)
        assert lam1 + lam2 == pytest.approx(m11 + m22, abs=1e-11 * scale)
        assert lam1 * lam2 == pytest.approx(m11 * m22 - m12 * m12, abs=1e-10 * scale**2)


class TestBundle:
    def test_paraboloid(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        np.testing.assert_allclose(B.lam1, 1.0, atol=1e-12)
        np.testing.assert_allclose(B.lam2, 1.0, atol=1e-12)
        np.testing.assert_allclose(B.phase, math.pi / 2, atol=1e-12)
        np.testing.assert_allclose(B.sig1, 2.0, atol=1e-12)
        np.testing.assert_allclose(B.sig2, 1.0, atol=1e-12)
        np.testing.assert_allclose(B.vol, 2.0, atol=1e-12)
        np.testing.assert_allclose(B.slope, 0.5 * math.log(2.0), atol=1e-12)

    def test_saddle(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(lambda x1, x2: x1 * x2, g))
        np.testing.assert_allclose(B.phase, 0.0, atol=1e-12)
        np.testing.assert_allclose(B.sig1, 0.0, atol=1e-12)
        np.testing.assert_allclose(B.sig2, -1.0, atol=1e-12)
        np.testing.assert_allclose(B.vol, 2.0, atol=1e-12)

    def test_steep_paraboloid_scalar_oracle(self):
        # a = 2: phase 2*arctan(2), V = sqrt(5*5) = 5, sin(phase) = 4/5
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(2.0), g))
        np.testing.assert_allclose(B.phase, 2.0 * math.atan(2.0), atol=1e-12)
        np.testing.assert_allclose(B.vol, 5.0, atol=1e-12)
        np.testing.assert_allclose(np.sin(B.phase), 0.8, atol=1e-12)

    def test_vol_equals_sqrt_det_metric(self):
        g = build_grid(2.0, 33)
        u = sample(lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2) + 0.2 * np.sin(x1) * np.cos(x2), g)
        B = bundle(u)
        detg = B.g11 * B.g22 - B.g12 * B.g12
        np.testing.assert_allclose(B.vol, np.sqrt(detg), rtol=1e-12)
        np.testing.assert_allclose(B.sqrt_det_g, B.vol)

    def test_metric_inverse_consistent(self):
        g = build_grid(2.0, 17)
        u = sample(lambda x1, x2: 0.5 * x1 * x1 + 0.3 * x1 * x2, g)
        B = bundle(u)
        np.testing.assert_allclose(B.g11 * B.inv11 + B.g12 * B.inv12, 1.0, atol=1e-12)
        np.testing.assert_allclose(B.g11 * B.inv12 + B.g12 * B.inv22, 0.0, atol=1e-12)

    def test_negate_flips_phase(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(2.0), g))
        Bn = negate_bundle(B)
        np.testing.assert_allclose(Bn.phase, -B.phase, atol=1e-12)
        np.testing.assert_allclose(Bn.vol, B.vol, atol=1e-12)
        np.testing.assert_allclose(Bn.lam1, -B.lam2, atol=1e-12)


class TestMetricGradient:
    def test_constant_field(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        f = sample(lambda x1, x2: 3.0 + 0.0 * x1 + 0.0 * x2, g)
        np.testing.assert_allclose(grad_g_norm2(f, B).values, 0.0, atol=1e-14)

    def test_isotropic_metric(self):
        # g = 2I so the inverse is I/2 and |grad_g x1|^2 = 1/2
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        f = sample(lambda x1, x2: x1 + 0.0 * x2, g)
        np.testing.assert_allclose(grad_g_norm2(f, B).values, 0.5, atol=1e-12)

    def test_steep_metric_oracle(self):
        # a = 2: inverse metric is I/5, f = x1 + x2 gives 2/5
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(2.0), g))
        f = sample(lambda x1, x2: x1 + x2, g)
        np.testing.assert_allclose(grad_g_norm2(f, B).values, 0.4, atol=1e-12)


class TestLaplaceBeltrami:
    def test_constant_field(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        f = sample(lambda x1, x2: 7.0 + 0.0 * x1 + 0.0 * x2, g)
        np.testing.assert_allclose(laplace_beltrami(f, B).values, 0.0, atol=1e-12)

    @pytest.mark.parametrize("a", [1.0, 2.0])
    def test_constant_coefficients_exact(self, a):
        # constant metric: lap_g(|x|^2/2) = tr(g^{-1}) = 2/(1+a^2), exactly
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(a), g))
        f = sample(lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2), g)
        np.testing.assert_allclose(
            laplace_beltrami(f, B).values, 2.0 / (1.0 + a * a), atol=1e-11
        )

    def test_against_nondivergence_oracle_linear(self):
        g = build_grid(4.0, 65)
        u = sample(lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2) + 0.1 * np.sin(x1) * np.sin(x2), g)
        B = bundle(u)
        f = sample(lambda x1, x2: x1 + 0.0 * x2, g)
        dv = laplace_beltrami(f, B).values
        nd = laplace_beltrami_nondiv(f, B).values
        assert np.max(np.abs((dv - nd)[2:-2, 2:-2])) <= 10.0 * g.h**2

    def test_against_nondivergence_oracle_refinement(self):
        # the two discretizations differ by O(h^2) on smooth nonlinear data
        diffs = []
        for n in (65, 129):
            g = build_grid(4.0, n)
            u = sample(
                lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2) + 0.1 * np.sin(x1) * np.sin(x2), g
            )
            B = bundle(u)
            f = sample(lambda x1, x2: np.sin(x1) * np.cos(x2), g)
            dv = laplace_beltrami(f, B).values
            nd = laplace_beltrami_nondiv(f, B).values
            diffs.append(np.max(np.abs((dv - nd)[2:-2, 2:-2])))
        assert diffs[0] <= 10.0 * (4.0 / 64) ** 2
        assert 2.5 <= diffs[0] / diffs[1] <= 6.0


class TestFrameIndependence:
    def _perturbed(self):
        return lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2) + 0.1 * np.sin(x1) * np.sin(x2)

    def test_quarter_turn_nodal(self):
        # a quarter turn maps nodes to nodes: outputs must rotate with the
        # grid to round-off
        g = build_grid(2.0, 33)
        uf = self._perturbed()
        u = sample(uf, g)
        u_rot = sample(lambda x1, x2: uf(-x2, x1), g)
        f = sample(lambda x1, x2: x1 * x1 + 0.5 * x2, g)
        f_rot = sample(lambda x1, x2: (-x2) ** 2 + 0.5 * x1, g)

        def rot(values):
            # values'[i, j] = values at the pre-image node of (x1_i, x2_j)
            return values[::-1, :].T

        out = grad_g_norm2(f, bundle(u)).values
        out_rot = grad_g_norm2(f_rot, bundle(u_rot)).values
        np.testing.assert_allclose(out_rot, rot(out), atol=1e-10)
        lap = laplace_beltrami(f, bundle(u)).values
        lap_rot = laplace_beltrami(f_rot, bundle(u_rot)).values
        np.testing.assert_allclose(lap_rot, rot(lap), atol=1e-10)

    def test_general_rotation_integral(self):
        # 30-degree rotation: compare rotation-invariant disk integrals
        from lmce.grid import integrate_disk

        th = math.pi / 6
        c, s = math.cos(th), math.sin(th)
        g = build_grid(4.0, 129)
        uf = self._perturbed()
        u = sample(uf, g)
        u_rot = sample(lambda x1, x2: uf(c * x1 - s * x2, s * x1 + c * x2), g)
        f = sample(lambda x1, x2: x1 * x1 + x2 * x2, g)
        q = integrate_disk(ScalarField2(g, grad_g_norm2(f, bundle(u)).values), 2.0)
        q_rot = integrate_disk(
            ScalarField2(g, grad_g_norm2(f, bundle(u_rot)).values), 2.0
        )
        assert abs(q - q_rot) <= 20.0 * g.h


class TestMeanCurvature:
    def test_constant_phase_vanishes(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        H, hnorm = mean_curvature(B, ScalarField2(g, B.phase))
        assert np.max(np.abs(H)) == 0.0
        assert np.max(hnorm.values) == 0.0

    def test_ambient_norm_matches_quadform(self):
        g = build_grid(4.0, 65)
        prob = manufacture(perturbed_family(0.1), g)
        B = bundle(prob.u_exact)
        H, hnorm = mean_curvature(B, prob.psi)
        ambient = np.sqrt(np.sum(H * H, axis=-1))
        np.testing.assert_allclose(ambient, hnorm.values, atol=1e-13)

    def test_norm_against_exact_metric_oracle(self):
        # oracle: quadform with the analytic metric, differenced exact phase
        g = build_grid(4.0, 65)
        prob = manufacture(perturbed_family(0.1), g)
        B_fd = bundle(prob.u_exact)
        _, hn_fd = mean_curvature(B_fd, prob.psi)
        B_exact = bundle_from_hessian(prob.hess_exact)
        _, hn_or = mean_curvature(B_exact, prob.psi)
        assert np.max(np.abs(hn_fd.values - hn_or.values)) <= 10.0 * g.h**2

    def test_sup_bounded_under_refinement(self):
        sups = []
        for n in (65, 129):
            g = build_grid(4.0, n)
            prob = manufacture(perturbed_family(0.1), g)
            _, hnorm = mean_curvature(bundle(prob.u_exact), prob.psi)
            sups.append(np.max(hnorm.values))
        assert all(np.isfinite(s) for s in sups)
        assert 0.8 <= sups[0] / sups[1] <= 1.2


class TestSlope:
    def test_paraboloid_slope(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        np.testing.assert_allclose(slope(B).values, 0.5 * math.log(2.0), atol=1e-12)

    def test_anisotropic_slope_uses_larger_eigenvalue(self):
        # eigenvalues sqrt(3) and 1/sqrt(3): slope is ln 2 everywhere
        g = build_grid(2.0, 17)
        r3 = math.sqrt(3.0)
        u = sample(lambda x1, x2: 0.5 * (r3 * x1 * x1 + x2 * x2 / r3), g)
        B = bundle(u)
        np.testing.assert_allclose(slope(B).values, math.log(2.0), atol=1e-12)

    def test_modified_slope_quadratic_shift(self):
        g = build_grid(4.0, 257)
        B = bundle(sample(paraboloid(), g))
        bm = modified_slope(B, SlopeConstants(A=1.0))
        i, j = g.origin_index()
        assert bm.values[i, j] == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
        # node at (2, 0): 2 h-steps of 1/32 each... locate exactly
        k = int(round((2.0 + 4.0) / g.h))
        assert g.axis()[k] == 2.0
        assert bm.values[k, j] == pytest.approx(0.5 * math.log(2.0) + 2.0, abs=1e-12)

    def test_modified_slope_zero_weight(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(paraboloid(), g))
        bm = modified_slope(B, SlopeConstants(A=0.0))
        np.testing.assert_allclose(bm.values, B.slope)

    def test_negated_anisotropic_slope(self):
        # slope of -u uses the negated smaller eigenvalue: ln(2/sqrt(3))
        g = build_grid(2.0, 17)
        r3 = math.sqrt(3.0)
        u = sample(lambda x1, x2: -0.5 * (r3 * x1 * x1 + x2 * x2 / r3), g)
        B = bundle(u)
        np.testing.assert_allclose(
            slope(B).values, 0.5 * math.log(1.0 + 1.0 / 3.0), atol=1e-12
        )


class TestPhaseSignFacts:
    def test_phase_bounded_by_pi(self):
        g = build_grid(2.0, 17)
        B = bundle(sample(lambda x1, x2: 50.0 * (x1 * x1 + x2 * x2), g))
        assert np.max(np.abs(B.phase)) < math.pi

    def test_positive_phase_forces_positive_trace(self):
        # perturbed bundle has phase on both sides of pi/2, all in (0, pi)
        g = build_grid(4.0, 65)
        prob = manufacture(perturbed_family(0.1), g)
        B = bundle(prob.u_exact)
        assert np.all((B.phase > 0.0) & (B.phase < math.pi))
        assert np.all(B.sig1 > 0.0)

    def test_large_phase_forces_det_above_one(self):
        g = build_grid(4.0, 65)
        for a in (1.5, 5.0):
            B = bundle(sample(lambda x1, x2: 0.5 * a * (x1 * x1 + x2 * x2), g))
            mask = (B.phase > math.pi / 2) & (B.phase < math.pi)
            assert mask.any()
            assert np.all(B.sig2[mask] > 1.0)

    @settings(deadline=None, max_examples=40)
    @given(lam1=st.floats(-20.0, 20.0), gap=st.floats(0.0, 20.0))
    def test_sign_facts_pointwise(self, lam1, gap):
        lam2 = lam1 - gap
        phase = math.atan(lam1) + math.atan(lam2)
        if 0.0 < phase < math.pi:
            assert lam1 + lam2 > 0.0
        if math.pi / 2 < phase < math.pi:
            assert lam1 * lam2 > 1.0


class TestSlopeConstants:
    def test_validation(self):
        with pytest.raises(ValueError):
            SlopeConstants(delta=0.0)
        with pytest.raises(ValueError):
            SlopeConstants(c=0.0)
        with pytest.raises(ValueError):
            SlopeConstants(c=1.5)
        with pytest.raises(ValueError):
            SlopeConstants(A=-1.0)
        with pytest.raises(ValueError):
            SlopeConstants(eps_gap=0.0)
