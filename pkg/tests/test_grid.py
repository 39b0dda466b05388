"""Grid construction, finite differences, disk quadrature, cutoff profile."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lmce.grid import (
    ScalarField2,
    build_grid,
    gradient_fd,
    hessian_fd,
    integrate_disk,
    make_cutoff,
    sample,
    sup_norm_disk,
)


class TestBuildGrid:
    def test_small_grid(self):
        g = build_grid(2.0, 5)
        assert g.h == 1.0
        assert g.n * g.n == 25
        np.testing.assert_allclose(g.axis(), [-2, -1, 0, 1, 2])

    def test_default_grid_spacing(self):
        g = build_grid(4.0, 257)
        assert g.h == 1.0 / 32.0

    def test_rejects_too_few_nodes(self):
        with pytest.raises(ValueError):
            build_grid(2.0, 3)

    def test_rejects_bad_half_width(self):
        with pytest.raises(ValueError):
            build_grid(0.0, 9)
        with pytest.raises(ValueError):
            build_grid(-1.0, 9)

    def test_axis_symmetric(self):
        g = build_grid(3.0, 17)
        ax = g.axis()
        np.testing.assert_array_equal(ax, -ax[::-1])


class TestSample:
    def test_zero(self):
        g = build_grid(1.0, 5)
        f = sample(lambda x1, x2: 0.0 * x1 + 0.0 * x2, g)
        assert np.all(f.values == 0.0)

    def test_coordinate_columns(self):
        g = build_grid(1.0, 5)
        f = sample(lambda x1, x2: x1 + 0.0 * x2, g)
        np.testing.assert_allclose(f.values[:, 0], [-1, -0.5, 0, 0.5, 1])
        np.testing.assert_allclose(f.values[:, 0], f.values[:, -1])

    def test_paraboloid_vanishes_at_origin(self):
        g = build_grid(1.0, 5)
        f = sample(lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2), g)
        i, j = g.origin_index()
        assert f.values[i, j] == 0.0

    def test_rejects_non_finite(self):
        g = build_grid(1.0, 5)
        with pytest.raises(ValueError):
            sample(lambda x1, x2: np.full_like(x1 + x2, np.inf), g)

    def test_values_read_only(self):
        g = build_grid(1.0, 5)
        f = sample(lambda x1, x2: x1 + x2, g)
        with pytest.raises(ValueError):
            f.values[0, 0] = 1.0


QUAD_COEFFS = [
    (0.3, -1.2, 0.7, 0.5, -0.25, 1.5),
    (0.0, 0.0, 0.0, 0.5, 0.0, 0.5),
    (2.0, 1.0, -1.0, -0.4, 0.8, 0.1),
]


class TestDerivatives:
    @pytest.mark.parametrize("c0,c1,c2,c11,c12,c22", QUAD_COEFFS)
    def test_quadratic_exactness(self, c0, c1, c2, c11, c12, c22):
        # second-order stencils reproduce quadratics to round-off everywhere,
        # boundary bands included
        g = build_grid(2.0, 17)
        f = sample(
            lambda x1, x2: c0 + c1 * x1 + c2 * x2 + c11 * x1 * x1 + c12 * x1 * x2 + c22 * x2 * x2,
            g,
        )
        grad = gradient_fd(f)
        x1, x2 = g.coords()
        np.testing.assert_allclose(grad.c1.values, c1 + 2 * c11 * x1 + c12 * x2, atol=1e-11)
        np.testing.assert_allclose(grad.c2.values, c2 + c12 * x1 + 2 * c22 * x2, atol=1e-11)
        hess = hessian_fd(f)
        np.testing.assert_allclose(hess.m11.values, 2 * c11, atol=1e-11)
        np.testing.assert_allclose(hess.m12.values, c12, atol=1e-11)
        np.testing.assert_allclose(hess.m22.values, 2 * c22, atol=1e-11)

    def test_saddle_hessian(self):
        g = build_grid(2.0, 9)
        f = sample(lambda x1, x2: x1 * x2, g)
        hess = hessian_fd(f)
        np.testing.assert_allclose(hess.m11.values, 0.0, atol=1e-12)
        np.testing.assert_allclose(hess.m12.values, 1.0, atol=1e-12)
        np.testing.assert_allclose(hess.m22.values, 0.0, atol=1e-12)

    def _hess_error(self, n):
        g = build_grid(2.0, n)
        f = sample(lambda x1, x2: np.sin(x1) * np.sin(x2), g)
        hess = hessian_fd(f)
        x1, x2 = g.coords()
        e11 = np.max(np.abs(hess.m11.values + np.sin(x1) * np.sin(x2)))
        e12 = np.max(np.abs(hess.m12.values - np.cos(x1) * np.cos(x2)))
        e22 = np.max(np.abs(hess.m22.values + np.sin(x1) * np.sin(x2)))
        return max(e11, e12, e22)

    def test_refinement_ratio_near_four(self):
        # halving h divides the max Hessian error by 4 +- 10% for C^4 input
        e_h = self._hess_error(65)
        e_h2 = self._hess_error(129)
        ratio = e_h / e_h2
        assert 3.6 <= ratio <= 4.4

    def test_measured_order_in_band(self):
        e_h = self._hess_error(65)
        e_h2 = self._hess_error(129)
        order = math.log2(e_h / e_h2)
        assert 1.8 <= order <= 2.2


class TestDiskQuadrature:
    @pytest.mark.parametrize("r", [1.0, 2.0, 3.0])
    def test_area(self, r):
        g = build_grid(4.0, 257)
        one = sample(lambda x1, x2: 1.0 + 0.0 * x1 + 0.0 * x2, g)
        assert abs(integrate_disk(one, r) - math.pi * r * r) <= 10.0 * g.h

    def test_odd_integrand_cancels(self):
        g = build_grid(4.0, 129)
        f = sample(lambda x1, x2: x1 + 0.0 * x2, g)
        assert abs(integrate_disk(f, 2.0)) <= 1e-12

    def test_radial_quadratic(self):
        # closed-form polar integral: int_{B_2} |x|^2 dx = 2*pi*2^4/4 = 8*pi
        g = build_grid(4.0, 257)
        f = sample(lambda x1, x2: x1 * x1 + x2 * x2, g)
        assert abs(integrate_disk(f, 2.0) - 8.0 * math.pi) <= 60.0 * g.h

    def test_radius_exceeds_grid(self):
        g = build_grid(2.0, 9)
        f = sample(lambda x1, x2: 1.0 + 0.0 * x1 + 0.0 * x2, g)
        with pytest.raises(ValueError):
            integrate_disk(f, 3.0)


class TestSupNorm:
    def test_linear(self):
        g = build_grid(4.0, 257)
        f = sample(lambda x1, x2: x1 + 0.0 * x2, g)
        assert abs(sup_norm_disk(f, 1.0) - 1.0) <= g.h

    def test_constant(self):
        g = build_grid(2.0, 9)
        f = sample(lambda x1, x2: -3.0 + 0.0 * x1 + 0.0 * x2, g)
        assert sup_norm_disk(f, 1.5) == 3.0

    def test_radial(self):
        g = build_grid(4.0, 257)
        f = sample(lambda x1, x2: x1 * x1 + x2 * x2, g)
        assert abs(sup_norm_disk(f, 2.0) - 4.0) <= 10.0 * g.h

    def test_radius_exceeds_grid(self):
        g = build_grid(2.0, 9)
        f = sample(lambda x1, x2: 1.0 + 0.0 * x1 + 0.0 * x2, g)
        with pytest.raises(ValueError):
            sup_norm_disk(f, 2.5)


class TestCutoff:
    def test_standard_profile_invariants(self):
        g = build_grid(4.0, 257)
        cut = make_cutoff(2.0, 3.0, g)
        phi = cut.phi.values
        assert np.all(phi >= 0.0) and np.all(phi <= 1.0)
        inner = g.disk_mask(2.0)
        outer = ~g.disk_mask(3.0)
        assert np.all(phi[inner] == 1.0)
        assert np.all(phi[outer] == 0.0)
        gmag = np.hypot(cut.grad.c1.values, cut.grad.c2.values)
        assert np.max(gmag) <= cut.grad_bound + 1e-14
        assert cut.grad_bound < 2.0

    def test_value_at_origin(self):
        g = build_grid(4.0, 65)
        cut = make_cutoff(2.0, 3.0, g)
        i, j = g.origin_index()
        assert cut.phi.values[i, j] == 1.0

    def test_gradient_energy_against_radial_oracle(self):
        # 1D radial quadrature at 1e6 samples is the independent reference
        g = build_grid(4.0, 257)
        cut = make_cutoff(2.0, 3.0, g)
        gm2 = ScalarField2(g, cut.grad.c1.values ** 2 + cut.grad.c2.values ** 2)
        two_d = integrate_disk(gm2, 3.0)
        rr = np.linspace(2.0, 3.0, 10**6)
        one_d = np.trapezoid(cut.slope_radial(rr) ** 2 * 2.0 * math.pi * rr, rr)
        # integrand vanishes smoothly at both disk edges, so the node
        # quadrature converges much faster than its generic O(h) bound
        assert abs(two_d - one_d) <= g.h
        assert one_d == pytest.approx(50.0 * math.pi / 7.0, rel=1e-9)

    def test_bad_radii(self):
        g = build_grid(4.0, 65)
        with pytest.raises(ValueError):
            make_cutoff(3.0, 2.0, g)
        with pytest.raises(ValueError):
            make_cutoff(0.0, 2.0, g)
        with pytest.raises(ValueError):
            make_cutoff(2.0, 5.0, g)

    @settings(deadline=None, max_examples=25)
    @given(
        r1=st.floats(0.3, 2.0),
        width=st.floats(0.3, 1.8),
    )
    def test_profile_properties(self, r1, width):
        g = build_grid(4.0, 65)
        r2 = min(r1 + width, 4.0)
        cut = make_cutoff(r1, r2, g)
        phi = cut.phi.values
        assert np.all((phi >= 0.0) & (phi <= 1.0))
        assert np.all(phi[g.disk_mask(r1)] == 1.0)
        assert np.all(phi[~g.disk_mask(r2)] == 0.0)
        gmag = np.hypot(cut.grad.c1.values, cut.grad.c2.values)
        assert np.max(gmag) <= cut.grad_bound + 1e-12
        # certified bound stays below the generic spline bound 3/(r2-r1)
        assert cut.grad_bound <= 3.0 / (r2 - r1) + 1e-12
