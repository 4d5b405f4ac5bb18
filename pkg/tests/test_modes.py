import math

import numpy as np
import pytest

from dce_sphere import (
    BoundaryConfig,
    CavityGeometry,
    MovingShell,
    QuadratureRule,
    dmode_dr_beta,
    mode_inner_product,
    overlap_dr_beta,
    radial_mode,
    radial_modes,
    solve_frequencies,
)
from dce_sphere.modes import _converged_integral

DD_OUT = BoundaryConfig.dirichlet_dirichlet(MovingShell.OUTER)
DD_IN = BoundaryConfig.dirichlet_dirichlet(MovingShell.INNER)
ND = BoundaryConfig.neumann_inner()
DN = BoundaryConfig.neumann_outer()
G12 = CavityGeometry(1.0, 2.0)


class TestQuadratureRule:
    def test_polynomial_exactness(self):
        rule = QuadratureRule.gauss_legendre(16, 0.0, 2.0)
        vals = rule.nodes**3
        assert rule.integrate(vals) == pytest.approx(4.0, rel=1e-14)

    def test_high_degree(self):
        rule = QuadratureRule.gauss_legendre(8, -1.0, 1.0)
        # degree 2*8 - 2 = 14 must be exact
        assert rule.integrate(rule.nodes**14) == pytest.approx(2.0 / 15.0, rel=1e-13)

    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureRule.gauss_legendre(1, 0.0, 1.0)
        with pytest.raises(ValueError):
            QuadratureRule.gauss_legendre(8, 1.0, 1.0)

    def test_converged_integral_smooth(self):
        val = _converged_integral(lambda r: np.sin(3 * r), 0.0, 2.0)
        assert val == pytest.approx((1 - math.cos(6.0)) / 3.0, rel=1e-12)


class TestRadialModeConstruction:
    def test_dd_l0_closed_form(self):
        # 1-D reduction: |F| = sqrt(2) |sin(pi(r-1))| / r, unit norm
        mode = radial_mode(DD_OUT, 0, 1, G12)
        r = np.linspace(1.05, 1.95, 9)
        expected = np.sqrt(2.0) * np.sin(np.pi * (r - 1.0)) / r
        assert np.max(np.abs(np.abs(mode.evaluate(r)) - np.abs(expected))) < 1e-12

    def test_unit_norm(self):
        for config in (DD_OUT, ND, DN):
            mode = radial_mode(config, 2, 2, G12)
            assert mode_inner_product(mode, mode) == pytest.approx(1.0, abs=1e-10)

    def test_dirichlet_bc_at_moving_shell(self):
        for config, s in ((DD_OUT, 3), (ND, 1), (DN, 2)):
            mode = radial_mode(config, 1, s, G12)
            r_b = G12.moving_radius(config)
            amp = np.max(np.abs(mode.evaluate(np.linspace(1.01, 1.99, 50))))
            assert abs(mode.evaluate(r_b)) < 1e-10 * amp

    def test_dirichlet_bc_at_static_dd_shell(self):
        mode = radial_mode(DD_OUT, 2, 1, G12)
        amp = np.max(np.abs(mode.evaluate(np.linspace(1.01, 1.99, 50))))
        assert abs(mode.evaluate(G12.r_i)) < 1e-10 * amp

    def test_neumann_bc_derivative_vanishes(self):
        # dF/dr = 0 at the static Neumann shell, checked at l=2, s=2
        mode = radial_mode(ND, 2, 2, G12)
        slope_scale = np.max(np.abs(mode.derivative(np.linspace(1.01, 1.99, 50))))
        assert abs(mode.derivative(G12.r_i)) < 1e-10 * slope_scale
        mode = radial_mode(DN, 2, 2, G12)
        assert abs(mode.derivative(G12.r_o)) < 1e-10 * slope_scale

    def test_norm_positive_and_coefficients_as_documented(self):
        mode = radial_mode(DD_OUT, 0, 1, G12)
        assert mode.norm > 0
        from dce_sphere.bessel import spherical_j, spherical_n

        assert mode.coeff_j == pytest.approx(spherical_n(0, mode.omega * G12.r_i), rel=1e-14)
        assert mode.coeff_n == pytest.approx(-spherical_j(0, mode.omega * G12.r_i), rel=1e-14)


class TestOrthonormality:
    @pytest.mark.parametrize("config", [DD_OUT, ND, DN], ids=["dd", "nd", "dn"])
    def test_gram_matrix(self, config):
        for l in (0, 2):
            modes = radial_modes(config, l, 4, G12)
            for a in modes:
                for b in modes:
                    target = 1.0 if a.s == b.s else 0.0
                    assert abs(mode_inner_product(a, b) - target) < 1e-8

    def test_incompatible_modes_rejected(self):
        a = radial_mode(DD_OUT, 0, 1, G12)
        b = radial_mode(DD_OUT, 1, 1, G12)
        with pytest.raises(ValueError):
            mode_inner_product(a, b)


def test_ode_residual():
    """Substituting F into the radial equation leaves residual < 1e-8 of the
    largest term (second derivative by finite differences of dF/dr)."""
    for config, l, s in ((DD_OUT, 2, 2), (ND, 3, 1), (DN, 1, 3)):
        mode = radial_mode(config, l, s, G12)
        r = np.linspace(1.02, 1.98, 50)
        h = 2e-6
        d2 = (mode.derivative(r + h) - mode.derivative(r - h)) / (2 * h)
        f, d1 = mode.evaluate(r), mode.derivative(r)
        w2 = mode.omega**2
        terms = np.vstack([d2, 2 * d1 / r, (w2 - l * (l + 1) / r**2) * f])
        residual = terms.sum(axis=0)
        largest = np.max(np.abs(terms), axis=0)
        assert np.max(np.abs(residual) / largest) < 1e-8


def test_scaling_of_modes():
    # r -> lambda r with unit norm under r^2 dr implies F -> lambda^(-3/2) F
    lam = 3.7
    g2 = CavityGeometry(lam * G12.r_i, lam * G12.r_o)
    for config in (DD_OUT, DN):
        m1 = radial_mode(config, 2, 1, G12)
        m2 = radial_mode(config, 2, 1, g2)
        r = np.linspace(1.1, 1.9, 7)
        ratio = np.abs(m2.evaluate(lam * r)) / np.abs(m1.evaluate(r))
        assert np.max(np.abs(ratio - lam ** (-1.5))) < 1e-10


def test_quadrature_doubling_stability():
    # reported integrals move by less than 1e-10 when the rule is doubled
    mode_a, mode_b = radial_modes(ND, 2, 2, G12)
    for order in (128, 256):
        r1 = QuadratureRule.gauss_legendre(order, 1.0, 2.0)
        r2 = QuadratureRule.gauss_legendre(2 * order, 1.0, 2.0)
        vals = []
        for rule in (r1, r2):
            vals.append(rule.integrate(rule.nodes**2 * mode_a.evaluate(rule.nodes) * mode_b.evaluate(rule.nodes)))
        assert abs(vals[1] - vals[0]) < 1e-10


class TestModeDerivative:
    def test_dd_l0_closed_form_values(self):
        """Frozen symbolic oracle: F(r; r_o) = -sqrt(2/d) sin(pi(r-1)/d)/r with
        d = r_o - 1; d/dr_o at (1, 2) evaluated at three radii."""
        dmode = dmode_dr_beta(DD_OUT, 0, 1, G12)
        expected = {
            1.5: 0.4714045207910317,  # sqrt(2)/3
            1.1: 0.5827738992469252,
            1.7: -0.7388007913413256,
        }
        for r, val in expected.items():
            assert dmode(np.array([r]))[0] == pytest.approx(val, rel=1e-10)

    def test_projection_orthogonality(self):
        # differentiating the unit norm: <F, dF/dr_beta> = 0 (Dirichlet endpoint)
        for config, l, s in ((DD_IN, 1, 2), (DN, 0, 1)):
            mode = radial_mode(config, l, s, G12)
            dmode = dmode_dr_beta(config, l, s, G12)
            val = _converged_integral(
                lambda r: r * r * mode.evaluate(r) * dmode(r), G12.r_i, G12.r_o
            )
            assert abs(val) < 1e-10

    @pytest.mark.parametrize(
        "config,l,s",
        [(ND, 1, 2), (DD_OUT, 0, 1), (DD_IN, 2, 1), (DN, 3, 2)],
        ids=["nd-l1s2", "dd-out", "dd-in", "dn-l3s2"],
    )
    def test_matches_finite_difference(self, config, l, s):
        dmode = dmode_dr_beta(config, l, s, G12)
        r0 = G12.moving_radius(config)
        h = 1e-6 * r0
        r = np.array([1.21, 1.47, 1.83])
        mp_ = radial_mode(config, l, s, G12.with_moving_radius(config, r0 + h))
        mm = radial_mode(config, l, s, G12.with_moving_radius(config, r0 - h))
        # re-solved modes have an arbitrary overall sign; align to the base mode
        base = radial_mode(config, l, s, G12)
        probe = 1.0 + 0.5371 * (2.0 - 1.0)
        sign_p = math.copysign(1.0, mp_.evaluate(probe) * base.evaluate(probe))
        sign_m = math.copysign(1.0, mm.evaluate(probe) * base.evaluate(probe))
        fd = (sign_p * mp_.evaluate(r) - sign_m * mm.evaluate(r)) / (2 * h)
        ana = dmode(r)
        assert np.linalg.norm(ana - fd) < 1e-5 * np.linalg.norm(ana)


class TestOverlap:
    def test_diagonal_is_zero(self):
        assert overlap_dr_beta(ND, 2, 3, 3, G12) == 0.0

    def test_dd_l0_closed_form(self):
        # frozen symbolic oracle: Int r^2 F_1 dF_2/dr_o dr = 4/3 at (1, 2)
        assert overlap_dr_beta(DD_OUT, 0, 1, 2, G12) == pytest.approx(4.0 / 3.0, rel=1e-10)

    def test_antisymmetry(self):
        for config in (DD_OUT, ND, DN):
            a = overlap_dr_beta(config, 1, 1, 2, G12)
            b = overlap_dr_beta(config, 1, 2, 1, G12)
            assert a == pytest.approx(-b, rel=1e-9)

    def test_sturm_liouville_orthogonality_mixed(self):
        # high-order quadrature on an l=3 mixed pair stays orthogonal
        m1, m2 = radial_modes(ND, 3, 2, G12)
        assert abs(mode_inner_product(m1, m2)) < 1e-8
