import math

import mpmath as mp
import numpy as np
import pytest

from dce_sphere import bessel

mp.mp.dps = 40


def mp_spherical(kind, l, x):
    x = mp.mpf(x)
    factor = mp.sqrt(mp.pi / (2 * x))
    if kind == "j":
        return factor * mp.besselj(l + mp.mpf("0.5"), x)
    return factor * mp.bessely(l + mp.mpf("0.5"), x)


def series_j(l, x, terms=20):
    """Power series oracle: j_l = sum (-1)^k x^(l+2k) / (2^k k! (2l+2k+1)!!)."""
    total = mp.mpf(0)
    x = mp.mpf(x)
    for k in range(terms):
        dfact = mp.mpf(1)
        for m in range(2 * l + 2 * k + 1, 0, -2):
            dfact *= m
        total += (-1) ** k * x ** (l + 2 * k) / (mp.mpf(2) ** k * mp.factorial(k) * dfact)
    return float(total)


class TestClosedForms:
    def test_j0_at_pi_is_zero(self):
        assert abs(bessel.spherical_j(0, math.pi)) < 1e-14

    def test_j0_at_half_pi(self):
        assert bessel.spherical_j(0, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_j1_at_one_vs_power_series(self):
        # frozen from the 20-term series oracle: 0.3011686789397568
        assert bessel.spherical_j(1, 1.0) == pytest.approx(0.3011686789397568, rel=1e-13)
        assert bessel.spherical_j(1, 1.0) == pytest.approx(series_j(1, 1.0), rel=1e-13)

    def test_n0_at_half_pi_is_zero(self):
        assert abs(bessel.spherical_n(0, math.pi / 2)) < 1e-14

    def test_n0_at_pi(self):
        assert bessel.spherical_n(0, math.pi) == pytest.approx(1 / math.pi, rel=1e-14)

    def test_n1_at_one(self):
        # n_1(x) = -cos(x)/x^2 - sin(x)/x, high-precision value -1.3817732906760363
        assert bessel.spherical_n(1, 1.0) == pytest.approx(-1.3817732906760363, rel=1e-13)

    def test_jp0_at_pi(self):
        assert bessel.spherical_j_prime(0, math.pi) == pytest.approx(-1 / math.pi, rel=1e-13)

    def test_np0_at_half_pi(self):
        # d/dx(-cos x/x) = sin x/x + cos x/x^2 -> 2/pi at x = pi/2
        # (oracle-verified: 0.6366197723675814)
        assert bessel.spherical_n_prime(0, math.pi / 2) == pytest.approx(
            2 / math.pi, rel=1e-13
        )

    def test_wronskian_at_5_7p3(self):
        be = bessel.evaluate(5, 7.3)
        assert be.jp * be.n - be.j * be.np == pytest.approx(-1 / 7.3**2, rel=1e-12)


class TestDomainErrors:
    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_nonpositive_argument(self, x):
        with pytest.raises(ValueError):
            bessel.spherical_j(0, x)
        with pytest.raises(ValueError):
            bessel.spherical_n_prime(2, x)

    @pytest.mark.parametrize("l", [-1, bessel.L_MAX + 1])
    def test_order_out_of_range(self, l):
        with pytest.raises(ValueError):
            bessel.spherical_j(l, 1.0)

    def test_array_argument_with_bad_entry(self):
        with pytest.raises(ValueError):
            bessel.spherical_j(0, np.array([1.0, -2.0]))


def test_array_shape_roundtrip():
    x = np.linspace(0.5, 9.5, 7)
    out = bessel.spherical_j(3, x)
    assert out.shape == x.shape
    assert bessel.spherical_j(3, x[2]) == pytest.approx(out[2], rel=1e-15)


def test_wronskian_property_random():
    rng = np.random.default_rng(42)
    for _ in range(300):
        l = int(rng.integers(0, bessel.L_MAX + 1))
        x = float(10 ** rng.uniform(-3, 4))
        be = bessel.evaluate(l, x)
        assert be.j * be.np - be.jp * be.n == pytest.approx(1 / x**2, rel=1e-12)


def test_recurrence_consistency():
    rng = np.random.default_rng(3)
    for _ in range(200):
        l = int(rng.integers(1, bessel.L_MAX))
        x = float(10 ** rng.uniform(-2, 3))
        for fn in (bessel.spherical_j, bessel.spherical_n):
            fm, f0, fp = fn(l - 1, x), fn(l, x), fn(l + 1, x)
            if min(abs(fm), abs(f0), abs(fp)) < 1e-300:
                continue
            lhs = fp
            rhs = (2 * l + 1) / x * f0 - fm
            scale = max(abs(lhs), abs((2 * l + 1) / x * f0), abs(fm))
            assert abs(lhs - rhs) < 1e-10 * scale


def test_against_high_precision_oracle_grid():
    """1000-point grid: relative error <= 1e-12 away from zeros."""
    rng = np.random.default_rng(2024)
    checked = 0
    worst = 0.0
    while checked < 1000:
        l = int(rng.integers(0, bessel.L_MAX + 1))
        x = float(10 ** rng.uniform(-3, 4))
        j_ref = float(mp_spherical("j", l, x))
        n_ref = float(mp_spherical("n", l, x))
        envelope = math.hypot(j_ref, n_ref)
        for ref, got in ((j_ref, bessel.spherical_j(l, x)), (n_ref, bessel.spherical_n(l, x))):
            if abs(ref) < 1e-6 * envelope:  # too close to a zero for a relative check
                continue
            worst = max(worst, abs(got - ref) / abs(ref))
            checked += 1
    assert worst <= 1e-12, f"worst relative error {worst:.3e}"


def test_derivatives_against_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        l = int(rng.integers(0, 21))
        x = float(10 ** rng.uniform(-2, 3))
        jp_ref = float(mp.diff(lambda t: mp_spherical("j", l, t), mp.mpf(x)))
        np_ref = float(mp.diff(lambda t: mp_spherical("n", l, t), mp.mpf(x)))
        scale = math.hypot(jp_ref, np_ref)
        assert abs(bessel.spherical_j_prime(l, x) - jp_ref) < 1e-11 * scale
        assert abs(bessel.spherical_n_prime(l, x) - np_ref) < 1e-11 * scale


def test_second_derivative_is_derivative_of_first():
    for l in (0, 1, 4):
        x = 2.7
        h = 1e-6
        fd = (bessel.spherical_j_prime(l, x + h) - bessel.spherical_j_prime(l, x - h)) / (2 * h)
        assert bessel.spherical_j_prime2(l, x) == pytest.approx(fd, rel=1e-8)
        fd_n = (bessel.spherical_n_prime(l, x + h) - bessel.spherical_n_prime(l, x - h)) / (2 * h)
        assert bessel.spherical_n_prime2(l, x) == pytest.approx(fd_n, rel=1e-8)


def test_evaluate_bundles_consistent_values():
    be = bessel.evaluate(2, 3.3)
    assert be.j == bessel.spherical_j(2, 3.3)
    assert be.np == bessel.spherical_n_prime(2, 3.3)
    assert be.l == 2 and be.x == 3.3
