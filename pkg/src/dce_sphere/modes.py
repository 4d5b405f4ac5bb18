"""Normalized radial eigenfunctions and their radial-measure integrals.

A mode is F_ls(r) = norm * [coeff_j * j_l(w r) + coeff_n * n_l(w r)] with the
coefficients fixed by the boundary condition on the static shell,

    DD:     coeff_j = n_l(w r_i),        coeff_n = -j_l(w r_i)
    mixed:  coeff_j = w n_l'(w r_a),     coeff_n = -w j_l'(w r_a)

and the norm fixed (positive) by unit L2 norm under the r^2 dr measure on
[r_i, r_o].  With this convention the l = 0 DD mode works out to
-sqrt(2/gap) sin(s pi (r - r_i)/gap)/r; the overall sign never enters any
particle number, but it is pinned down here for reproducibility.

All integrals use Gauss-Legendre rules whose order is doubled until the
result is stable; non-convergence raises rather than returning a guess.

``dmode_dr_beta`` is the total derivative of the normalized mode with
respect to the moving radius at fixed r.  It chain-rules the frequency
dependence through d omega/d r_beta, differentiates the coefficients, and
accounts for the norm's dependence on the moving endpoint.  Because the
moving shell is Dirichlet, the endpoint term of the normalization integral
vanishes and the norm contribution reduces to projecting out the component
along the mode itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bessel import (
    spherical_j,
    spherical_j_prime,
    spherical_j_prime2,
    spherical_n,
    spherical_n_prime,
    spherical_n_prime2,
)
from .spectrum import (
    DEFAULT_TOL,
    BoundaryConfig,
    CavityGeometry,
    MovingShell,
    solve_frequencies,
)

__all__ = [
    "QuadratureRule",
    "QuadratureConvergenceError",
    "RadialMode",
    "radial_mode",
    "radial_modes",
    "mode_inner_product",
    "dmode_dr_beta",
    "overlap_dr_beta",
]

DEFAULT_QUAD_ORDER = 64
_MAX_QUAD_ORDER = 2048
_QUAD_RTOL = 1e-11
_QUAD_ATOL = 1e-12


class QuadratureConvergenceError(RuntimeError):
    """Doubling the quadrature order kept changing the result."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights mapped onto [a, b]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    a: float
    b: float

    @classmethod
    def gauss_legendre(cls, order: int, a: float, b: float) -> "QuadratureRule":
        if order < 2:
            raise ValueError("order must be >= 2")
        if not b > a:
            raise ValueError("require b > a")
        x, w = np.polynomial.legendre.leggauss(order)
        # Exactness check on the reference interval: the rule must integrate
        # x^(2 order - 2) exactly (degree 2 order - 1 is odd, trivially zero).
        ref = np.sum(w * x ** (2 * order - 2))
        exact = 2.0 / (2 * order - 1)
        if abs(ref - exact) > 1e-12 * exact * order:
            raise AssertionError(f"Gauss-Legendre rule of order {order} failed exactness check")
        half = 0.5 * (b - a)
        return cls(nodes=half * x + 0.5 * (b + a), weights=half * w, order=order, a=a, b=b)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def _converged_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    start_order: int = DEFAULT_QUAD_ORDER,
    rtol: float = _QUAD_RTOL,
    atol: float = _QUAD_ATOL,
) -> float:
    """Integrate with order doubling until stable; raise if never stable."""
    order = start_order
    rule = QuadratureRule.gauss_legendre(order, a, b)
    prev = rule.integrate(integrand(rule.nodes))
    while order <= _MAX_QUAD_ORDER:
        order *= 2
        rule = QuadratureRule.gauss_legendre(order, a, b)
        cur = rule.integrate(integrand(rule.nodes))
        if abs(cur - prev) <= max(atol, rtol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureConvergenceError(
        f"integral on [{a}, {b}] not stable up to order {_MAX_QUAD_ORDER}"
    )


@dataclass(frozen=True)
class RadialMode:
    """Normalized radial eigenfunction for one (config, geometry, l, s)."""

    config: BoundaryConfig
    geom: CavityGeometry
    l: int
    s: int
    omega: float
    coeff_j: float
    coeff_n: float
    norm: float

    def evaluate(self, r):
        """F_ls(r); accepts scalar or array r."""
        x = self.omega * np.asarray(r, dtype=float)
        out = self.norm * (
            self.coeff_j * spherical_j(self.l, x) + self.coeff_n * spherical_n(self.l, x)
        )
        return float(out) if np.ndim(r) == 0 else out

    def derivative(self, r):
        """dF_ls/dr; accepts scalar or array r."""
        x = self.omega * np.asarray(r, dtype=float)
        out = (
            self.norm
            * self.omega
            * (
                self.coeff_j * spherical_j_prime(self.l, x)
                + self.coeff_n * spherical_n_prime(self.l, x)
            )
        )
        return float(out) if np.ndim(r) == 0 else out


def _bare_coefficients(config: BoundaryConfig, l: int, omega: float, geom: CavityGeometry):
    if not config.is_mixed:
        x_i = omega * geom.r_i
        return spherical_n(l, x_i), -spherical_j(l, x_i)
    x_a = omega * geom.static_radius(config)
    return omega * spherical_n_prime(l, x_a), -omega * spherical_j_prime(l, x_a)


def _mode_from_omega(
    config: BoundaryConfig, l: int, s: int, omega: float, geom: CavityGeometry
) -> RadialMode:
    c_j, c_n = _bare_coefficients(config, l, omega, geom)
    # Pre-scale the combination before squaring so extreme n_l magnitudes at
    # small w r_i cannot overflow the normalization integral.
    h = np.hypot(c_j, c_n)

    def bare_sq(r):
        x = omega * r
        g = (c_j / h) * spherical_j(l, x) + (c_n / h) * spherical_n(l, x)
        return r * r * g * g

    norm_sq = _converged_integral(bare_sq, geom.r_i, geom.r_o)
    if not norm_sq > 0.0:
        raise QuadratureConvergenceError(
            f"non-positive normalization integral for l={l}, s={s}"
        )
    return RadialMode(
        config=config,
        geom=geom,
        l=l,
        s=s,
        omega=omega,
        coeff_j=c_j,
        coeff_n=c_n,
        norm=1.0 / (h * np.sqrt(norm_sq)),
    )


def radial_modes(
    config: BoundaryConfig,
    l: int,
    s_max: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> list[RadialMode]:
    """Modes s = 1..s_max built from a single spectral scan."""
    freqs = solve_frequencies(config, l, s_max, geom, tol=tol)
    return [_mode_from_omega(config, l, f.s, f.omega, geom) for f in freqs]


def radial_mode(
    config: BoundaryConfig,
    l: int,
    s: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> RadialMode:
    """The normalized radial eigenfunction F_ls."""
    return radial_modes(config, l, s, geom, tol=tol)[-1]


def mode_inner_product(mode_a: RadialMode, mode_b: RadialMode) -> float:
    """Integral of r^2 F_a F_b over the cavity; delta_ss' for exact modes."""
    if (mode_a.config, mode_a.geom, mode_a.l) != (mode_b.config, mode_b.geom, mode_b.l):
        raise ValueError("modes must share boundary config, geometry and l")

    def integrand(r):
        return r * r * mode_a.evaluate(r) * mode_b.evaluate(r)

    return _converged_integral(integrand, mode_a.geom.r_i, mode_a.geom.r_o)


def _derivative_coefficients(mode: RadialMode, omega_p: float):
    """d(coeff)/d r_beta for the bare (unnormalized) coefficients."""
    config, geom, l, w = mode.config, mode.geom, mode.l, mode.omega
    if not config.is_mixed:
        x_i = w * geom.r_i
        # Inner-referenced coefficients: the explicit r_i dependence only
        # participates when the inner shell is the one that moves.
        factor = w + geom.r_i * omega_p if config.moving_shell is MovingShell.INNER else geom.r_i * omega_p
        return spherical_n_prime(l, x_i) * factor, -spherical_j_prime(l, x_i) * factor
    r_a = geom.static_radius(config)
    x_a = w * r_a
    d_j = omega_p * (spherical_j_prime(l, x_a) + x_a * spherical_j_prime2(l, x_a))
    d_n = omega_p * (spherical_n_prime(l, x_a) + x_a * spherical_n_prime2(l, x_a))
    return d_n, -d_j


def _scaled_parameter_derivative(mode: RadialMode, omega_p: float):
    """norm * d(bare mode)/d r_beta as a function of r (before the norm term)."""
    d_cj, d_cn = _derivative_coefficients(mode, omega_p)
    l, w, N = mode.l, mode.omega, mode.norm
    c_j, c_n = mode.coeff_j, mode.coeff_n

    def H(r):
        r = np.asarray(r, dtype=float)
        x = w * r
        explicit = d_cj * spherical_j(l, x) + d_cn * spherical_n(l, x)
        argument = (c_j * spherical_j_prime(l, x) + c_n * spherical_n_prime(l, x)) * r * omega_p
        return N * (explicit + argument)

    return H


def dmode_dr_beta(
    config: BoundaryConfig,
    l: int,
    s: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> Callable[[np.ndarray], np.ndarray]:
    """Total derivative r -> dF_ls(r)/d r_beta of the normalized mode.

    Includes the coefficient and frequency chain rules and the derivative of
    the normalization constant.  The moving (Dirichlet) endpoint contributes
    no boundary term because the mode vanishes there, so the norm term is
    exactly the projection of the bare derivative onto the mode:

        dF/dp = H - F <F, H>,   H = norm * d(bare)/dp.
    """
    freqs = solve_frequencies(config, l, s, geom, tol=tol)
    mode = _mode_from_omega(config, l, s, freqs[s - 1].omega, geom)
    return _dmode_from_mode(mode, freqs[s - 1].domega_dr_beta)


def _dmode_from_mode(mode: RadialMode, omega_p: float) -> Callable[[np.ndarray], np.ndarray]:
    H = _scaled_parameter_derivative(mode, omega_p)
    geom = mode.geom

    def proj_integrand(r):
        return r * r * mode.evaluate(r) * H(r)

    proj = _converged_integral(proj_integrand, geom.r_i, geom.r_o)

    def dF(r):
        return H(r) - mode.evaluate(r) * proj

    return dF


def overlap_dr_beta(
    config: BoundaryConfig,
    l: int,
    s: int,
    s_prime: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> float:
    """Radial overlap integral of r^2 F_ls (dF_ls'/d r_beta) over the cavity.

    Antisymmetric under s <-> s'; the diagonal vanishes identically because
    differentiating the unit-norm condition leaves only a boundary term that
    the Dirichlet moving shell kills.
    """
    if s == s_prime:
        return 0.0
    smax = max(s, s_prime)
    freqs = solve_frequencies(config, l, smax, geom, tol=tol)
    mode_s = _mode_from_omega(config, l, s, freqs[s - 1].omega, geom)
    dmode_sp = _dmode_from_mode(
        _mode_from_omega(config, l, s_prime, freqs[s_prime - 1].omega, geom),
        freqs[s_prime - 1].domega_dr_beta,
    )

    def integrand(r):
        return r * r * mode_s.evaluate(r) * dmode_sp(r)

    return _converged_integral(integrand, geom.r_i, geom.r_o)
