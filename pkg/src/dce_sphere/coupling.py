"""Mode-coupling coefficients driven by the moving shell.

Two closely related objects live here.  The time-dependent coefficient

    mu_lss'(t) = wdot_ls/(2 w_ls) delta_ss'
               + (1 - delta_ss') sqrt(w_ls/w_ls') Int r^2 F_ls' dF_ls/dt dr

couples radial modes while the shell moves; all time dependence enters
through the moving radius, wdot = (dw/dr_b) rdot_b and dF/dt = (dF/dr_b)
rdot_b.  Its static counterpart

    C_lss' = r_b delta_ss' (dw_ls/dr_b)/(2 w_ls)
           - r_b (1 - delta_ss') sqrt(w_ls/w_ls') Int r^2 F_ls dF_ls'/dr_b dr

is the dimensionless coupling constant that sets resonant particle
creation; the two are related by mu_lss'(t) = rdot_b(t)/r_b * C_lss' at the
instantaneous geometry.  Only the symmetrized combination (C_ss' + C_s's)/2
ever enters a particle number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

import numpy as np

from .modes import (
    QuadratureRule,
    QuadratureConvergenceError,
    _dmode_from_mode,
    _mode_from_omega,
)
from .spectrum import DEFAULT_TOL, BoundaryConfig, CavityGeometry, solve_frequencies

if TYPE_CHECKING:  # pragma: no cover - import cycle guard for type checkers
    from .dynamics import MotionProfile

__all__ = ["MuCoefficient", "CouplingMatrix", "mu", "coupling_C", "coupling_matrix"]


@dataclass(frozen=True)
class MuCoefficient:
    """mu_lss'(t) split into symmetric and antisymmetric parts."""

    l: int
    s: int
    s_prime: int
    t: float
    value: float
    symmetric: float
    antisymmetric: float


@dataclass(frozen=True)
class CouplingMatrix:
    """Static coupling constants C_lss' for s, s' = 1..s_max at fixed l."""

    config: BoundaryConfig
    geom: CavityGeometry
    l: int
    s_max: int
    entries: Mapping[tuple[int, int], float]

    def value(self, s: int, s_prime: int) -> float:
        return self.entries[(s, s_prime)]

    def symmetrized(self, s: int, s_prime: int) -> float:
        return 0.5 * (self.entries[(s, s_prime)] + self.entries[(s_prime, s)])


def _coupling_row(
    config: BoundaryConfig,
    l: int,
    s: int,
    s_max: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
):
    """Frequencies and symmetrized coupling kernel for one row of modes.

    Returns (omegas, kernel) where omegas[k] = w_{l,k+1} and kernel[k] is the
    symmetrized mu-kernel K such that mu_(s',s)(t) = rdot_b(t) * K[s'-1];
    equivalently C_(ss') = r_b * K[s'-1].  Assembled on one shared grid with
    a doubled-order stability check.
    """
    n = max(s, s_max)
    freqs = solve_frequencies(config, l, n, geom, tol=tol)
    omegas = np.array([f.omega for f in freqs])
    modes = [_mode_from_omega(config, l, f.s, f.omega, geom) for f in freqs]
    dmodes = [_dmode_from_mode(m, f.domega_dr_beta) for m, f in zip(modes, freqs)]

    def assemble(order: int) -> np.ndarray:
        rule = QuadratureRule.gauss_legendre(order, geom.r_i, geom.r_o)
        r = rule.nodes
        w_r2 = rule.weights * r * r
        F_s = modes[s - 1].evaluate(r)
        dF_s = dmodes[s - 1](r)
        out = np.empty(s_max)
        for k in range(1, s_max + 1):
            if k == s:
                out[k - 1] = freqs[s - 1].domega_dr_beta / (2.0 * omegas[s - 1])
                continue
            # A(u, v) = Int r^2 F_u dF_v dr; antisymmetric in (u, v).
            a_ks = float(np.dot(w_r2, modes[k - 1].evaluate(r) * dF_s))
            a_sk = float(np.dot(w_r2, F_s * dmodes[k - 1](r)))
            m_sk = math.sqrt(omegas[s - 1] / omegas[k - 1]) * a_ks
            m_ks = math.sqrt(omegas[k - 1] / omegas[s - 1]) * a_sk
            out[k - 1] = 0.5 * (m_sk + m_ks)
        return out

    kernel = assemble(256)
    check = assemble(512)
    if np.max(np.abs(kernel - check)) > 1e-10 * max(1.0, float(np.max(np.abs(check)))):
        raise QuadratureConvergenceError(
            f"coupling row (l={l}, s={s}) not stable under quadrature doubling"
        )
    return omegas, check


def coupling_C(
    config: BoundaryConfig,
    l: int,
    s: int,
    s_prime: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> float:
    """The dimensionless coupling constant C_lss' at the equilibrium geometry."""
    from .modes import overlap_dr_beta

    r_b = geom.moving_radius(config)
    n = max(s, s_prime)
    freqs = solve_frequencies(config, l, n, geom, tol=tol)
    if s == s_prime:
        return r_b * freqs[s - 1].domega_dr_beta / (2.0 * freqs[s - 1].omega)
    ratio = math.sqrt(freqs[s - 1].omega / freqs[s_prime - 1].omega)
    return -r_b * ratio * overlap_dr_beta(config, l, s, s_prime, geom, tol=tol)


def coupling_matrix(
    config: BoundaryConfig,
    l: int,
    s_max: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> CouplingMatrix:
    """All C_lss' for s, s' <= s_max, assembled on a shared quadrature grid."""
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    freqs = solve_frequencies(config, l, s_max, geom, tol=tol)
    omegas = np.array([f.omega for f in freqs])
    omega_p = np.array([f.domega_dr_beta for f in freqs])
    modes = [_mode_from_omega(config, l, f.s, f.omega, geom) for f in freqs]
    dmodes = [_dmode_from_mode(m, f.domega_dr_beta) for m, f in zip(modes, freqs)]
    r_b = geom.moving_radius(config)

    def assemble(order: int) -> np.ndarray:
        rule = QuadratureRule.gauss_legendre(order, geom.r_i, geom.r_o)
        r = rule.nodes
        w_r2 = rule.weights * r * r
        F = np.array([m.evaluate(r) for m in modes])
        dF = np.array([d(r) for d in dmodes])
        # A[u, v] = Int r^2 F_u dF_v dr
        A = (w_r2 * F) @ dF.T
        ratio = np.sqrt(omegas[:, None] / omegas[None, :])
        C = -r_b * ratio * A
        np.fill_diagonal(C, r_b * omega_p / (2.0 * omegas))
        return C

    C = assemble(256)
    check = assemble(512)
    if np.max(np.abs(C - check)) > 1e-10 * max(1.0, float(np.max(np.abs(check)))):
        raise QuadratureConvergenceError(
            f"coupling matrix (l={l}, s_max={s_max}) not stable under quadrature doubling"
        )
    entries = {
        (s, sp): float(check[s - 1, sp - 1])
        for s in range(1, s_max + 1)
        for sp in range(1, s_max + 1)
    }
    return CouplingMatrix(config=config, geom=geom, l=l, s_max=s_max, entries=entries)


def mu(
    l: int,
    s: int,
    s_prime: int,
    t: float,
    motion: "MotionProfile",
    config: BoundaryConfig,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> MuCoefficient:
    """The time-dependent coupling coefficient mu_lss' at time t.

    Evaluated quasi-statically: frequencies and modes are those of the
    instantaneous geometry, and all time derivatives are chain-ruled through
    the moving radius.
    """
    p = float(motion.r_beta(t))
    pdot = float(motion.r_beta_dot(t))
    geom_t = geom.with_moving_radius(config, p)
    if pdot == 0.0:
        return MuCoefficient(l=l, s=s, s_prime=s_prime, t=t, value=0.0, symmetric=0.0, antisymmetric=0.0)
    n = max(s, s_prime)
    freqs = solve_frequencies(config, l, n, geom_t, tol=tol)
    if s == s_prime:
        value = pdot * freqs[s - 1].domega_dr_beta / (2.0 * freqs[s - 1].omega)
        return MuCoefficient(l=l, s=s, s_prime=s_prime, t=t, value=value, symmetric=value, antisymmetric=0.0)
    from .modes import overlap_dr_beta

    w_s = freqs[s - 1].omega
    w_sp = freqs[s_prime - 1].omega
    # Int r^2 F_ls' (dF_ls/dr_b) dr, i.e. the derivative rides on the first index.
    a_sp_s = overlap_dr_beta(config, l, s_prime, s, geom_t, tol=tol)
    value = pdot * math.sqrt(w_s / w_sp) * a_sp_s
    value_swapped = pdot * math.sqrt(w_sp / w_s) * (-a_sp_s)
    return MuCoefficient(
        l=l,
        s=s,
        s_prime=s_prime,
        t=t,
        value=value,
        symmetric=0.5 * (value + value_swapped),
        antisymmetric=0.5 * (value - value_swapped),
    )
