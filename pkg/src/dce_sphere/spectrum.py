"""Instantaneous mode spectrum of the two-shell cavity.

The massless scalar field between two concentric shells of radii
``r_i < r_o`` supports radial modes F_ls(r) built from spherical Bessel
functions.  Imposing the boundary conditions turns the frequency into the
root of a transcendental characteristic equation:

* Dirichlet-Dirichlet (DD):
      j_l(w r_o) n_l(w r_i) - j_l(w r_i) n_l(w r_o) = 0
* Mixed, Neumann on the static shell at r_a, Dirichlet on the moving shell
  at r_b (the moving shell is always the Dirichlet one):
      w j_l'(w r_a) n_l(w r_b) - j_l(w r_b) w n_l'(w r_a) = 0

This module brackets and refines those roots, orders them by the radial
index s (counting zeros upward from w -> 0+), differentiates a root with
respect to the moving radius by implicit differentiation, and produces the
dimensionless frequency-map curves (w r_i/pi, w r_o/pi).

Natural units c = 1 throughout: frequencies carry units of inverse length.
All computations are pure functions of their arguments; there is no shared
mutable state, so sweeps parallelize trivially.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .bessel import (
    spherical_j,
    spherical_j_prime,
    spherical_j_prime2,
    spherical_n,
    spherical_n_prime,
    spherical_n_prime2,
)

log = logging.getLogger(__name__)

__all__ = [
    "ShellBC",
    "MovingShell",
    "BoundaryConfig",
    "CavityGeometry",
    "ModeFrequency",
    "RootSearchError",
    "DegenerateRootError",
    "characteristic",
    "solve_frequencies",
    "frequency_map",
    "map_ordinate",
    "domega_dr_beta",
    "asymptotic_frequency",
]

# Scan resolution: fraction of the asymptotic root spacing pi/(r_o - r_i).
_SCAN_STEPS_PER_SPACING = 8
_SCAN_CHUNK = 4096
DEFAULT_TOL = 1e-12


class RootSearchError(RuntimeError):
    """Scan exhausted before the requested number of roots was found."""


class DegenerateRootError(RuntimeError):
    """The characteristic residual has (numerically) vanishing slope at a root."""


class ShellBC(Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


class MovingShell(Enum):
    INNER = "inner"
    OUTER = "outer"


@dataclass(frozen=True)
class BoundaryConfig:
    """Which boundary condition sits on which shell, and which shell moves.

    At most one shell may be Neumann, and the moving shell must carry the
    Dirichlet condition (a Neumann condition on a moving shell would pick up
    a velocity term in the lab frame and is out of scope).
    """

    inner_bc: ShellBC
    outer_bc: ShellBC
    moving_shell: MovingShell

    def __post_init__(self):
        if self.inner_bc is ShellBC.NEUMANN and self.outer_bc is ShellBC.NEUMANN:
            raise ValueError("at most one shell may carry a Neumann condition")
        if self.moving_bc is not ShellBC.DIRICHLET:
            raise ValueError(
                "the moving shell must carry the Dirichlet condition; "
                "a Neumann shell has to stay at rest"
            )

    @property
    def moving_bc(self) -> ShellBC:
        return self.inner_bc if self.moving_shell is MovingShell.INNER else self.outer_bc

    @property
    def is_mixed(self) -> bool:
        return ShellBC.NEUMANN in (self.inner_bc, self.outer_bc)

    @property
    def neumann_shell(self) -> MovingShell | None:
        """Location of the (static) Neumann shell, or None for DD."""
        if self.inner_bc is ShellBC.NEUMANN:
            return MovingShell.INNER
        if self.outer_bc is ShellBC.NEUMANN:
            return MovingShell.OUTER
        return None

    @property
    def label(self) -> str:
        """Legend tag: inner letter then outer letter, tilde marks the moving shell."""
        tilde = "̃"
        inner = "D" if self.inner_bc is ShellBC.DIRICHLET else "N"
        outer = "D" if self.outer_bc is ShellBC.DIRICHLET else "N"
        if self.moving_shell is MovingShell.INNER:
            inner += tilde
        else:
            outer += tilde
        return inner + outer

    @classmethod
    def dirichlet_dirichlet(cls, moving: MovingShell = MovingShell.OUTER) -> "BoundaryConfig":
        return cls(ShellBC.DIRICHLET, ShellBC.DIRICHLET, moving)

    @classmethod
    def neumann_inner(cls) -> "BoundaryConfig":
        """Neumann on the static inner shell, Dirichlet on the moving outer shell."""
        return cls(ShellBC.NEUMANN, ShellBC.DIRICHLET, MovingShell.OUTER)

    @classmethod
    def neumann_outer(cls) -> "BoundaryConfig":
        """Dirichlet on the moving inner shell, Neumann on the static outer shell."""
        return cls(ShellBC.DIRICHLET, ShellBC.NEUMANN, MovingShell.INNER)


@dataclass(frozen=True)
class CavityGeometry:
    """Equilibrium shell radii, r_o > r_i > 0."""

    r_i: float
    r_o: float

    def __post_init__(self):
        if not (0.0 < self.r_i < self.r_o):
            raise ValueError(f"require 0 < r_i < r_o, got r_i={self.r_i}, r_o={self.r_o}")

    @property
    def gap(self) -> float:
        return self.r_o - self.r_i

    def moving_radius(self, config: BoundaryConfig) -> float:
        return self.r_i if config.moving_shell is MovingShell.INNER else self.r_o

    def static_radius(self, config: BoundaryConfig) -> float:
        return self.r_o if config.moving_shell is MovingShell.INNER else self.r_i

    def with_moving_radius(self, config: BoundaryConfig, value: float) -> "CavityGeometry":
        if config.moving_shell is MovingShell.INNER:
            return CavityGeometry(value, self.r_o)
        return CavityGeometry(self.r_i, value)


@dataclass(frozen=True)
class ModeFrequency:
    """A solved root of the characteristic equation.

    ``s`` is 1-based and counts roots upward from w -> 0+; for a fixed
    (config, geometry, l) the frequencies are strictly increasing in s.
    ``domega_dr_beta`` is the sensitivity of the root to the moving shell's
    radius, from implicit differentiation of the characteristic equation.
    """

    l: int
    s: int
    omega: float
    domega_dr_beta: float


def _check_l(l: int) -> int:
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a non-negative integer, got {l}")
    return int(l)


def characteristic(config: BoundaryConfig, l: int, omega, geom: CavityGeometry):
    """Residual of the characteristic equation; its zeros are the mode frequencies.

    Continuous in omega on (0, inf).  Accepts scalar or array ``omega``.
    """
    l = _check_l(l)
    w = np.asarray(omega, dtype=float)
    if not np.all(w > 0.0):
        raise ValueError("omega must be positive")
    if not config.is_mixed:
        out = spherical_j(l, w * geom.r_o) * spherical_n(l, w * geom.r_i) - spherical_j(
            l, w * geom.r_i
        ) * spherical_n(l, w * geom.r_o)
    else:
        r_a = geom.static_radius(config)
        r_b = geom.moving_radius(config)
        out = w * spherical_j_prime(l, w * r_a) * spherical_n(l, w * r_b) - spherical_j(
            l, w * r_b
        ) * w * spherical_n_prime(l, w * r_a)
    return float(out) if np.ndim(omega) == 0 else out


def _residual_scale(config: BoundaryConfig, l: int, w: np.ndarray, geom: CavityGeometry):
    """Positive envelope factor used to condition the residual for sign scans.

    n_l blows up like x^-(l+1) at small argument; dividing the residual by the
    product of per-shell envelopes keeps it O(1) without moving its zeros
    (the envelope never vanishes because j and n, or their derivatives, have
    no common zeros by the Wronskian).
    """
    if not config.is_mixed:
        s_in = np.hypot(spherical_j(l, w * geom.r_i), spherical_n(l, w * geom.r_i))
        s_out = np.hypot(spherical_j(l, w * geom.r_o), spherical_n(l, w * geom.r_o))
        return s_in * s_out
    r_a = geom.static_radius(config)
    r_b = geom.moving_radius(config)
    s_a = w * np.hypot(spherical_j_prime(l, w * r_a), spherical_n_prime(l, w * r_a))
    s_b = np.hypot(spherical_j(l, w * r_b), spherical_n(l, w * r_b))
    return s_a * s_b


def _scaled_residual(config: BoundaryConfig, l: int, w, geom: CavityGeometry):
    w = np.asarray(w, dtype=float)
    return characteristic(config, l, w, geom) / _residual_scale(config, l, w, geom)


def _omega_upper_bound(l: int, s_max: int, geom: CavityGeometry) -> float:
    # 1-D comparison problem with the centrifugal term frozen at its maximum:
    # omega_s^2 <= (s pi/gap)^2 + l(l+1)/r_i^2, and mixed spectra lie below DD.
    return math.sqrt(((s_max + 2) * math.pi / geom.gap) ** 2 + l * (l + 1) / geom.r_i**2) + 3.0 / geom.gap


def _scan_sign_changes(f, lo: float, hi: float, step: float, count: int):
    """Bracket up to ``count`` sign changes of f on [lo, hi] at resolution step."""
    n = int(math.ceil((hi - lo) / step)) + 1
    brackets = []
    prev_x = prev_v = None
    for start in range(0, n, _SCAN_CHUNK):
        stop = min(start + _SCAN_CHUNK, n)
        xs = lo + step * np.arange(start, stop, dtype=float)
        vs = np.asarray(f(xs), dtype=float)
        zero = vs == 0.0
        if np.any(zero):
            # Nudge exact grid hits so every root shows up as a sign change.
            xs = xs.copy()
            xs[zero] += 1e-9 * step
            vs = np.asarray(f(xs), dtype=float)
        if prev_x is not None:
            xs = np.concatenate(([prev_x], xs))
            vs = np.concatenate(([prev_v], vs))
        flips = np.nonzero(np.signbit(vs[:-1]) != np.signbit(vs[1:]))[0]
        for i in flips:
            brackets.append((xs[i], xs[i + 1]))
            if len(brackets) == count:
                return brackets
        prev_x, prev_v = xs[-1], vs[-1]
    return brackets


def solve_frequencies(
    config: BoundaryConfig,
    l: int,
    s_max: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> list[ModeFrequency]:
    """First ``s_max`` mode frequencies, in increasing order.

    Scans omega upward from 1e-6/gap in steps of pi/(8 gap), brackets sign
    changes of the (envelope-conditioned) characteristic residual, and
    refines each bracket to relative tolerance ``tol``.

    Parameters
    ----------
    config, geom : boundary arrangement and equilibrium radii.
    l : angular index (non-negative).
    s_max : number of radial roots requested (>= 1).
    tol : relative tolerance on each root.

    Raises
    ------
    RootSearchError
        If the scan upper bound is reached first; the message reports how
        many roots were found.
    """
    l = _check_l(l)
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    step = math.pi / (_SCAN_STEPS_PER_SPACING * geom.gap)
    lo = 1e-6 / geom.gap
    hi = _omega_upper_bound(l, s_max, geom)

    def f(w):
        return _scaled_residual(config, l, w, geom)

    brackets = _scan_sign_changes(f, lo, hi, step, s_max)
    if len(brackets) < s_max:
        raise RootSearchError(
            f"found {len(brackets)} of {s_max} roots for l={l}, {config.label} "
            f"on omega <= {hi:.6g} (geometry r_i={geom.r_i}, r_o={geom.r_o})"
        )
    out = []
    for s, (a, b) in enumerate(brackets, start=1):
        root = brentq(lambda w: f(float(w)), a, b, xtol=tol * a, rtol=max(tol, 8.9e-16))
        out.append(
            ModeFrequency(l=l, s=s, omega=root, domega_dr_beta=_implicit_derivative(config, l, root, geom))
        )
    return out


def _char_partials(config: BoundaryConfig, l: int, w: float, geom: CavityGeometry):
    """Analytic (dG/domega, dG/dr_beta) of the characteristic residual at omega=w."""
    if not config.is_mixed:
        xi, xo = w * geom.r_i, w * geom.r_o
        j_i, n_i = spherical_j(l, xi), spherical_n(l, xi)
        j_o, n_o = spherical_j(l, xo), spherical_n(l, xo)
        jp_i, np_i = spherical_j_prime(l, xi), spherical_n_prime(l, xi)
        jp_o, np_o = spherical_j_prime(l, xo), spherical_n_prime(l, xo)
        dG_dw = (
            geom.r_o * jp_o * n_i
            + geom.r_i * j_o * np_i
            - geom.r_i * jp_i * n_o
            - geom.r_o * j_i * np_o
        )
        dG_dri = w * (j_o * np_i - jp_i * n_o)
        dG_dro = w * (jp_o * n_i - j_i * np_o)
        dG_drb = dG_dri if config.moving_shell is MovingShell.INNER else dG_dro
        return dG_dw, dG_drb
    r_a = geom.static_radius(config)
    r_b = geom.moving_radius(config)
    xa, xb = w * r_a, w * r_b
    jp_a, np_a = spherical_j_prime(l, xa), spherical_n_prime(l, xa)
    jpp_a, npp_a = spherical_j_prime2(l, xa), spherical_n_prime2(l, xa)
    j_b, n_b = spherical_j(l, xb), spherical_n(l, xb)
    jp_b, np_b = spherical_j_prime(l, xb), spherical_n_prime(l, xb)
    dG_dw = (jp_a * n_b - j_b * np_a) + w * (
        r_a * jpp_a * n_b + r_b * jp_a * np_b - r_b * jp_b * np_a - r_a * j_b * npp_a
    )
    dG_drb = w * w * (jp_a * np_b - jp_b * np_a)
    return dG_dw, dG_drb


def _implicit_derivative(config: BoundaryConfig, l: int, omega: float, geom: CavityGeometry) -> float:
    dG_dw, dG_drb = _char_partials(config, l, omega, geom)
    # Slope degenerate relative to the residual's natural magnitude: a
    # (near-)double root.  Report it instead of guessing.
    scale = float(_residual_scale(config, l, np.asarray(omega), geom))
    if abs(dG_dw) < 1e-10 * scale * geom.gap:
        raise DegenerateRootError(
            f"characteristic slope vanishes at omega={omega:.12g} (l={l}, {config.label})"
        )
    return -dG_drb / dG_dw


def domega_dr_beta(
    config: BoundaryConfig,
    l: int,
    s: int,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> float:
    """d omega_ls / d r_beta at the solved root, by implicit differentiation."""
    mode = solve_frequencies(config, l, s, geom, tol=tol)[s - 1]
    return mode.domega_dr_beta


def asymptotic_frequency(config: BoundaryConfig, s: int, geom: CavityGeometry) -> float:
    """One-dimensional limit of omega_ls for r_i >> r_o - r_i (any l).

    s*pi/gap for DD, (s - 1/2)*pi/gap for mixed conditions.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if config.is_mixed:
        return (s - 0.5) * math.pi / geom.gap
    return s * math.pi / geom.gap


def _jl_zero(l: int, k: int) -> float:
    """k-th positive zero of j_l (k >= 1)."""
    hi = l + (k + 2) * math.pi + 2.0 * max(l, 1) ** (1.0 / 3.0) + 10.0
    brackets = _scan_sign_changes(lambda x: spherical_j(l, x), 1e-6, hi, 0.2, k)
    if len(brackets) < k:
        raise RootSearchError(f"could not bracket zero #{k} of j_{l}")
    a, b = brackets[k - 1]
    return brentq(lambda x: spherical_j(l, float(x)), a, b, xtol=1e-14, rtol=8.9e-16)


def _jl_prime_zero(l: int, k: int) -> float:
    """k-th positive zero of j_l' (k >= 1)."""
    hi = l + (k + 2) * math.pi + 2.0 * max(l, 1) ** (1.0 / 3.0) + 10.0
    brackets = _scan_sign_changes(lambda x: spherical_j_prime(l, x), 1e-6, hi, 0.2, k)
    if len(brackets) < k:
        raise RootSearchError(f"could not bracket zero #{k} of j_{l}'")
    a, b = brackets[k - 1]
    return brentq(lambda x: spherical_j_prime(l, float(x)), a, b, xtol=1e-14, rtol=8.9e-16)


def _map_ordinate_limit(config: BoundaryConfig, l: int, s: int) -> float:
    """Curve ordinate at abscissa 0 (inner radius shrunk away)."""
    if config.neumann_shell is not MovingShell.OUTER:
        # n_l(w r_i) dominates as r_i -> 0, leaving j_l(w r_o) = 0.
        return _jl_zero(l, s) / math.pi
    # Neumann outer: the surviving equation is j_l'(w r_o) = 0.  For l = 0
    # the lowest branch collapses to zero frequency, shifting the count.
    if l == 0:
        if s == 1:
            return 0.0
        return _jl_prime_zero(l, s - 1) / math.pi
    return _jl_prime_zero(l, s) / math.pi


def map_ordinate(config: BoundaryConfig, l: int, s: int, abscissa: float, tol: float = DEFAULT_TOL) -> float:
    """Ordinate w r_o/pi of the (l, s) frequency-map curve at abscissa w r_i/pi.

    The characteristic depends only on (w r_i, w r_o), so the curve is found
    by fixing w = pi, r_i = abscissa and locating the s-th zero of the
    residual in r_o; the ordinate is then numerically equal to r_o.
    """
    l = _check_l(l)
    if s < 1:
        raise ValueError("s must be >= 1")
    if abscissa < 0.0:
        raise ValueError("abscissa must be non-negative")
    if abscissa == 0.0:
        return _map_ordinate_limit(config, l, s)
    w = math.pi
    r_i = abscissa

    def f(r_o):
        r_o = np.asarray(r_o, dtype=float)
        geoms = [CavityGeometry(r_i, float(v)) for v in np.atleast_1d(r_o)]
        vals = np.array([_scaled_residual(config, l, w, g) for g in geoms])
        return vals if np.ndim(r_o) else float(vals[0])

    # Zeros in r_o are spaced at least pi/w = 1 apart; beyond the turning
    # radius sqrt(l(l+1))/w the phase advances at full rate.
    lo = r_i * (1.0 + 1e-9)
    hi = r_i + math.sqrt(l * (l + 1)) / w + (s + 2) * math.pi / w + 2.0
    brackets = _scan_sign_changes(f, lo, hi, 1.0 / 8.0, s)
    if len(brackets) < s:
        raise RootSearchError(
            f"found {len(brackets)} of {s} map roots at abscissa {abscissa} (l={l}, {config.label})"
        )
    a, b = brackets[s - 1]
    root = brentq(lambda r: f(float(r)), a, b, xtol=tol * a, rtol=max(tol, 8.9e-16))
    return root


def frequency_map(
    config: BoundaryConfig,
    l: int,
    s: int,
    ratio_grid,
    tol: float = DEFAULT_TOL,
) -> list[tuple[float, float]]:
    """Sample the (l, s) curve over a grid of geometry ratios r_i/(r_o - r_i).

    Returns one (w r_i/pi, w r_o/pi) pair per grid point.  Solver failures
    are logged and skipped so a sweep never aborts on a single bad point.
    """
    out = []
    for ratio in ratio_grid:
        if ratio <= 0.0:
            log.warning("frequency_map: skipping non-positive ratio %s", ratio)
            continue
        geom = CavityGeometry(float(ratio), float(ratio) + 1.0)
        try:
            mode = solve_frequencies(config, l, s, geom, tol=tol)[s - 1]
        except (RootSearchError, DegenerateRootError) as exc:
            log.warning("frequency_map: l=%d s=%d ratio=%g failed: %s", l, s, ratio, exc)
            continue
        out.append((mode.omega * geom.r_i / math.pi, mode.omega * geom.r_o / math.pi))
    return out
