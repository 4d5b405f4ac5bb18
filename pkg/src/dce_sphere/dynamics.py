"""Expected particle creation from a radially moving shell.

For an initial vacuum the expected number of quanta created in mode
(l, m, s) after the motion stops at time T is

    N_lms = sum_s' | Int_0^T mu_(s's)(t) exp{i [Omega_ls'(t) + Omega_ls(t)]} dt |^2

with Omega_ls(t) the time integral of the instantaneous frequency and
mu_(s's) the symmetrized coupling coefficient.  The right-hand side carries
no m dependence; the (2l+1)-fold m degeneracy is a multiplicity factor.

For the sinusoidal law of motion r_b(t) = r_b (1 + eps sin(varpi t)) on
[0, T] (sudden start and stop), expanding to first order in eps gives

    N_lms = (eps varpi T / 2)^2 sum_s' | C_(ss') f_lss'(varpi; T) |^2

with the static coupling constants C and the finite-duration spectral
window f of ``detuning``.  At exact resonance varpi = w_ls + w_ls' this
reduces to the quadratic-in-T law (eps w T / 2)^2 |C_(ss')|^2, valid in the
short-time regime eps w T << 1.

``particles_general`` evaluates the full time integral for an arbitrary
sampled trajectory.  The instantaneous spectrum and coupling kernels depend
on time only through the moving radius, so they are tabulated once as
Chebyshev interpolants over the radius excursion (verified against direct
evaluation), and the oscillatory time integral is then accumulated on
Gauss-Legendre panels sized well below the fastest phase period, with a
halved-step consistency check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Union

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.interpolate import CubicSpline

from .coupling import _coupling_row
from .spectrum import DEFAULT_TOL, BoundaryConfig, CavityGeometry, solve_frequencies

__all__ = [
    "SinusoidalMotion",
    "GeneralMotion",
    "MotionProfile",
    "DetuningResponse",
    "ParticleSpectrum",
    "ResolutionError",
    "TruncationWarning",
    "ValidityWarning",
    "multiplicity",
    "phase_integral",
    "detuning",
    "particles_sinusoidal",
    "particles_resonant",
    "particles_general",
    "particles_asymptotic",
    "sinusoidal_spectrum",
]

_VELOCITY_WARN = 0.1  # |rdot| threshold (c = 1) for the perturbative regime
_SHORT_TIME_WARN = 0.3  # eps * w * T threshold for the resonant formula
_GL_PER_PANEL = 8
_CHEB_PER_PANEL = 16


class ResolutionError(RuntimeError):
    """Halving the time step changed the result beyond tolerance."""


class TruncationWarning(UserWarning):
    """The s' sum may not have converged at the requested s_max."""


class ValidityWarning(UserWarning):
    """Parameters leave the perturbative / short-time regime."""


def multiplicity(l: int) -> int:
    """Number of degenerate m modes sharing one (l, s) result."""
    return 2 * l + 1


@dataclass(frozen=True)
class SinusoidalMotion:
    """r_b(t) = r_beta0 (1 + epsilon sin(varpi t)) for t in [0, duration].

    Outside the window the shell is frozen (sudden start and stop: the
    velocity jumps at both ends).  epsilon must stay below 1 and small
    enough that the shells never touch; the latter is checked against the
    static shell wherever a geometry is available.
    """

    epsilon: float
    varpi: float
    duration: float
    r_beta0: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        if self.varpi <= 0.0 or self.duration <= 0.0 or self.r_beta0 <= 0.0:
            raise ValueError("varpi, duration and r_beta0 must be positive")
        if self.epsilon * self.varpi * self.r_beta0 > _VELOCITY_WARN:
            warnings.warn(
                f"peak shell speed {self.epsilon * self.varpi * self.r_beta0:.3g} "
                f"exceeds {_VELOCITY_WARN} (c = 1); outside the perturbative regime",
                ValidityWarning,
                stacklevel=2,
            )

    def r_beta(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        out = self.r_beta0 * (1.0 + self.epsilon * np.sin(self.varpi * tc))
        return float(out) if np.ndim(t) == 0 else out

    def r_beta_dot(self, t):
        ta = np.asarray(t, dtype=float)
        inside = (ta >= 0.0) & (ta <= self.duration)
        out = np.where(
            inside, self.r_beta0 * self.epsilon * self.varpi * np.cos(self.varpi * ta), 0.0
        )
        return float(out) if np.ndim(t) == 0 else out

    def radius_range(self) -> tuple[float, float]:
        return self.r_beta0 * (1.0 - self.epsilon), self.r_beta0 * (1.0 + self.epsilon)

    def smoothness_timescale(self) -> float:
        return 2.0 * math.pi / self.varpi


@dataclass(frozen=True)
class GeneralMotion:
    """Sampled trajectory of the moving radius with its time derivative."""

    t: np.ndarray
    r: np.ndarray
    rdot: np.ndarray

    def __post_init__(self):
        for name in ("t", "r", "rdot"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.t.ndim != 1 or self.t.size < 4:
            raise ValueError("need at least 4 samples")
        if self.r.shape != self.t.shape or self.rdot.shape != self.t.shape:
            raise ValueError("t, r and rdot must have identical shapes")
        if self.t[0] != 0.0 or np.any(np.diff(self.t) <= 0.0):
            raise ValueError("t must start at 0 and be strictly increasing")
        if not (np.all(np.isfinite(self.r)) and np.all(np.isfinite(self.rdot))):
            raise ValueError("trajectory samples must be finite")
        if np.any(self.r <= 0.0):
            raise ValueError("the moving radius must stay positive")

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.t, self.r)

    @cached_property
    def _spline_dot(self) -> CubicSpline:
        return CubicSpline(self.t, self.rdot)

    def r_beta(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        out = self._spline(tc)
        return float(out) if np.ndim(t) == 0 else out

    def r_beta_dot(self, t):
        ta = np.asarray(t, dtype=float)
        inside = (ta >= 0.0) & (ta <= self.duration)
        out = np.where(inside, self._spline_dot(np.clip(ta, 0.0, self.duration)), 0.0)
        return float(out) if np.ndim(t) == 0 else out

    def radius_range(self) -> tuple[float, float]:
        return float(np.min(self.r)), float(np.max(self.r))

    def smoothness_timescale(self) -> float:
        # Velocity sign changes bound the fastest oscillation of the drive.
        flips = np.count_nonzero(np.diff(np.signbit(self.rdot)))
        return self.duration / max(1, flips)

    def reversed(self) -> "GeneralMotion":
        """The same path traversed backwards in time."""
        return GeneralMotion(
            t=self.duration - self.t[::-1], r=self.r[::-1], rdot=-self.rdot[::-1]
        )

    @classmethod
    def from_sinusoidal(cls, motion: SinusoidalMotion, samples_per_period: int = 256) -> "GeneralMotion":
        periods = motion.duration * motion.varpi / (2.0 * math.pi)
        n = max(int(math.ceil(samples_per_period * periods)), 64)
        t = np.linspace(0.0, motion.duration, n + 1)
        return cls(t=t, r=motion.r_beta(t), rdot=motion.r_beta_dot(t))


MotionProfile = Union[SinusoidalMotion, GeneralMotion]


@dataclass(frozen=True)
class DetuningResponse:
    """Finite-duration spectral window f_lss'(varpi; T).

    |f| <= 2 always.  At exact resonance the co-rotating term equals 1 and
    the counter-rotating term contributes O(1/(w T)); it vanishes exactly
    whenever w_sum * T is a multiple of pi.
    """

    value: complex
    varpi: float
    duration: float
    omega_sum: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class ParticleSpectrum:
    """Mode-resolved expected particle numbers with run metadata."""

    values: Mapping[tuple[int, int], float]
    config: BoundaryConfig
    geom: CavityGeometry
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, v in self.values.items():
            if v < 0.0:
                raise ValueError(f"negative particle number at (l, s)={key}")

    def n(self, l: int, s: int) -> float:
        """Expected number per (l, m, s) mode; independent of m."""
        return self.values[(l, s)]

    def n_total(self, l: int, s: int) -> float:
        """Summed over the 2l+1 degenerate m values."""
        return multiplicity(l) * self.values[(l, s)]


def _check_motion_geometry(config: BoundaryConfig, geom: CavityGeometry, motion: MotionProfile):
    r0 = geom.moving_radius(config)
    start = float(motion.r_beta(0.0))
    if abs(start - r0) > 1e-9 * r0:
        raise ValueError(
            f"motion starts at radius {start}, but the equilibrium moving radius is {r0}"
        )
    p_lo, p_hi = motion.radius_range()
    for p in (p_lo, p_hi):
        geom.with_moving_radius(config, p)  # raises if the shells cross


# ----------------------------------------------------------------------
# Chebyshev surrogates in the moving radius


class _RadiusTables:
    """Instantaneous frequencies (and optionally coupling kernels) vs radius.

    Everything in the time integrand depends on t only through the moving
    radius p, so the expensive root solves and quadratures are done on a
    few Chebyshev nodes spanning the excursion and then evaluated as
    polynomials.  The surrogate is verified against direct evaluation at
    off-node radii and refined once before giving up.
    """

    def __init__(
        self,
        config: BoundaryConfig,
        geom: CavityGeometry,
        l: int,
        s: int,
        p_lo: float,
        p_hi: float,
        s_max: int = 0,
        tol: float = DEFAULT_TOL,
        npts: int = 24,
    ):
        self.config, self.geom, self.l, self.s, self.s_max = config, geom, l, s, s_max
        self.tol = tol
        self.n_modes = max(s, s_max) if s_max else s
        mid = 0.5 * (p_lo + p_hi)
        self.static = (p_hi - p_lo) <= 1e-12 * mid
        self.p_lo, self.p_hi = p_lo, p_hi
        if self.static:
            om, ker = self._direct(mid)
            self._om_const, self._ker_const = om, ker
            return
        for n in (npts, 2 * npts):
            self._fit(n)
            if self._verify():
                return
        raise ResolutionError(
            "radius surrogate failed verification; trajectory excursion too wild"
        )

    def _direct(self, p: float):
        geom_p = self.geom.with_moving_radius(self.config, p)
        if self.s_max:
            return _coupling_row(self.config, self.l, self.s, self.s_max, geom_p, tol=self.tol)
        freqs = solve_frequencies(self.config, self.l, self.n_modes, geom_p, tol=self.tol)
        return np.array([f.omega for f in freqs]), None

    def _fit(self, n: int):
        ref = np.cos(np.pi * (2.0 * np.arange(n) + 1.0) / (2.0 * n))
        ps = 0.5 * (self.p_hi - self.p_lo) * ref + 0.5 * (self.p_hi + self.p_lo)
        oms = np.empty((n, self.n_modes))
        kers = np.empty((n, self.s_max)) if self.s_max else None
        for i, p in enumerate(ps):
            om, ker = self._direct(p)
            oms[i] = om
            if self.s_max:
                kers[i] = ker
        self._om_coef = _cheb.chebfit(ref, oms, deg=n - 1)
        self._ker_coef = _cheb.chebfit(ref, kers, deg=n - 1) if self.s_max else None

    def _ref(self, p):
        return (2.0 * np.asarray(p, dtype=float) - (self.p_hi + self.p_lo)) / (self.p_hi - self.p_lo)

    def omegas(self, p) -> np.ndarray:
        """Shape (n_modes,) + p.shape."""
        if self.static:
            return np.broadcast_to(
                self._om_const[:, None], (self.n_modes, np.size(p))
            ).reshape((self.n_modes,) + np.shape(p))
        return _cheb.chebval(self._ref(p), self._om_coef)

    def kernels(self, p) -> np.ndarray:
        if self.static:
            return np.broadcast_to(
                self._ker_const[:, None], (self.s_max, np.size(p))
            ).reshape((self.s_max,) + np.shape(p))
        return _cheb.chebval(self._ref(p), self._ker_coef)

    def _verify(self) -> bool:
        probes = self.p_lo + np.array([0.19, 0.53, 0.86]) * (self.p_hi - self.p_lo)
        for p in probes:
            om, ker = self._direct(p)
            if np.max(np.abs(self.omegas(p) - om)) > 1e-8 * np.max(om):
                return False
            if self.s_max:
                scale = max(1e-300, float(np.max(np.abs(ker))))
                if np.max(np.abs(self.kernels(p) - ker)) > 1e-8 * scale:
                    return False
        return True


# ----------------------------------------------------------------------
# Panelled time integration

_GL_REF = np.polynomial.legendre.leggauss(_GL_PER_PANEL)
_CHEB_REF = np.cos(np.pi * (2.0 * np.arange(_CHEB_PER_PANEL) + 1.0) / (2.0 * _CHEB_PER_PANEL))


def _integrate_phases(
    omega_of_t: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    integrand_accumulate,
):
    """March over panels keeping cumulative phases for every mode row.

    ``omega_of_t`` maps a time array to a (n_modes, n_times) frequency
    array.  Per panel the frequencies are represented by a Chebyshev
    interpolant whose antiderivative supplies the phase at the panel's
    Gauss-Legendre nodes; ``integrand_accumulate(t, w, phases)`` is then
    invoked with the scaled GL weights.
    """
    n_modes = None
    offsets = None
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        t_cheb = half * _CHEB_REF + mid
        om = np.asarray(omega_of_t(t_cheb))
        if n_modes is None:
            n_modes = om.shape[0]
            offsets = np.zeros(n_modes)
        coef = _cheb.chebfit(_CHEB_REF, om.T, deg=_CHEB_PER_PANEL - 1)
        icoef = _cheb.chebint(coef, m=1, scl=half, axis=0)
        icoef[0] -= _cheb.chebval(-1.0, icoef)
        t_gl = half * _GL_REF[0] + mid
        w_gl = half * _GL_REF[1]
        phases = offsets[:, None] + _cheb.chebval(_GL_REF[0], icoef)
        integrand_accumulate(t_gl, w_gl, phases)
        offsets += _cheb.chebval(1.0, icoef)
    return offsets


def _panel_edges(t_end: float, panel_len: float, min_panels: int = 16) -> np.ndarray:
    n = max(int(math.ceil(t_end / panel_len)), min_panels)
    return np.linspace(0.0, t_end, n + 1)


def phase_integral(
    l: int,
    s: int,
    motion: MotionProfile,
    t: float,
    config: BoundaryConfig,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> float:
    """Accumulated phase Omega_ls(t): time integral of the instantaneous frequency."""
    if t < 0.0 or t > motion.duration + 1e-12 * motion.duration:
        raise ValueError("t must lie within the motion's duration")
    if t == 0.0:
        return 0.0
    _check_motion_geometry(config, geom, motion)
    p_lo, p_hi = motion.radius_range()
    tables = _RadiusTables(config, geom, l, s, p_lo, p_hi, tol=tol)

    def omega_of_t(times):
        return tables.omegas(motion.r_beta(times))[s - 1 : s, :]

    def run(panel_len):
        edges = _panel_edges(t, panel_len)
        total = _integrate_phases(omega_of_t, edges, lambda *_: None)
        return float(total[0])

    panel_len = min(motion.smoothness_timescale(), t) / 8.0
    coarse = run(panel_len)
    fine = run(panel_len / 2.0)
    if abs(fine - coarse) > 1e-9 * abs(fine):
        raise ResolutionError("phase integral failed the halved-step check")
    return fine


def detuning(
    l: int,
    s: int,
    s_prime: int,
    varpi: float,
    T: float,
    config: BoundaryConfig,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> DetuningResponse:
    """Spectral window f_lss'(varpi; T) for a drive of duration T.

    Both the co- and counter-rotating terms are kept; the removable
    singularities at varpi = +-(w_ls + w_ls') are evaluated by their limits.
    """
    if T <= 0.0:
        raise ValueError("T must be positive")
    if varpi < 0.0:
        raise ValueError("varpi must be non-negative")
    freqs = solve_frequencies(config, l, max(s, s_prime), geom, tol=tol)
    w_sum = freqs[s - 1].omega + freqs[s_prime - 1].omega
    value = _window(varpi, w_sum, T)
    return DetuningResponse(value=complex(value), varpi=varpi, duration=T, omega_sum=w_sum)


def _window(varpi, w_sum, T):
    # (exp(ix) - 1)/(ix) = exp(ix/2) sinc(x/(2 pi)); numpy's sinc handles x = 0.
    a = (varpi - w_sum) * T
    b = (varpi + w_sum) * T
    return np.exp(0.5j * a) * np.sinc(a / (2.0 * math.pi)) + np.exp(-0.5j * b) * np.sinc(
        b / (2.0 * math.pi)
    )


def _sinusoidal_terms(
    config: BoundaryConfig,
    l: int,
    s: int,
    motion: SinusoidalMotion,
    geom: CavityGeometry,
    s_max: int,
    tol: float,
):
    omegas, kernel = _coupling_row(config, l, s, s_max, geom, tol=tol)
    c_sym = geom.moving_radius(config) * kernel
    w_sums = omegas[:s_max] + omegas[s - 1]
    f = _window(motion.varpi, w_sums, motion.duration)
    prefactor = (motion.epsilon * motion.varpi * motion.duration / 2.0) ** 2
    return prefactor * np.abs(c_sym * f) ** 2


def _tail_estimate(terms: np.ndarray) -> float:
    # The summand decays like s'^-3 off resonance, so the residual tail is
    # bounded by roughly s_max times the last retained terms.
    if terms.size < 2:
        return float(terms[-1]) * terms.size
    return float(terms[-1] + terms[-2]) * terms.size


def particles_sinusoidal(
    config: BoundaryConfig,
    l: int,
    s: int,
    motion: SinusoidalMotion,
    geom: CavityGeometry,
    s_max: int = 12,
    tol: float = DEFAULT_TOL,
) -> float:
    """Perturbative N_lms for the sinusoidal drive, summed over s' <= s_max."""
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    _check_motion_geometry(config, geom, motion)
    if motion.epsilon == 0.0:
        return 0.0
    terms = _sinusoidal_terms(config, l, s, motion, geom, s_max, tol)
    total = float(np.sum(terms))
    tail = _tail_estimate(terms)
    if tail > 1e-3 * max(total, 1e-300):
        warnings.warn(
            f"s' sum may be unconverged at s_max={s_max}: tail estimate "
            f"{tail:.3g} vs total {total:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    return total


def particles_resonant(
    config: BoundaryConfig,
    l: int,
    s: int,
    s_prime: int,
    epsilon: float,
    T: float,
    geom: CavityGeometry,
    tol: float = DEFAULT_TOL,
) -> float:
    """Resonant-limit N_lms = (eps w_lss' T/2)^2 |C_(ss')|^2 (short-time regime)."""
    if epsilon < 0.0 or T <= 0.0:
        raise ValueError("epsilon must be >= 0 and T positive")
    omegas, kernel = _coupling_row(config, l, s, max(s, s_prime), geom, tol=tol)
    w_sum = omegas[s - 1] + omegas[s_prime - 1]
    if epsilon * w_sum * T > _SHORT_TIME_WARN:
        warnings.warn(
            f"eps*w*T = {epsilon * w_sum * T:.3g} exceeds {_SHORT_TIME_WARN}; "
            "the quadratic-in-T resonant formula needs eps*w*T << 1",
            ValidityWarning,
            stacklevel=2,
        )
    c_sym = geom.moving_radius(config) * kernel[s_prime - 1]
    return (epsilon * w_sum * T / 2.0) ** 2 * c_sym**2


def particles_general(
    config: BoundaryConfig,
    l: int,
    s: int,
    motion: GeneralMotion,
    geom: CavityGeometry,
    s_max: int = 12,
    time_steps: int | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """N_lms from the full time integral along an arbitrary trajectory.

    For each s' <= s_max the integral of mu_(s's) exp{i(Omega_ls' + Omega_ls)}
    over the motion is accumulated on Gauss-Legendre panels; the result must
    be stable under halving the panel length to one part in 1e3, otherwise a
    ``ResolutionError`` is raised.
    """
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    _check_motion_geometry(config, geom, motion)
    t_end = motion.duration
    p_lo, p_hi = motion.radius_range()
    tables = _RadiusTables(config, geom, l, s, p_lo, p_hi, s_max=s_max, tol=tol)

    # Fastest integrand phase over the excursion bounds the panel length.
    om_probe = tables.omegas(np.array([p_lo, 0.5 * (p_lo + p_hi), p_hi]))
    w_pair_max = float(np.max(om_probe) + np.max(om_probe[s - 1]))
    panel_len = min(2.0 * math.pi / w_pair_max, motion.smoothness_timescale(), t_end) / 8.0
    if time_steps is not None:
        shortest = 2.0 * math.pi / w_pair_max
        if time_steps < 40.0 * t_end / shortest:
            raise ValueError(
                f"time_steps={time_steps} undersamples the fastest phase period; "
                f"need at least {int(math.ceil(40.0 * t_end / shortest))}"
            )
        panel_len = t_end / max(1, int(math.ceil(time_steps / _GL_PER_PANEL)))

    def omega_of_t(times):
        return tables.omegas(motion.r_beta(times))

    def run(h) -> float:
        integrals = np.zeros(s_max, dtype=complex)

        def accumulate(t_gl, w_gl, phases):
            p = motion.r_beta(t_gl)
            pdot = motion.r_beta_dot(t_gl)
            mu_rows = pdot * tables.kernels(p)  # mu_(s', s)(t) per unit row s'
            phase_pair = phases[:s_max] + phases[s - 1]
            integrals[:] += np.sum(w_gl * mu_rows * np.exp(1j * phase_pair), axis=1)

        _integrate_phases(omega_of_t, _panel_edges(t_end, h), accumulate)
        return float(np.sum(np.abs(integrals) ** 2))

    coarse = run(panel_len)
    fine = run(panel_len / 2.0)
    if abs(fine - coarse) > 1e-3 * max(abs(fine), 1e-300):
        raise ResolutionError(
            f"time integration unstable: {coarse:.6g} -> {fine:.6g} under step halving"
        )
    return fine


def particles_asymptotic(
    config: BoundaryConfig,
    s: int,
    s_prime: int,
    epsilon: float,
    T: float,
    geom: CavityGeometry,
) -> float:
    """Thin-gap (one-dimensional) limit of the resonant particle number.

    Valid for r_i >> r_o - r_i, where the resonance frequencies approach
    (s + s') pi/gap (DD) and (s + s' - 1) pi/gap (mixed); the moving shell
    is read off the boundary configuration.
    """
    r_b = geom.moving_radius(config)
    d = geom.gap
    base = epsilon**2 * math.pi**2 * T**2 * r_b**2 / d**4
    if config.is_mixed:
        return base / 16.0 * (2.0 * s - 1.0) * (2.0 * s_prime - 1.0)
    return base / 4.0 * s * s_prime


def sinusoidal_spectrum(
    config: BoundaryConfig,
    l_values,
    s_values,
    motion: SinusoidalMotion,
    geom: CavityGeometry,
    s_max: int = 12,
    tol: float = DEFAULT_TOL,
) -> ParticleSpectrum:
    """Perturbative particle numbers for a grid of (l, s) modes."""
    _check_motion_geometry(config, geom, motion)
    values: dict[tuple[int, int], float] = {}
    tails: dict[str, float] = {}
    for l in l_values:
        for s in s_values:
            if motion.epsilon == 0.0:
                values[(l, s)] = 0.0
                continue
            terms = _sinusoidal_terms(config, l, s, motion, geom, s_max, tol)
            values[(l, s)] = float(np.sum(terms))
            tails[f"l={l},s={s}"] = _tail_estimate(terms)
    diagnostics = {"s_max": s_max, "tail_estimates": tails}
    return ParticleSpectrum(
        values=values, config=config, geom=geom, method="perturbative", diagnostics=diagnostics
    )
