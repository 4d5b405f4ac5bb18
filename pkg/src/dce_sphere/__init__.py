"""Dynamical particle creation between concentric spherical shells.

A massless scalar field confined between two concentric spherical shells
supports radial modes indexed by (l, s).  When one shell moves, the modes
couple and quanta are created from the vacuum.  This package solves the
transcendental mode spectra for Dirichlet-Dirichlet and mixed
Neumann/Dirichlet boundary conditions (the moving shell always Dirichlet),
builds the normalized radial eigenfunctions and their geometry derivatives,
assembles the mode-coupling coefficients, and evaluates expected particle
numbers for sinusoidal or arbitrary sampled motion.

Natural units c = 1 throughout.
"""
from .bessel import (
    L_MAX,
    BesselEval,
    evaluate,
    spherical_j,
    spherical_j_prime,
    spherical_n,
    spherical_n_prime,
)
from .coupling import CouplingMatrix, MuCoefficient, coupling_C, coupling_matrix, mu
from .dynamics import (
    DetuningResponse,
    GeneralMotion,
    MotionProfile,
    ParticleSpectrum,
    ResolutionError,
    SinusoidalMotion,
    TruncationWarning,
    ValidityWarning,
    detuning,
    multiplicity,
    particles_asymptotic,
    particles_general,
    particles_resonant,
    particles_sinusoidal,
    phase_integral,
    sinusoidal_spectrum,
)
from .modes import (
    QuadratureConvergenceError,
    QuadratureRule,
    RadialMode,
    dmode_dr_beta,
    mode_inner_product,
    overlap_dr_beta,
    radial_mode,
    radial_modes,
)
from .spectrum import (
    BoundaryConfig,
    CavityGeometry,
    DegenerateRootError,
    ModeFrequency,
    MovingShell,
    RootSearchError,
    ShellBC,
    asymptotic_frequency,
    characteristic,
    domega_dr_beta,
    frequency_map,
    map_ordinate,
    solve_frequencies,
)

__version__ = "0.1.0"

__all__ = [
    "L_MAX",
    "BesselEval",
    "BoundaryConfig",
    "CavityGeometry",
    "CouplingMatrix",
    "DegenerateRootError",
    "DetuningResponse",
    "GeneralMotion",
    "ModeFrequency",
    "MotionProfile",
    "MovingShell",
    "MuCoefficient",
    "ParticleSpectrum",
    "QuadratureConvergenceError",
    "QuadratureRule",
    "RadialMode",
    "ResolutionError",
    "RootSearchError",
    "ShellBC",
    "SinusoidalMotion",
    "TruncationWarning",
    "ValidityWarning",
    "asymptotic_frequency",
    "characteristic",
    "coupling_C",
    "coupling_matrix",
    "detuning",
    "dmode_dr_beta",
    "domega_dr_beta",
    "evaluate",
    "frequency_map",
    "map_ordinate",
    "mode_inner_product",
    "mu",
    "multiplicity",
    "overlap_dr_beta",
    "particles_asymptotic",
    "particles_general",
    "particles_resonant",
    "particles_sinusoidal",
    "phase_integral",
    "radial_mode",
    "radial_modes",
    "sinusoidal_spectrum",
    "solve_frequencies",
    "spherical_j",
    "spherical_j_prime",
    "spherical_n",
    "spherical_n_prime",
]
