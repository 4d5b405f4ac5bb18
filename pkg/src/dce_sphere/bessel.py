"""Spherical Bessel functions of the first and second kind, with derivatives.

Function values are delegated to :mod:`scipy.special` (cross-checked against
an independent arbitrary-precision oracle in the test suite).  First
derivatives use the downward identity

    f_l'(x) = f_{l-1}(x) - (l + 1)/x * f_l(x),

with the closed forms j_{-1}(x) = cos(x)/x and n_{-1}(x) = sin(x)/x covering
the l = 0 case.  Second derivatives follow from the radial equation

    f_l''(x) = -(2/x) f_l'(x) - (1 - l(l+1)/x^2) f_l(x).

All functions are pure and hold no state (no memoization), so they are safe
to call from any number of concurrent workers.  Arguments are restricted to
x > 0 and 0 <= l <= L_MAX; anything else raises ``ValueError``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "L_MAX",
    "BesselEval",
    "evaluate",
    "spherical_j",
    "spherical_n",
    "spherical_j_prime",
    "spherical_n_prime",
    "spherical_j_prime2",
    "spherical_n_prime2",
]

# Orders above this are outside the validated accuracy range.
L_MAX = 30


@dataclass(frozen=True)
class BesselEval:
    """Both kinds and both first derivatives at a single (l, x) point.

    Satisfies the Wronskian identity j*np - jp*n = 1/x^2.
    """

    l: int
    x: float
    j: float
    n: float
    jp: float
    np: float


def _checked(l: int, x) -> np.ndarray:
    if int(l) != l or l < 0 or l > L_MAX:
        raise ValueError(f"order l={l} outside supported range 0..{L_MAX}")
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0.0):
        raise ValueError("argument x must be positive")
    return arr


def _as_input_shape(out: np.ndarray, x) -> float | np.ndarray:
    return float(out) if np.ndim(x) == 0 else out


def spherical_j(l: int, x):
    """j_l(x), spherical Bessel function of the first kind."""
    arr = _checked(l, x)
    return _as_input_shape(special.spherical_jn(l, arr), x)


def spherical_n(l: int, x):
    """n_l(x), spherical Bessel function of the second kind."""
    arr = _checked(l, x)
    return _as_input_shape(special.spherical_yn(l, arr), x)


def spherical_j_prime(l: int, x):
    """dj_l/dx via the downward identity (j_{-1}(x) = cos(x)/x)."""
    arr = _checked(l, x)
    jm1 = np.cos(arr) / arr if l == 0 else special.spherical_jn(l - 1, arr)
    out = jm1 - (l + 1) / arr * special.spherical_jn(l, arr)
    return _as_input_shape(out, x)


def spherical_n_prime(l: int, x):
    """dn_l/dx via the downward identity (n_{-1}(x) = sin(x)/x)."""
    arr = _checked(l, x)
    nm1 = np.sin(arr) / arr if l == 0 else special.spherical_yn(l - 1, arr)
    out = nm1 - (l + 1) / arr * special.spherical_yn(l, arr)
    return _as_input_shape(out, x)


def spherical_j_prime2(l: int, x):
    """d^2 j_l/dx^2 from the radial differential equation."""
    arr = _checked(l, x)
    j = special.spherical_jn(l, arr)
    jp = np.asarray(spherical_j_prime(l, arr))
    out = -(2.0 / arr) * jp - (1.0 - l * (l + 1) / arr**2) * j
    return _as_input_shape(out, x)


def spherical_n_prime2(l: int, x):
    """d^2 n_l/dx^2 from the radial differential equation."""
    arr = _checked(l, x)
    n = special.spherical_yn(l, arr)
    npr = np.asarray(spherical_n_prime(l, arr))
    out = -(2.0 / arr) * npr - (1.0 - l * (l + 1) / arr**2) * n
    return _as_input_shape(out, x)


def evaluate(l: int, x: float) -> BesselEval:
    """Evaluate j, n and their derivatives at a single point."""
    xf = float(x)
    _checked(l, xf)
    return BesselEval(
        l=l,
        x=xf,
        j=spherical_j(l, xf),
        n=spherical_n(l, xf),
        jp=spherical_j_prime(l, xf),
        np=spherical_n_prime(l, xf),
    )
