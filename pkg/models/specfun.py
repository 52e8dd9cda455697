# models/specfun.py
"""Complex error functions and harmonic-oscillator eigenfunctions.

Units: hbar = 1, 2m = 1, so the oscillator is h_0 = -d^2/dx^2 + x^2/4 with
levels E_n = n + 1/2 and ground state (2 pi)^{-1/4} exp(-x^2/4).
"""

import logging

import numpy as np
from scipy import special

from utils.errors import FaddeevaRangeError

logger = logging.getLogger(__name__)

# exp(y^2 - x^2) stays below ~1e304 for y^2 - x^2 < 700
FADDEEVA_EXPONENT_LIMIT = 700.0

OSC_GROUND_PREFACTOR = (2.0 * np.pi) ** -0.25


def _unwrap(value, scalar: bool):
    return complex(value) if scalar else value


def faddeeva_w(z):
    """w(z) = exp(-z^2) erfc(-iz), vectorized over array input.

    Raises FaddeevaRangeError in the lower half plane once exp(-z^2)
    overflows, instead of handing back inf or nan.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise FaddeevaRangeError("faddeeva_w needs finite arguments")

    exponent = z.imag ** 2 - z.real ** 2
    overflow = (z.imag < 0) & (exponent > FADDEEVA_EXPONENT_LIMIT)
    if np.any(overflow):
        worst = z[overflow].ravel()[0]
        raise FaddeevaRangeError(f"w(z) overflows at z = {worst}")

    w = special.wofz(z)
    if not np.all(np.isfinite(w)):
        raise FaddeevaRangeError("w(z) returned a non-finite value")
    return _unwrap(w, scalar)


def cerf(z):
    """erf of a complex argument, erf(z) = 1 - exp(-z^2) w(iz).

    Evaluated on the right half plane only, where i*z sits in the upper half
    plane and w is bounded; the left half plane follows from oddness.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    flip = z.real < 0
    zr = np.where(flip, -z, z)
    value = 1.0 - np.exp(-zr * zr) * faddeeva_w(1j * zr)
    value = np.where(flip, -value, value)
    return _unwrap(value, scalar)


def osc_eigenfunctions(n_max: int, x) -> np.ndarray:
    """All psi_0 .. psi_{n_max} at x; shape (n_max + 1,) + shape(x).

    Normalized three-term recurrence
        psi_{n+1} = x psi_n / sqrt(n+1) - sqrt(n/(n+1)) psi_{n-1},
    which never forms the Hermite polynomial itself.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = OSC_GROUND_PREFACTOR * np.exp(-0.25 * x * x)
    if n_max >= 1:
        table[1] = x * table[0]
    for n in range(1, n_max):
        table[n + 1] = (x * table[n] - np.sqrt(n) * table[n - 1]) / np.sqrt(n + 1.0)
    return table


def osc_eigenfunction(n: int, x):
    """Normalized psi_n(x) with h_0 psi_n = (n + 1/2) psi_n."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    value = osc_eigenfunctions(n, x)[n]
    return float(value) if np.ndim(x) == 0 else value


def osc_eigenfunction_derivs(n_max: int, x) -> np.ndarray:
    """psi_n'(x) = sqrt(n) psi_{n-1}(x) - (x/2) psi_n(x) for n = 0 .. n_max."""
    x = np.asarray(x, dtype=float)
    psi = osc_eigenfunctions(n_max, x)
    deriv = -0.5 * x * psi
    if n_max >= 1:
        deriv[1:] += np.sqrt(np.arange(1, n_max + 1)).reshape((-1,) + (1,) * x.ndim) * psi[:-1]
    return deriv


def osc_eigenfunction_deriv(n: int, x):
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    value = osc_eigenfunction_derivs(n, x)[n]
    return float(value) if np.ndim(x) == 0 else value
