# models/base_problems.py
"""Exactly solvable base Hamiltonians h_0 = -d^2/dx^2 + V_0.

Two problems are provided, the free particle and the oscillator
V_0 = x^2/4. Each exposes its potential, propagator K_0 with the analytic
x-derivative, and the Jost pair (f_l, f_r) that builds the resolvent kernel

    G_0(x, y, E) = -f_l(min(x, y)) f_r(max(x, y)) / W,   W = f_l f_r' - f_l' f_r,

i.e. the kernel of (h_0 - E)^{-1}, positive below the spectrum.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from models.quadrature import QuadratureSpec
from models.specfun import osc_eigenfunctions
from utils.errors import SingularTimeError, SpectralBoundaryError, UnsupportedEnergyError

logger = logging.getLogger(__name__)

EPS_SING = 1e-6
OSC_ALPHA = -0.5
OSC_WRONSKIAN = -np.sqrt(2.0 * np.pi)
OSC_DEFAULT_RADIUS = 12.0
FREE_WINDOW_MARGIN = 10.0

_HALF_SQRT_PI = np.sqrt(np.pi / 2.0)


@dataclass(frozen=True)
class JostPair:
    """Solutions of h_0 f = E f decaying to the left (f_l) and right (f_r)."""

    energy: complex
    f_l: Callable
    f_r: Callable
    df_l: Callable
    df_r: Callable

    def wronskian(self, x):
        return self.f_l(x) * self.df_r(x) - self.df_l(x) * self.f_r(x)


def two_solution_green(pair: JostPair, wronskian: complex, x, y):
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    return -pair.f_l(lo) * pair.f_r(hi) / wronskian


# --- free particle -----------------------------------------------------------


def _check_free_time(t: float, eps_sing: float = EPS_SING) -> None:
    if not np.isfinite(t) or abs(t) <= eps_sing:
        raise SingularTimeError(f"free propagator is singular at t = {t}")


def free_propagator(x, y, t: float):
    """K_0 = exp(i (x-y)^2 / 4t) / sqrt(4 pi i t), principal root."""
    _check_free_time(t)
    diff = np.subtract(x, y)
    return np.exp(1j * diff * diff / (4.0 * t)) / np.sqrt(4j * np.pi * t)


def free_propagator_dx(x, y, t: float):
    return 1j * np.subtract(x, y) / (2.0 * t) * free_propagator(x, y, t)


def free_wavenumber(energy) -> complex:
    """kappa = sqrt(E) on the sheet Im kappa > 0."""
    energy = complex(energy)
    if energy.imag == 0.0 and energy.real >= 0.0:
        raise SpectralBoundaryError(f"E = {energy} lies on the continuous spectrum [0, inf)")
    kappa = np.sqrt(energy)
    if kappa.imag < 0:
        kappa = -kappa
    return complex(kappa)


def free_jost_pair(energy) -> JostPair:
    kappa = free_wavenumber(energy)
    return JostPair(
        energy=complex(energy),
        f_l=lambda z: np.exp(-1j * kappa * np.asarray(z)),
        f_r=lambda z: np.exp(1j * kappa * np.asarray(z)),
        df_l=lambda z: -1j * kappa * np.exp(-1j * kappa * np.asarray(z)),
        df_r=lambda z: 1j * kappa * np.exp(1j * kappa * np.asarray(z)),
    )


def free_green(x, y, energy):
    """G_0 = (i / 2 kappa) exp(i kappa |x - y|)."""
    kappa = free_wavenumber(energy)
    return 1j / (2.0 * kappa) * np.exp(1j * kappa * np.abs(np.subtract(x, y)))


# --- harmonic oscillator -------------------------------------------------------


def _check_osc_time(t: float, eps_sing: float = EPS_SING, allow_outside_cell: bool = False) -> None:
    if not np.isfinite(t) or abs(np.sin(t)) <= eps_sing:
        raise SingularTimeError(f"oscillator propagator is singular at t = {t} (|sin t| <= {eps_sing})")
    if not allow_outside_cell and not 0.0 < t < np.pi:
        raise SingularTimeError(f"t = {t} lies outside the branch cell (0, pi)")


def osc_propagator(x, y, t: float, eps_sing: float = EPS_SING, allow_outside_cell: bool = False):
    """Mehler kernel for h_0 = -d^2 + x^2/4."""
    _check_osc_time(t, eps_sing, allow_outside_cell)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s, c = np.sin(t), np.cos(t)
    phase = ((x * x + y * y) * c - 2.0 * x * y) / (4.0 * s)
    return np.exp(1j * phase) / np.sqrt(4j * np.pi * s)


def osc_propagator_dx(x, y, t: float, eps_sing: float = EPS_SING, allow_outside_cell: bool = False):
    x = np.asarray(x, dtype=float)
    factor = 1j * (x * np.cos(t) - np.asarray(y, dtype=float)) / (2.0 * np.sin(t))
    return factor * osc_propagator(x, y, t, eps_sing, allow_outside_cell)


def osc_jost_pair() -> JostPair:
    """f_{l,r} = sqrt(pi/2) exp(x^2/4) (1 +- erf(x/sqrt 2)) at E = -1/2.

    Written through erfcx so neither factor overflows:
    exp(x^2/4)(1 + erf(x/sqrt 2)) = erfcx(-x/sqrt 2) exp(-x^2/4).
    """

    def f_l(z):
        z = np.asarray(z, dtype=float)
        return _HALF_SQRT_PI * special.erfcx(-z / np.sqrt(2.0)) * np.exp(-0.25 * z * z)

    def f_r(z):
        z = np.asarray(z, dtype=float)
        return _HALF_SQRT_PI * special.erfcx(z / np.sqrt(2.0)) * np.exp(-0.25 * z * z)

    def df_l(z):
        z = np.asarray(z, dtype=float)
        return 0.5 * z * f_l(z) + np.exp(-0.25 * z * z)

    def df_r(z):
        z = np.asarray(z, dtype=float)
        return 0.5 * z * f_r(z) - np.exp(-0.25 * z * z)

    return JostPair(energy=complex(OSC_ALPHA), f_l=f_l, f_r=f_r, df_l=df_l, df_r=df_r)


def osc_green_neg_half(x, y):
    """Resolvent kernel of h_0 at E = -1/2; G(0, 0) = sqrt(pi/8)."""
    return two_solution_green(osc_jost_pair(), OSC_WRONSKIAN, x, y)


def osc_green_spectral(x, y, energy: float, n_terms: int):
    """Partial eigenfunction sum of the oscillator resolvent.

    Sum over m < n_terms of psi_m(x) psi_m(y) / (E_m - E). Converges only like
    1/n_terms pointwise off the diagonal.
    """
    levels = np.arange(n_terms) + 0.5
    if np.any(np.isclose(levels, energy, rtol=0.0, atol=1e-14)):
        raise SpectralBoundaryError(f"E = {energy} is an oscillator level")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    psi_x = osc_eigenfunctions(n_terms - 1, x)
    psi_y = osc_eigenfunctions(n_terms - 1, y)
    weights = (1.0 / (levels - energy)).reshape((-1,) + (1,) * x.ndim)
    return np.sum(weights * psi_x * psi_y, axis=0)


def osc_green_spectral_errors(x: float, y: float, n_terms: Sequence[int]) -> np.ndarray:
    """|partial sum - G| at E = -1/2 for every truncation in ``n_terms``.

    The errors oscillate in the truncation, so compare maxima over windows
    rather than single truncations.
    """
    n_terms = np.asarray(n_terms, dtype=int)
    if n_terms.size == 0 or n_terms.min() < 1:
        raise ValueError("truncations must be >= 1")
    top = int(n_terms.max())
    psi = osc_eigenfunctions(top - 1, np.array([float(x), float(y)]))
    partial = np.cumsum(psi[:, 0] * psi[:, 1] / (np.arange(top) + 1.0))
    return np.abs(partial[n_terms - 1] - osc_green_neg_half(float(x), float(y)))


# --- problem objects -----------------------------------------------------------


class BaseProblem(ABC):
    """Exactly solvable real Hamiltonian h_0."""

    kind: str

    @abstractmethod
    def potential(self, x):
        ...

    @abstractmethod
    def propagator(self, x, y, t: float):
        ...

    @abstractmethod
    def propagator_dx(self, x, y, t: float):
        ...

    @abstractmethod
    def green(self, x, y, energy):
        ...

    @abstractmethod
    def jost_pair(self, energy) -> JostPair:
        ...

    @abstractmethod
    def check_time(self, t: float) -> None:
        ...

    @abstractmethod
    def integration_window(self, xs, y: float, t: float, energy, quad: QuadratureSpec) -> Tuple[float, float]:
        """Window [lo, hi] containing y outside which the Jost factors are negligible."""

    def energy(self, n: int) -> Optional[float]:
        return None

    def wronskian(self, energy) -> complex:
        pair = self.jost_pair(energy)
        return complex(pair.wronskian(0.0))


@dataclass(frozen=True)
class FreeParticle(BaseProblem):
    kind = "Free"

    def potential(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def propagator(self, x, y, t):
        return free_propagator(x, y, t)

    def propagator_dx(self, x, y, t):
        return free_propagator_dx(x, y, t)

    def green(self, x, y, energy):
        return free_green(x, y, energy)

    def jost_pair(self, energy):
        return free_jost_pair(energy)

    def wronskian(self, energy):
        return 2j * free_wavenumber(energy)

    def check_time(self, t):
        _check_free_time(t)

    def integration_window(self, xs, y, t, energy, quad):
        decay = free_wavenumber(energy).imag
        if quad.truncation_radius is not None:
            radius = quad.truncation_radius
        else:
            reach = max(float(np.max(np.abs(xs))), abs(y))
            radius = reach + FREE_WINDOW_MARGIN + 4.0 * np.sqrt(abs(t))
        half_width = quad.tail_decades / decay
        return min(-radius, y - half_width), max(radius, y + half_width)


@dataclass(frozen=True)
class HarmonicOscillator(BaseProblem):
    eps_sing: float = EPS_SING
    allow_outside_cell: bool = False

    kind = "Oscillator"

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return 0.25 * x * x

    def energy(self, n):
        return n + 0.5

    def propagator(self, x, y, t):
        return osc_propagator(x, y, t, self.eps_sing, self.allow_outside_cell)

    def propagator_dx(self, x, y, t):
        return osc_propagator_dx(x, y, t, self.eps_sing, self.allow_outside_cell)

    def _require_alpha(self, energy):
        if complex(energy) != OSC_ALPHA:
            raise UnsupportedEnergyError(f"oscillator Green function is only built at E = -1/2, got {energy}")

    def green(self, x, y, energy=OSC_ALPHA):
        self._require_alpha(energy)
        return osc_green_neg_half(x, y)

    def jost_pair(self, energy=OSC_ALPHA):
        self._require_alpha(energy)
        return osc_jost_pair()

    def wronskian(self, energy=OSC_ALPHA):
        self._require_alpha(energy)
        return complex(OSC_WRONSKIAN)

    def check_time(self, t):
        _check_osc_time(t, self.eps_sing, self.allow_outside_cell)
        if self.allow_outside_cell and not 0.0 < t < np.pi:
            logger.warning("oscillator kernel evaluated at t = %.6g, outside (0, pi); no Maslov phase applied", t)

    def integration_window(self, xs, y, t, energy, quad):
        radius = quad.truncation_radius if quad.truncation_radius is not None else OSC_DEFAULT_RADIUS
        # exp(-z^2/4) decay of the Jost factors measured from the split point
        margin = 2.0 * np.sqrt(quad.tail_decades)
        return min(-radius, y - margin), max(radius, y + margin)
