# models/susy.py
"""First-order SUSY (Darboux) transformations of the base problems.

A transformation function u solves h_0 u = alpha u. It defines

    L = -u'/u + d/dx,    L^t = -u'/u - d/dx,
    V_c = V_0 - 2 (log u)'' = V_0 - 2 (u''/u - (u'/u)^2),

so that L h_0 = h_c L, L^t L = h_0 - alpha and L L^t = h_c - alpha. With a
real alpha below the base spectrum (case II) h_c gains the level alpha with
eigenfunction N_alpha / u.

All u-derivatives are analytic. Ratios u'/u and u''/u are evaluated in forms
that stay finite where u itself overflows.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional

import numpy as np
from scipy import special

from models.base_problems import OSC_ALPHA, BaseProblem, FreeParticle, HarmonicOscillator
from models.quadrature import QuadratureSpec, integrate_complex
from models.specfun import osc_eigenfunction_derivs, osc_eigenfunctions
from utils.errors import (
    DegenerateNormalizationError,
    DivergenceError,
    NearZeroError,
    NoBoundStateError,
    RealZeroRiskError,
)

logger = logging.getLogger(__name__)

NEAR_ZERO_THRESHOLD = 1e-6
DEFAULT_PAIRING_RADIUS = 15.0

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


class CaseTag(str, Enum):
    CASE_I = "CaseI"  # complex alpha, isospectral partner
    CASE_II = "CaseII"  # real alpha below the spectrum, one added level


class Factorization(ABC):
    """Transformation function u of a base problem at factorization constant alpha."""

    base: BaseProblem
    alpha: complex
    case_tag: CaseTag

    @abstractmethod
    def u(self, x):
        ...

    @abstractmethod
    def du(self, x):
        ...

    @abstractmethod
    def d2u(self, x):
        ...

    @abstractmethod
    def log_derivative(self, x):
        """u'/u."""

    @abstractmethod
    def second_ratio(self, x):
        """u''/u."""

    @abstractmethod
    def reciprocal(self, x):
        """1/u."""

    @abstractmethod
    def vanishing_margin(self, x):
        """|u| scaled by its growth envelope; at most 1, near 0 only if u nearly vanishes."""

    @property
    @abstractmethod
    def n_alpha(self) -> complex:
        ...

    @property
    @abstractmethod
    def asymptotic_shift(self) -> float:
        """Limit of V_c - V_0 as |x| grows."""

    @property
    @abstractmethod
    def params(self) -> Dict[str, complex]:
        ...

    def check_nonvanishing(self, x, threshold: float = NEAR_ZERO_THRESHOLD) -> None:
        margin = np.asarray(self.vanishing_margin(x))
        if margin.size and np.min(margin) <= threshold:
            where = np.asarray(x, dtype=float).ravel()[int(np.argmin(margin))] if margin.ndim else float(x)
            raise NearZeroError(f"|u| nearly vanishes at x = {where:.6g} (scaled margin {np.min(margin):.3e})")

    def _validate_case(self) -> None:
        alpha = complex(self.alpha)
        if self.case_tag is CaseTag.CASE_I and alpha.imag == 0.0:
            raise ValueError("case I transformations need a complex factorization constant")
        if self.case_tag is CaseTag.CASE_II:
            floor = self.base.energy(0)
            floor = 0.0 if floor is None else floor
            if alpha.imag != 0.0 or not alpha.real < floor:
                raise ValueError(f"case II needs real alpha below the spectrum floor {floor}, got {alpha}")


@dataclass(frozen=True)
class OscillatorTransform(Factorization):
    """u = exp(x^2/4) (C + erf(x / sqrt 2)) at alpha = -1/2."""

    C: complex
    base: BaseProblem = field(default_factory=HarmonicOscillator)
    alpha: float = OSC_ALPHA
    case_tag: CaseTag = CaseTag.CASE_II

    def __post_init__(self):
        self._validate_case()

    def _shifted_erf(self, x):
        x = np.asarray(x, dtype=float)
        return self.C + special.erf(x / np.sqrt(2.0))

    def _rho(self, x):
        x = np.asarray(x, dtype=float)
        return _SQRT_2_OVER_PI * np.exp(-0.5 * x * x) / self._shifted_erf(x)

    def u(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(0.25 * x * x) * self._shifted_erf(x)

    def du(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * self.u(x) + _SQRT_2_OVER_PI * np.exp(-0.25 * x * x)

    def d2u(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.u(x) + 0.5 * x * self.du(x) - 0.5 * x * _SQRT_2_OVER_PI * np.exp(-0.25 * x * x)

    def log_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x + self._rho(x)

    def second_ratio(self, x):
        x = np.asarray(x, dtype=float)
        rho = self._rho(x)
        return 0.5 + 0.5 * x * (0.5 * x + rho) - 0.5 * x * rho

    def reciprocal(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.25 * x * x) / self._shifted_erf(x)

    def vanishing_margin(self, x):
        return np.abs(self._shifted_erf(x)) / (abs(self.C) + 1.0)

    @property
    def n_alpha(self) -> complex:
        return complex((2.0 * np.pi) ** -0.25 * np.sqrt(complex(self.C) ** 2 - 1.0))

    @property
    def asymptotic_shift(self) -> float:
        return -1.0

    @property
    def params(self):
        return {"C": complex(self.C)}


@dataclass(frozen=True)
class SolitonTransform(Factorization):
    """u = cosh(a x + c) of the free particle at alpha = -a^2."""

    a: float
    b: float
    c: complex
    base: BaseProblem = field(default_factory=FreeParticle)
    case_tag: CaseTag = CaseTag.CASE_II

    def __post_init__(self):
        self._validate_case()

    @property
    def alpha(self) -> float:
        return -self.a * self.a

    def _arg(self, x):
        return self.a * np.asarray(x, dtype=float) + self.c

    def u(self, x):
        return np.cosh(self._arg(x))

    def du(self, x):
        return self.a * np.sinh(self._arg(x))

    def d2u(self, x):
        return self.a * self.a * np.cosh(self._arg(x))

    def log_derivative(self, x):
        return self.a * np.tanh(self._arg(x))

    def second_ratio(self, x):
        return np.full(np.shape(x), self.a * self.a, dtype=complex)

    def reciprocal(self, x):
        return 1.0 / np.cosh(self._arg(x))

    def vanishing_margin(self, x):
        # |cosh(w + i theta)|^2 = sinh(w)^2 + cos(theta)^2, scaled by cosh(w)^2
        w = self.a * np.asarray(x, dtype=float) + complex(self.c).real
        theta = complex(self.c).imag
        return np.sqrt(np.tanh(w) ** 2 + (np.cos(theta) / np.cosh(w)) ** 2)

    @property
    def n_alpha(self) -> complex:
        return complex(np.sqrt(self.a / 2.0))

    @property
    def asymptotic_shift(self) -> float:
        return 0.0

    @property
    def params(self):
        return {"a": self.a, "b": self.b, "c": complex(self.c)}


def make_oscillator_transform(C) -> OscillatorTransform:
    C = complex(C)
    if C.imag == 0.0:
        raise RealZeroRiskError(f"Im C must be nonzero, got C = {C}; u may vanish on the real line")
    return OscillatorTransform(C=C)


def make_soliton_transform(a: float, b: float) -> SolitonTransform:
    """Soliton transformation with c = arctanh((b^2 - a^2) / (2 i a b))."""
    a, b = float(a), float(b)
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    if b == 0.0:
        raise ValueError("b must be nonzero")
    c = complex(np.arctanh((b * b - a * a) / (2j * a * b)))
    if c.imag == 0.0:
        raise RealZeroRiskError(f"Im c = 0 for a = {a}, b = {b}; cosh(ax + c) vanishes on the real line")
    return SolitonTransform(a=a, b=b, c=c)


# --- operators ---------------------------------------------------------------


def partner_potential(f: Factorization, x):
    f.check_nonvanishing(x)
    ratio = f.log_derivative(x)
    return f.base.potential(x) - 2.0 * (f.second_ratio(x) - ratio * ratio)


def apply_L(f: Factorization, g, dg, x):
    """(L g)(x) = -(u'/u) g + g'."""
    f.check_nonvanishing(x)
    return -f.log_derivative(x) * g + dg


def apply_Lt(f: Factorization, g, dg, x):
    """(L^t g)(x) = -(u'/u) g - g'."""
    f.check_nonvanishing(x)
    return -f.log_derivative(x) * g - dg


def oscillator_partner_closed(C, x):
    """x^2/4 - 1 + 2x exp(-x^2/2)/Q_1 + 2 exp(-x^2)/Q_1^2, Q_1 = sqrt(pi/2)(C + erf(x/sqrt 2))."""
    x = np.asarray(x, dtype=float)
    q1 = np.sqrt(np.pi / 2.0) * (complex(C) + special.erf(x / np.sqrt(2.0)))
    return 0.25 * x * x - 1.0 + 2.0 * x * np.exp(-0.5 * x * x) / q1 + 2.0 * np.exp(-x * x) / (q1 * q1)


def soliton_partner_closed(a: float, c: complex, x):
    return -2.0 * a * a / np.cosh(a * np.asarray(x, dtype=float) + c) ** 2


def transformed_eigenfunctions(f: Factorization, n_max: int, x) -> np.ndarray:
    """phi_n = (E_n - alpha)^{-1/2} L psi_n for n = 0 .. n_max."""
    if not isinstance(f.base, HarmonicOscillator):
        raise ValueError("transformed eigenfunctions need the oscillator base")
    x = np.asarray(x, dtype=float)
    gaps = np.arange(n_max + 1) + 0.5 - complex(f.alpha)
    if np.any(gaps == 0):
        raise DegenerateNormalizationError("E_n coincides with the factorization constant")
    norms = (1.0 / np.sqrt(gaps)).reshape((-1,) + (1,) * x.ndim)
    psi = osc_eigenfunctions(n_max, x)
    dpsi = osc_eigenfunction_derivs(n_max, x)
    return norms * apply_L(f, psi, dpsi, x)


def transformed_eigenfunction(f: Factorization, n: int, x):
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return transformed_eigenfunctions(f, n, x)[n]


def bound_state(f: Factorization, x):
    """phi_alpha = N_alpha / u, the added level of a case II partner."""
    if f.case_tag is not CaseTag.CASE_II:
        raise NoBoundStateError("case I partners have no added bound state")
    return f.n_alpha * f.reciprocal(x)


def bilinear_pairing(f: Callable, g: Callable, quad: Optional[QuadratureSpec] = None):
    """Integral of f(x) g(x) over the window, without complex conjugation.

    f and g may return arrays; the pairing is taken elementwise (broadcast).
    """
    quad = quad or QuadratureSpec()
    radius = quad.truncation_radius or DEFAULT_PAIRING_RADIUS
    value, _ = integrate_complex(lambda z: f(z) * g(z), -radius, radius, quad)
    return value


def bilinear_norm(g: Callable, quad: Optional[QuadratureSpec] = None) -> complex:
    """Integral of g(x)^2; no conjugation, so i*psi_0 has norm -1."""
    quad = quad or QuadratureSpec()
    radius = quad.truncation_radius or DEFAULT_PAIRING_RADIUS
    value = complex(bilinear_pairing(g, g, quad))
    edge = max(abs(complex(g(-radius))) ** 2, abs(complex(g(radius))) ** 2)
    if edge > max(quad.abs_tol, quad.rel_tol * abs(value)):
        raise DivergenceError(f"|g|^2 = {edge:.3e} at the window edge |x| = {radius}; tail not negligible")
    return value


def normalization_from_quadrature(f: Factorization, quad: Optional[QuadratureSpec] = None) -> complex:
    """(integral of u^-2)^{-1/2}, with the sign picked to match f.n_alpha."""
    integral = complex(bilinear_norm(f.reciprocal, quad))
    root = complex(1.0 / np.sqrt(integral))
    return root if abs(root - f.n_alpha) <= abs(root + f.n_alpha) else -root


# --- partner model -------------------------------------------------------------


@dataclass(frozen=True)
class PartnerModel:
    """The partner Hamiltonian h_c; ``fact`` of None is the identity (h_c = h_0)."""

    base: BaseProblem
    fact: Optional[Factorization] = None

    @classmethod
    def from_factorization(cls, fact: Factorization) -> "PartnerModel":
        return cls(base=fact.base, fact=fact)

    @classmethod
    def untransformed(cls, base: BaseProblem) -> "PartnerModel":
        return cls(base=base)

    @property
    def alpha(self) -> Optional[complex]:
        return None if self.fact is None else self.fact.alpha

    @property
    def has_bound_state(self) -> bool:
        return self.fact is not None and self.fact.case_tag is CaseTag.CASE_II

    def potential(self, x):
        if self.fact is None:
            return self.base.potential(x).astype(complex)
        return partner_potential(self.fact, x)

    def bound_state(self, x):
        if self.fact is None:
            raise NoBoundStateError("untransformed model has no added bound state")
        return bound_state(self.fact, x)

    def eigenfunctions(self, n_max: int, x) -> np.ndarray:
        if self.fact is None:
            return osc_eigenfunctions(n_max, x).astype(complex)
        return transformed_eigenfunctions(self.fact, n_max, x)

    def eigenfunction(self, n: int, x):
        return self.eigenfunctions(n, x)[n]

    def energy(self, n: int) -> Optional[float]:
        return self.base.energy(n)
