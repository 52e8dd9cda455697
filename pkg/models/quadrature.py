# models/quadrature.py
"""Adaptive quadrature of complex, array-valued integrands.

scipy's ``quad_vec`` runs Gauss-Kronrod subdivision on real vectors, so the
complex integrand is split into stacked real and imaginary parts.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from utils.errors import QuadratureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    """Window and tolerances for every adaptive integral.

    ``truncation_radius`` of None lets the base problem pick its default
    window.
    """

    truncation_radius: Optional[float] = None
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.truncation_radius is not None and not self.truncation_radius > 0:
            raise ValueError(f"truncation_radius must be > 0, got {self.truncation_radius}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    @property
    def tail_decades(self) -> float:
        """ln(1/abs_tol): decay an integrand envelope needs before truncation."""
        return float(np.log(1.0 / self.abs_tol))


def integrate_complex(
    fun: Callable[[float], np.ndarray],
    lower: float,
    upper: float,
    quad: QuadratureSpec,
    points=None,
) -> Tuple[np.ndarray, float]:
    """Integrate a complex array-valued ``fun`` over [lower, upper].

    Returns (value, error estimate). Raises QuadratureError carrying the
    achieved estimate when subdivision does not converge.
    """
    if upper <= lower:
        sample = np.asarray(fun(float(lower)), dtype=complex)
        return np.zeros(sample.shape, dtype=complex), 0.0

    shape = []

    def stacked(z):
        value = np.asarray(fun(z), dtype=complex)
        if not shape:
            shape.append(value.shape)
        flat = value.ravel()
        return np.concatenate([flat.real, flat.imag])

    result, error, info = integrate.quad_vec(
        stacked,
        lower,
        upper,
        epsabs=quad.abs_tol,
        epsrel=quad.rel_tol,
        limit=quad.max_subdivisions,
        norm="max",
        points=points,
        full_output=True,
    )
    half = result.size // 2
    value = (result[:half] + 1j * result[half:]).reshape(shape[0])
    logger.debug("quad_vec [%.3g, %.3g]: %d evaluations, err %.2e", lower, upper, info.neval, error)
    if not info.success:
        raise QuadratureError(
            f"adaptive quadrature on [{lower:.6g}, {upper:.6g}] did not converge: {info.message}",
            estimate=value,
            error=float(error),
        )
    return value, float(error)
