# models/kernel.py
"""Propagators of the partner Hamiltonian h_c.

Four routes to K_c(x, y, t):

* TheoremQuad: the transformation theorem
      K_c = L_x L_y int K_0(x, z, t) G_0(z, y, alpha) dz  (+ bound-state term)
  with the z-integral split at z = y, L_y applied analytically to the Jost
  prefactors and L_x applied by differentiating K_0 under the integral.
* ClosedForm: the soliton kernel in terms of erf, and the oscillator kernel
  as two semi-infinite integrals.
* SpectralSum: the truncated bilinear eigenfunction expansion.
* OracleCN: Crank-Nicolson time stepping, see models.oracle.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy import integrate, special

from models.base_problems import (
    OSC_DEFAULT_RADIUS,
    JostPair,
    _check_free_time,
    _check_osc_time,
    free_propagator,
    osc_propagator,
    osc_propagator_dx,
)
from models.grid import Grid1D
from models.quadrature import QuadratureSpec, integrate_complex
from models.specfun import cerf
from models.susy import OscillatorTransform, PartnerModel, SolitonTransform, make_oscillator_transform
from utils.errors import DomainTooSmallError, QuadratureError

logger = logging.getLogger(__name__)

__all__ = [
    "KernelEval",
    "Method",
    "QuadratureSpec",
    "theorem_kernel",
    "soliton_kernel_closed",
    "oscillator_kernel_closed",
    "spectral_kernel",
    "propagate_state",
]

ROW_BLOCK = 256
TRUNCATION_SLACK = 10.0
# columns of the kernel matrix are skipped where |phi_0| is this far below abs_tol * max|phi_0|
SUPPORT_CUTOFF = 1e-3


class Method(str, Enum):
    THEOREM_QUAD = "TheoremQuad"
    CLOSED_FORM = "ClosedForm"
    SPECTRAL_SUM = "SpectralSum"
    ORACLE_CN = "OracleCN"


@dataclass(frozen=True)
class KernelEval:
    """Kernel value(s) at one y for one or more x, with provenance.

    ``truncated`` marks partial spectral sums, which converge only in the
    distributional sense for real t.
    """

    value: Union[complex, np.ndarray]
    err_estimate: float
    method: Method
    truncated: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.err_estimate) and self.err_estimate >= 0):
            raise ValueError(f"err_estimate must be finite and >= 0, got {self.err_estimate}")


def _scalar_or_array(value, like):
    return complex(np.asarray(value).ravel()[0]) if np.ndim(like) == 0 else value


# --- theorem ---------------------------------------------------------------------


def split_boundary_terms(pair: JostPair, lx_k0_at_y, y: float) -> Tuple[np.ndarray, np.ndarray]:
    """Terms produced by d/dy hitting the moving split point z = y.

    The left half contributes +f_r(y) f_l(y) L_x K_0(x, y), the right half
    -f_l(y) f_r(y) L_x K_0(x, y); continuity of G_0 at z = y makes them
    cancel.
    """
    left = pair.f_r(y) * pair.f_l(y) * lx_k0_at_y
    right = -(pair.f_l(y) * pair.f_r(y)) * lx_k0_at_y
    return left, right


def _check_truncation(pair: JostPair, lower: float, upper: float, y: float, quad: QuadratureSpec) -> None:
    limit = TRUNCATION_SLACK * quad.abs_tol
    left = abs(complex(pair.f_l(lower))) / abs(complex(pair.f_l(y)))
    right = abs(complex(pair.f_r(upper))) / abs(complex(pair.f_r(y)))
    if left > limit or right > limit:
        raise QuadratureError(
            f"truncation window [{lower:.4g}, {upper:.4g}] too narrow at y = {y:.4g}: "
            f"edge ratios {left:.2e}, {right:.2e}"
        )


def _theorem_column(pm: PartnerModel, xs: np.ndarray, y: float, t: float, quad: QuadratureSpec):
    base, fact = pm.base, pm.fact
    base.check_time(t)
    if fact is None:
        return base.propagator(xs, y, t), 0.0

    pair = base.jost_pair(fact.alpha)
    wronskian = base.wronskian(fact.alpha)
    lower, upper = base.integration_window(xs, y, t, fact.alpha, quad)
    _check_truncation(pair, lower, upper, y, quad)

    def weighted(jost):
        def integrand(z):
            weight = jost(z)
            return np.stack([base.propagator(xs, z, t) * weight, base.propagator_dx(xs, z, t) * weight])

        return integrand

    (p_left, dp_left), err_left = integrate_complex(weighted(pair.f_l), lower, y, quad)
    (p_right, dp_right), err_right = integrate_complex(weighted(pair.f_r), y, upper, quad)

    ratio_x = fact.log_derivative(xs)
    lx_left = dp_left - ratio_x * p_left
    lx_right = dp_right - ratio_x * p_right

    ratio_y = fact.log_derivative(y)
    ly_f_r = pair.df_r(y) - ratio_y * pair.f_r(y)
    ly_f_l = pair.df_l(y) - ratio_y * pair.f_l(y)

    lx_k0 = base.propagator_dx(xs, y, t) - ratio_x * base.propagator(xs, y, t)
    boundary_left, boundary_right = split_boundary_terms(pair, lx_k0, y)

    k_l = -(ly_f_r * lx_left + ly_f_l * lx_right + boundary_left + boundary_right) / wronskian
    scale = (1.0 + float(np.max(np.abs(ratio_x)))) / abs(wronskian)
    err = scale * (abs(ly_f_r) * err_left + abs(ly_f_l) * err_right)

    if pm.has_bound_state:
        k_l = k_l + pm.bound_state(xs) * pm.bound_state(y) * np.exp(-1j * fact.alpha * t)
    return k_l, float(err)


def theorem_kernel(pm: PartnerModel, x, y: float, t: float, quad: Optional[QuadratureSpec] = None) -> KernelEval:
    """K_c(x, y, t) through the transformation theorem.

    ``x`` may be an array; all x share one quadrature pass per half-line.
    """
    quad = quad or QuadratureSpec()
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    value, err = _theorem_column(pm, xs, float(y), t, quad)
    return KernelEval(_scalar_or_array(value, x), err, Method.THEOREM_QUAD)


def theorem_kernel_matrix(pm, xs, ys, t, quad=None, threads: int = 1) -> Tuple[np.ndarray, float]:
    """K[i, j] = K_c(xs[i], ys[j], t); y columns run in parallel threads."""
    quad = quad or QuadratureSpec()
    xs = np.asarray(xs, dtype=float)
    columns = Parallel(n_jobs=threads, prefer="threads")(
        delayed(_theorem_column)(pm, xs, float(y), t, quad) for y in ys
    )
    matrix = np.stack([column for column, _ in columns], axis=1)
    return matrix, max((err for _, err in columns), default=0.0)


# --- closed forms -------------------------------------------------------------------


def soliton_kernel_closed(a: float, c: complex, x, y, t: float) -> KernelEval:
    """K_c = K_0 + a e^{i a^2 t} / (4 u(x) u(y)) [erf_+ + erf_-],
    erf_+- = erf(a sqrt(it) +- (x - y) / (2 sqrt(it))), u = cosh(a x + c)."""
    _check_free_time(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    root = np.sqrt(1j * t)
    shift = (x - y) / (2.0 * root)
    bracket = cerf(a * root + shift) + cerf(a * root - shift)
    correction = a * np.exp(1j * a * a * t) / (4.0 * np.cosh(a * x + c) * np.cosh(a * y + c)) * bracket
    value = free_propagator(x, y, t) + correction
    err = 1e-13 * float(np.max(np.abs(bracket))) * abs(a)
    return KernelEval(_scalar_or_array(value, x + y), err, Method.CLOSED_FORM)


def _oscillator_closed_column(C, xs, y, t, quad, literal_display):
    fact = make_oscillator_transform(C)
    radius = quad.truncation_radius if quad.truncation_radius is not None else OSC_DEFAULT_RADIUS
    margin = 2.0 * np.sqrt(quad.tail_decades) + 2.0
    lower, upper = min(-radius, y - margin), max(radius, y + margin)

    def rising(z):  # exp(z^2/4) (1 + erf(z/sqrt 2))
        return special.erfcx(-z / np.sqrt(2.0)) * np.exp(-0.25 * z * z)

    def falling(z):  # exp(z^2/4) (1 - erf(z/sqrt 2))
        return special.erfcx(z / np.sqrt(2.0)) * np.exp(-0.25 * z * z)

    def weighted(weight):
        def integrand(z):
            w = weight(z)
            return np.stack([osc_propagator(xs, z, t) * w, osc_propagator_dx(xs, z, t) * w])

        return integrand

    (j_plus, dj_plus), err_plus = integrate_complex(weighted(rising), lower, y, quad)
    (j_minus, dj_minus), err_minus = integrate_complex(weighted(falling), y, upper, quad)

    ratio = fact.log_derivative(xs)
    inv_u_y = fact.reciprocal(y)
    prefactor = np.sqrt(np.pi / 2.0) if literal_display else 0.5
    k_l = prefactor * inv_u_y * (
        -(fact.C + 1.0) * (dj_plus - ratio * j_plus) + (fact.C - 1.0) * (dj_minus - ratio * j_minus)
    )
    bound = fact.n_alpha ** 2 * fact.reciprocal(xs) * inv_u_y * np.exp(0.5j * t)
    scale = prefactor * abs(inv_u_y) * (abs(fact.C) + 1.0) * (1.0 + float(np.max(np.abs(ratio))))
    return k_l + bound, float(scale * (err_plus + err_minus)), k_l


def oscillator_kernel_closed(
    C,
    x,
    y: float,
    t: float,
    quad: Optional[QuadratureSpec] = None,
    literal_display: bool = False,
) -> KernelEval:
    """Oscillator partner kernel from its two semi-infinite integrals.

        K_c = (1 / 2u(y)) [-(C+1) L_x int_{-inf}^{y} K_0 e^{z^2/4}(1 + erf(z/sqrt 2)) dz
                           +(C-1) L_x int_{y}^{inf} K_0 e^{z^2/4}(1 - erf(z/sqrt 2)) dz]
              + phi(x) phi(y) e^{it/2}

    ``literal_display`` swaps the 1/2 for sqrt(pi/2), the prefactor of the
    commonly quoted display, which leaves out the Jost-pair Wronskian.
    """
    quad = quad or QuadratureSpec()
    _check_osc_time(t)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    value, err, _ = _oscillator_closed_column(complex(C), xs, float(y), t, quad, literal_display)
    return KernelEval(_scalar_or_array(value, x), err, Method.CLOSED_FORM)


def oscillator_display_ratio(C, x, y: float, t: float, quad: Optional[QuadratureSpec] = None) -> complex:
    """Ratio of the literal display's non-bound part to the derived one (sqrt(2 pi) expected)."""
    quad = quad or QuadratureSpec()
    _check_osc_time(t)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    _, _, literal = _oscillator_closed_column(complex(C), xs, float(y), t, quad, True)
    _, _, derived = _oscillator_closed_column(complex(C), xs, float(y), t, quad, False)
    return complex(np.mean(literal / derived))


def closed_form_matrix(pm: PartnerModel, xs, ys, t, quad=None, threads: int = 1) -> Tuple[np.ndarray, float]:
    quad = quad or QuadratureSpec()
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    fact = pm.fact
    if isinstance(fact, OscillatorTransform):
        _check_osc_time(t)
        columns = Parallel(n_jobs=threads, prefer="threads")(
            delayed(_oscillator_closed_column)(fact.C, xs, float(y), t, quad, False) for y in ys
        )
        matrix = np.stack([column for column, _, _ in columns], axis=1)
        return matrix, max((err for _, err, _ in columns), default=0.0)
    if isinstance(fact, SolitonTransform):
        result = soliton_kernel_closed(fact.a, fact.c, xs[:, None], ys[None, :], t)
        return np.asarray(result.value), result.err_estimate
    if fact is None:
        pm.base.check_time(t)
        return pm.base.propagator(xs[:, None], ys[None, :], t), 0.0
    raise NotImplementedError(f"no closed-form kernel for {type(fact).__name__}")


def closed_form_kernel(pm: PartnerModel, x, y: float, t: float, quad=None) -> KernelEval:
    fact = pm.fact
    if isinstance(fact, OscillatorTransform):
        return oscillator_kernel_closed(fact.C, x, y, t, quad)
    if isinstance(fact, SolitonTransform):
        return soliton_kernel_closed(fact.a, fact.c, x, y, t)
    matrix, err = closed_form_matrix(pm, np.atleast_1d(x), [y], t, quad)
    return KernelEval(_scalar_or_array(matrix[:, 0], x), err, Method.CLOSED_FORM)


def kernel_matrix(source, pm: PartnerModel, xs, ys, t, quad=None, threads: int = 1, n_terms: int = 64):
    """K[i, j] = K_c(xs[i], ys[j], t) from one kernel source, with its error estimate."""
    source = Method(source)
    if source is Method.THEOREM_QUAD:
        return theorem_kernel_matrix(pm, xs, ys, t, quad, threads)
    if source is Method.CLOSED_FORM:
        return closed_form_matrix(pm, xs, ys, t, quad, threads)
    if source is Method.SPECTRAL_SUM:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return np.asarray(spectral_kernel(pm, n_terms, xs[:, None], ys[None, :], t).value), 0.0
    raise ValueError(f"{source.value} has no kernel matrix")


# --- spectral sums -------------------------------------------------------------------


def _require_discrete(pm: PartnerModel) -> None:
    if pm.base.energy(0) is None:
        raise ValueError("spectral sums need a base problem with a discrete spectrum")


def spectral_kernel(pm: PartnerModel, n_terms: int, x, y, t: float) -> KernelEval:
    """Partial sum over n < n_terms of phi_n(x) phi_n(y) e^{-i E_n t}, plus the bound-state term."""
    _require_discrete(pm)
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    phases = np.exp(-1j * (np.arange(n_terms) + 0.5) * t).reshape((-1,) + (1,) * x.ndim)
    value = np.sum(phases * pm.eigenfunctions(n_terms - 1, x) * pm.eigenfunctions(n_terms - 1, y), axis=0)
    if pm.has_bound_state:
        value = value + pm.bound_state(x) * pm.bound_state(y) * np.exp(-1j * pm.alpha * t)
    return KernelEval(_scalar_or_array(value, x), 0.0, Method.SPECTRAL_SUM, truncated=True)


def expansion_coefficients(pm: PartnerModel, phi, grid: Grid1D, n_terms: int):
    """Bilinear coefficients c_n = int phi_n phi dx (n < n_terms) and c_alpha (None without a bound state)."""
    _require_discrete(pm)
    grid.check_samples(phi)
    xs = grid.points
    coefficients = integrate.simpson(pm.eigenfunctions(n_terms - 1, xs) * phi, x=xs, axis=-1)
    bound = None
    if pm.has_bound_state:
        bound = complex(integrate.simpson(pm.bound_state(xs) * phi, x=xs))
    return coefficients, bound


# --- state propagation ---------------------------------------------------------------


def tail_mass(phi, grid: Grid1D) -> float:
    band = max(2, grid.n_points // 50)
    edges = np.concatenate([phi[:band], phi[-band:]])
    return float(grid.spacing * np.sum(np.abs(edges) ** 2))


def propagate_state(
    kernel_source,
    pm: PartnerModel,
    phi0,
    grid: Grid1D,
    t: float,
    quad: Optional[QuadratureSpec] = None,
    n_terms: int = 64,
    threads: int = 1,
) -> np.ndarray:
    """Phi(x, t) = int K_c(x, y, t) phi_0(y) dy on the grid of phi_0.

    The y-integral is Simpson's rule over the grid samples; phi_0 has to be
    negligible at the grid edges.
    """
    quad = quad or QuadratureSpec()
    source = Method(kernel_source)
    phi0 = np.asarray(phi0, dtype=complex)
    grid.check_samples(phi0)
    mass = tail_mass(phi0, grid)
    if mass > quad.abs_tol:
        raise DomainTooSmallError(f"initial state has tail mass {mass:.2e} at the grid edges")
    xs = grid.points

    if source is Method.SPECTRAL_SUM:
        coefficients, bound = expansion_coefficients(pm, phi0, grid, n_terms)
        phases = np.exp(-1j * (np.arange(n_terms) + 0.5) * t)
        state = (coefficients * phases) @ pm.eigenfunctions(n_terms - 1, xs)
        if bound is not None:
            state = state + bound * np.exp(-1j * pm.alpha * t) * pm.bound_state(xs)
        return state

    support = np.abs(phi0) > SUPPORT_CUTOFF * quad.abs_tol * np.max(np.abs(phi0))
    ys, weights = xs[support], phi0[support]
    logger.debug("propagating %s on %d x %d kernel samples", source.value, xs.size, ys.size)

    if source is Method.THEOREM_QUAD:
        matrix, _ = theorem_kernel_matrix(pm, xs, ys, t, quad, threads)
        return _integrate_rows(matrix, weights, xs, support)
    if source is Method.CLOSED_FORM:
        if isinstance(pm.fact, OscillatorTransform):
            matrix, _ = closed_form_matrix(pm, xs, ys, t, quad, threads)
            return _integrate_rows(matrix, weights, xs, support)
        state = np.empty(xs.size, dtype=complex)
        for start in range(0, xs.size, ROW_BLOCK):
            rows = slice(start, start + ROW_BLOCK)
            block, _ = closed_form_matrix(pm, xs[rows], ys, t, quad)
            state[rows] = _integrate_rows(block, weights, xs, support)
        return state
    raise ValueError(f"{source.value} is not a kernel source; use models.oracle.cn_evolve")


def _integrate_rows(matrix, weights, xs, support):
    full = np.zeros((matrix.shape[0], xs.size), dtype=complex)
    full[:, support] = matrix * weights
    return integrate.simpson(full, x=xs, axis=1)
