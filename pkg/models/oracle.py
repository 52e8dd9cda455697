# models/oracle.py
"""Finite-difference oracles independent of every kernel formula.

Grid Hamiltonians h = -d^2/dx^2 + V with 2nd or 4th order stencils, a
Crank-Nicolson stepper for i dPhi/dt = h Phi with Dirichlet ends, the
discretized spectrum, and the exact free Gaussian packet.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from models.grid import Grid1D
from utils.errors import DomainTooSmallError, ResolutionError

logger = logging.getLogger(__name__)

# central stencils, offsets -w .. w
LAPLACIAN_STENCILS = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
}
DERIVATIVE_STENCILS = {
    2: np.array([-1.0, 0.0, 1.0]) / 2.0,
    4: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
}


def _stencil(stencils, order):
    try:
        return stencils[order]
    except KeyError:
        raise ValueError(f"stencil order must be 2 or 4, got {order}") from None


def _correlate(g, weights):
    width = len(weights) // 2
    n = len(g)
    return sum(w * g[width + k : n - width + k] for k, w in zip(range(-width, width + 1), weights))


def interior(grid: Grid1D, order: int = 2) -> np.ndarray:
    """Grid points where a stencil of this order is applied."""
    width = len(_stencil(LAPLACIAN_STENCILS, order)) // 2
    return grid.points[width:-width]


def apply_h_grid(V, g, grid: Grid1D, order: int = 2) -> np.ndarray:
    """(-g'' + V g) at the interior points of the stencil."""
    weights = _stencil(LAPLACIAN_STENCILS, order)
    grid.check_samples(V, g)
    width = len(weights) // 2
    V = np.asarray(V)
    g = np.asarray(g)
    laplacian = _correlate(g, weights) / grid.spacing ** 2
    return -laplacian + V[width:-width] * g[width:-width]


def derivative_grid(g, grid: Grid1D, order: int = 4) -> np.ndarray:
    weights = _stencil(DERIVATIVE_STENCILS, order)
    grid.check_samples(g)
    return _correlate(np.asarray(g), weights) / grid.spacing


def hamiltonian_matrix(V, grid: Grid1D, order: int = 2) -> sparse.csc_matrix:
    """Sparse h on the interior unknowns x_1 .. x_{n-2}; values beyond the ends are zero."""
    weights = _stencil(LAPLACIAN_STENCILS, order)
    grid.check_samples(V)
    size = grid.n_points - 2
    width = len(weights) // 2
    offsets = list(range(-width, width + 1))
    diagonals = [np.full(size - abs(k), -w / grid.spacing ** 2, dtype=complex) for k, w in zip(offsets, weights)]
    kinetic = sparse.diags(diagonals, offsets, shape=(size, size), format="csc")
    return (kinetic + sparse.diags(np.asarray(V, dtype=complex)[1:-1], 0, format="csc")).tocsc()


def discretized_spectrum(V, grid: Grid1D, order: int = 4, count: int = 8) -> np.ndarray:
    """Lowest ``count`` eigenvalues (by real part) of the grid Hamiltonian."""
    dense = hamiltonian_matrix(V, grid, order).toarray()
    eigenvalues = linalg.eigvals(dense)
    return eigenvalues[np.argsort(eigenvalues.real, kind="stable")][:count]


@dataclass(frozen=True)
class EvolutionConfig:
    grid: Grid1D
    dt: float
    n_steps: int
    boundary: str = "Dirichlet"
    boundary_cap: float = 1e-6
    stiffness_warning: float = 0.5
    check_every: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.boundary != "Dirichlet":
            raise ValueError(f"unsupported boundary {self.boundary!r}; only Dirichlet is implemented")

    @classmethod
    def for_duration(cls, grid: Grid1D, t: float, dt_max: float, **options) -> "EvolutionConfig":
        """Step count rounded up so that n_steps * dt == t exactly."""
        if not t > 0:
            raise ValueError(f"evolution time must be > 0, got {t}")
        n_steps = max(1, math.ceil(t / dt_max - 1e-12))
        return cls(grid=grid, dt=t / n_steps, n_steps=n_steps, **options)

    @property
    def duration(self) -> float:
        return self.dt * self.n_steps


def _assert_diagonally_dominant(matrix: sparse.csc_matrix) -> None:
    diagonal = np.abs(matrix.diagonal())
    off_diagonal = np.asarray(abs(matrix).sum(axis=1)).ravel() - diagonal
    if np.any(diagonal < off_diagonal):
        row = int(np.argmax(off_diagonal - diagonal))
        raise ValueError(f"Crank-Nicolson matrix is not diagonally dominant at row {row}; reduce dt")


def cn_evolve(V, phi0, cfg: EvolutionConfig) -> np.ndarray:
    """Crank-Nicolson: (1 + i dt/2 h) Phi_{k+1} = (1 - i dt/2 h) Phi_k, Phi = 0 at both ends."""
    grid = cfg.grid
    grid.check_samples(V, phi0)
    V = np.asarray(V, dtype=complex)
    h = hamiltonian_matrix(V, grid, order=2)
    identity = sparse.identity(h.shape[0], dtype=complex, format="csc")
    implicit = (identity + 0.5j * cfg.dt * h).tocsc()
    explicit = (identity - 0.5j * cfg.dt * h).tocsr()
    _assert_diagonally_dominant(implicit)

    stiffness = cfg.dt * float(np.max(np.abs(V)))
    if stiffness > cfg.stiffness_warning:
        logger.warning("dt * max|V| = %.3g exceeds %.3g; phases of high-potential regions are inaccurate",
                       stiffness, cfg.stiffness_warning)

    solver = splu(implicit)
    state = np.asarray(phi0, dtype=complex)[1:-1].copy()
    reference = float(np.max(np.abs(state))) or 1.0
    band = max(2, grid.n_points // 50)
    for step in range(1, cfg.n_steps + 1):
        state = solver.solve(explicit @ state)
        if step % cfg.check_every == 0 or step == cfg.n_steps:
            edge = max(np.max(np.abs(state[:band])), np.max(np.abs(state[-band:])))
            if edge > cfg.boundary_cap * reference:
                raise DomainTooSmallError(
                    f"boundary amplitude {edge / reference:.2e} exceeds cap {cfg.boundary_cap:.1e} "
                    f"at t = {step * cfg.dt:.4g}"
                )
    logger.debug("cn_evolve: %d steps of dt = %.3g on %d points", cfg.n_steps, cfg.dt, grid.n_points)
    result = np.zeros(grid.n_points, dtype=complex)
    result[1:-1] = state
    return result


# --- Gaussian packets ----------------------------------------------------------


def gaussian_packet(x, center: float, width: float, momentum: float = 0.0):
    """(2 pi width^2)^{-1/4} exp(-(x - center)^2 / (4 width^2) + i momentum x)."""
    x = np.asarray(x, dtype=float)
    amplitude = (2.0 * np.pi * width * width) ** -0.25
    return amplitude * np.exp(-((x - center) ** 2) / (4.0 * width * width) + 1j * momentum * x)


def free_gaussian(x, t: float, center: float, width: float, momentum: float = 0.0):
    """Exact free evolution of gaussian_packet under h = -d^2/dx^2."""
    x = np.asarray(x, dtype=float)
    s = width * width
    spread = s + 1j * t
    amplitude = (2.0 * np.pi * s) ** -0.25 * np.sqrt(s / spread)
    exponent = -((x - center - 2j * s * momentum) ** 2) / (4.0 * spread)
    return amplitude * np.exp(exponent + 1j * momentum * center - s * momentum ** 2)


def check_packet_resolution(width: float, grid: Grid1D) -> None:
    if width < 4.0 * grid.spacing:
        raise ResolutionError(f"packet width {width} is below 4h = {4.0 * grid.spacing:.4g}")
