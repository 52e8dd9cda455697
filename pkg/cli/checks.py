# cli/checks.py
"""The verification suite behind ``verify``.

Each check computes one metric and compares it with a tolerance. ``upper``
checks pass when metric <= tolerance, ``lower`` checks (convergence ratios)
when metric >= tolerance. Tolerances can be overridden per name from the
[verify] section of the scenario file.
"""

import dataclasses
import fnmatch
import logging
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List

import numpy as np
from numpy.polynomial import hermite
from scipy import integrate, special

from cli import __version__
from cli.commands import evolve_states
from models.base_problems import (
    OSC_WRONSKIAN,
    FreeParticle,
    HarmonicOscillator,
    free_propagator,
    free_propagator_dx,
    osc_eigenfunctions,
    osc_green_neg_half,
    osc_green_spectral_errors,
    osc_jost_pair,
    osc_propagator,
    osc_propagator_dx,
)
from models.grid import Grid1D
from models.kernel import (
    Method,
    closed_form_matrix,
    expansion_coefficients,
    oscillator_display_ratio,
    oscillator_kernel_closed,
    propagate_state,
    soliton_kernel_closed,
    theorem_kernel,
    theorem_kernel_matrix,
)
from models.oracle import (
    EvolutionConfig,
    apply_h_grid,
    cn_evolve,
    derivative_grid,
    discretized_spectrum,
    free_gaussian,
    gaussian_packet,
)
from models.quadrature import QuadratureSpec, integrate_complex
from models.specfun import cerf, faddeeva_w, osc_eigenfunction
from models.susy import (
    PartnerModel,
    apply_L,
    apply_Lt,
    bilinear_norm,
    bilinear_pairing,
    make_oscillator_transform,
    make_soliton_transform,
    normalization_from_quadrature,
    oscillator_partner_closed,
    partner_potential,
    soliton_partner_closed,
)
from utils.config import MethodsConfig, PacketConfig, ScenarioConfig
from utils.report import VerificationReport

logger = logging.getLogger(__name__)

# truncation windows for the pointwise spectral Green check
GREEN_LOW_WINDOW = range(8, 25)
GREEN_HIGH_WINDOW = range(64, 81)

# packets centred at 1 on the oscillator keep edge amplitudes below the Crank-Nicolson cap inside this radius
OSC_EVOLUTION_RADIUS = 14.0


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    run: Callable[["CheckContext"], float]
    lower: bool = False


REGISTRY: List[Check] = []


def check(name: str, tolerance: float, lower: bool = False):
    def register(fn):
        REGISTRY.append(Check(name, tolerance, fn, lower))
        return fn

    return register


class CheckContext:
    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.threads = cfg.threads
        self.quad = cfg.quadrature

    @cached_property
    def oscillator(self) -> PartnerModel:
        return PartnerModel.from_factorization(make_oscillator_transform(self.cfg.oscillator.C))

    @cached_property
    def soliton(self) -> PartnerModel:
        return PartnerModel.from_factorization(make_soliton_transform(self.cfg.soliton.a, self.cfg.soliton.b))

    def model(self, example: str) -> PartnerModel:
        return self.oscillator if example == "oscillator" else self.soliton


def rel_l2(values, reference, xs) -> float:
    diff = integrate.simpson(np.abs(values - reference) ** 2, x=xs)
    return float(np.sqrt(diff / integrate.simpson(np.abs(reference) ** 2, x=xs)))


def smooth_test_function(x, coefficients=(1.0, 0.5, -0.2), center=0.3):
    """Gaussian times a polynomial, with its first derivative."""
    x = np.asarray(x, dtype=float)
    poly = np.polynomial.Polynomial(coefficients)
    envelope = np.exp(-0.5 * (x - center) ** 2)
    value = poly(x) * envelope
    deriv = (poly.deriv()(x) - (x - center) * poly(x)) * envelope
    return value, deriv


# --- special functions --------------------------------------------------------------


@check("specfun.cerf_odd", 1e-13)
def _cerf_odd(ctx):
    radius = 5.0 * np.sqrt(ctx.rng.uniform(size=100))
    z = radius * np.exp(2j * np.pi * ctx.rng.uniform(size=100))
    return float(np.max(np.abs(cerf(z) + cerf(-z))))


@check("specfun.faddeeva_reference", 1e-12)
def _faddeeva_reference(ctx):
    expected = np.e * special.erfc(1.0)
    return abs(faddeeva_w(1j) - expected) / expected


@check("specfun.hermite_recurrence", 1e-10)
def _hermite_recurrence(ctx):
    x = np.linspace(-8.0, 8.0, 161)
    table = osc_eigenfunctions(15, x)
    worst = 0.0
    for n in range(16):
        coefficients = np.zeros(n + 1)
        coefficients[n] = 1.0
        norm = 2.0 ** -0.25 / np.sqrt(2.0 ** n * special.factorial(n) * np.sqrt(np.pi))
        direct = norm * hermite.hermval(x / np.sqrt(2.0), coefficients) * np.exp(-0.25 * x * x)
        worst = max(worst, float(np.max(np.abs(table[n] - direct)) / np.max(np.abs(direct))))
    return worst


# --- base problems ---------------------------------------------------------------------


@check("model.wronskian_constancy", 1e-10)
def _wronskian(ctx):
    x = np.linspace(-3.0, 3.0, 21)
    w = osc_jost_pair().wronskian(x)
    return float(np.max(np.abs(w - OSC_WRONSKIAN)) / abs(OSC_WRONSKIAN))


@check("model.green_jump", 1e-6)
def _green_jump(ctx):
    y, h = 0.3, 1e-4
    right = (-3.0 * osc_green_neg_half(y, y) + 4.0 * osc_green_neg_half(y + h, y) - osc_green_neg_half(y + 2 * h, y)) / (2 * h)
    left = (3.0 * osc_green_neg_half(y, y) - 4.0 * osc_green_neg_half(y - h, y) + osc_green_neg_half(y - 2 * h, y)) / (2 * h)
    return abs((right - left) - (-1.0))


@check("model.green_spectral_paired", 1e-6)
def _green_spectral(ctx):
    x, n_terms = 0.5, 80
    radius = 12.0
    quad = QuadratureSpec(truncation_radius=radius, abs_tol=1e-12, rel_tol=1e-11)

    def g(z):
        return np.exp(-((z + 0.3) ** 2) / (2 * 0.49))

    direct, _ = integrate_complex(lambda z: osc_green_neg_half(x, z) * g(z), -radius, radius, quad, points=[x])
    overlaps, _ = integrate_complex(lambda z: osc_eigenfunctions(n_terms - 1, z) * g(z), -radius, radius, quad)
    series = np.sum(osc_eigenfunctions(n_terms - 1, x) * overlaps.real / (np.arange(n_terms) + 1.0))
    return abs(complex(direct) - series)


@check("model.green_spectral_pointwise", 5e-2)
def _green_pointwise(ctx):
    x, y = 0.5, -0.3
    low = osc_green_spectral_errors(x, y, GREEN_LOW_WINDOW).max()
    high = osc_green_spectral_errors(x, y, GREEN_HIGH_WINDOW).max()
    if not high < low:
        return float("inf")
    return float(high)


@check("model.oscillator_ground_phase", 1e-8)
def _ground_phase(ctx):
    grid = Grid1D.from_spacing(-10.0, 10.0, 0.05)
    xs = grid.points
    pm = PartnerModel.untransformed(HarmonicOscillator())
    state = propagate_state(Method.CLOSED_FORM, pm, osc_eigenfunction(0, xs), grid, 0.7, ctx.quad)
    return float(np.max(np.abs(state - np.exp(-0.35j) * osc_eigenfunction(0, xs))))


@check("model.free_group_property", 1e-6)
def _free_group(ctx):
    grid = Grid1D.from_spacing(-20.0, 20.0, 0.05)
    xs = grid.points
    pm = PartnerModel.untransformed(FreeParticle())
    packet = gaussian_packet(xs, 0.0, 1.0)
    once = propagate_state(Method.CLOSED_FORM, pm, packet, grid, 0.4, ctx.quad)
    twice = propagate_state(Method.CLOSED_FORM, pm, once, grid, 0.3, ctx.quad)
    return rel_l2(twice, free_gaussian(xs, 0.7, 0.0, 1.0), xs)


@check("model.free_gaussian_sanity", 1e-8)
def _free_sanity(ctx):
    grid = Grid1D.from_spacing(-15.0, 15.0, 0.05)
    xs = grid.points
    pm = PartnerModel.untransformed(FreeParticle())
    packet = gaussian_packet(xs, -1.0, 1.0, momentum=1.0)
    state = propagate_state(Method.THEOREM_QUAD, pm, packet, grid, 0.5, ctx.quad)
    return rel_l2(state, free_gaussian(xs, 0.5, -1.0, 1.0, momentum=1.0), xs)


# --- transformations ---------------------------------------------------------------------


@check("susy.partner_closed_form", 1e-10)
def _partner_closed(ctx):
    x = ctx.rng.uniform(-8.0, 8.0, size=50)
    osc = ctx.oscillator.fact
    sol = ctx.soliton.fact
    return float(max(
        np.max(np.abs(partner_potential(osc, x) - oscillator_partner_closed(osc.C, x))),
        np.max(np.abs(partner_potential(sol, x) - soliton_partner_closed(sol.a, sol.c, x))),
    ))


@check("susy.asymptotic_shift", 1e-8)
def _asymptotic(ctx):
    x = np.array([-12.0, 12.0])
    worst = 0.0
    for pm in (ctx.oscillator, ctx.soliton):
        gap = pm.potential(x) - pm.base.potential(x) - pm.fact.asymptotic_shift
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


def _factorization_residual(fact, spacing, which):
    grid = Grid1D.from_spacing(-6.0, 6.0, spacing)
    xs = grid.points
    g, dg = smooth_test_function(xs)
    inner = slice(2, -2)
    if which == "LtL":
        lg = apply_L(fact, g, dg, xs)
        lhs = -fact.log_derivative(xs[inner]) * lg[inner] - derivative_grid(lg, grid)
        rhs = apply_h_grid(fact.base.potential(xs), g, grid, order=4) - fact.alpha * g[inner]
    else:
        ltg = apply_Lt(fact, g, dg, xs)
        lhs = -fact.log_derivative(xs[inner]) * ltg[inner] + derivative_grid(ltg, grid)
        rhs = apply_h_grid(partner_potential(fact, xs), g, grid, order=4) - fact.alpha * g[inner]
    return float(np.max(np.abs(lhs - rhs)))


def _order_ratio(fact, which):
    return _factorization_residual(fact, 0.05, which) / _factorization_residual(fact, 0.025, which)


@check("susy.factorization_LtL_oscillator", 12.0, lower=True)
def _ltl_osc(ctx):
    return _order_ratio(ctx.oscillator.fact, "LtL")


@check("susy.factorization_LLt_oscillator", 12.0, lower=True)
def _llt_osc(ctx):
    return _order_ratio(ctx.oscillator.fact, "LLt")


@check("susy.factorization_LtL_soliton", 12.0, lower=True)
def _ltl_sol(ctx):
    return _order_ratio(ctx.soliton.fact, "LtL")


@check("susy.factorization_LLt_soliton", 12.0, lower=True)
def _llt_sol(ctx):
    return _order_ratio(ctx.soliton.fact, "LLt")


def _intertwining_residual(fact, spacing, coefficients):
    grid = Grid1D.from_spacing(-6.0, 6.0, spacing)
    xs = grid.points
    g, dg = smooth_test_function(xs, coefficients)
    h0_g = apply_h_grid(fact.base.potential(xs), g, grid, order=4)
    inner_grid = Grid1D(xs[2], xs[-3], xs.size - 4)
    left = -fact.log_derivative(xs[4:-4]) * h0_g[2:-2] + derivative_grid(h0_g, inner_grid)
    right = apply_h_grid(partner_potential(fact, xs), apply_L(fact, g, dg, xs), grid, order=4)[2:-2]
    return float(np.max(np.abs(left - right)))


@check("susy.intertwining_fd", 12.0, lower=True)
def _intertwining_fd(ctx):
    coefficients = tuple(ctx.rng.uniform(-1.0, 1.0, size=3))
    ratios = [
        _intertwining_residual(pm.fact, 0.05, coefficients) / _intertwining_residual(pm.fact, 0.025, coefficients)
        for pm in (ctx.oscillator, ctx.soliton)
    ]
    return min(ratios)


@check("susy.bound_norm_oscillator", 1e-8)
def _norm_osc(ctx):
    quad = QuadratureSpec(truncation_radius=15.0)
    return abs(bilinear_norm(ctx.oscillator.bound_state, quad) - 1.0)


@check("susy.bound_norm_soliton", 1e-10)
def _norm_sol(ctx):
    quad = QuadratureSpec(truncation_radius=30.0, abs_tol=1e-13, rel_tol=1e-12)
    return abs(bilinear_norm(ctx.soliton.bound_state, quad) - 1.0)


@check("susy.normalization_branch", 1e-8)
def _branch(ctx):
    quads = {"oscillator": QuadratureSpec(truncation_radius=15.0), "soliton": QuadratureSpec(truncation_radius=30.0)}
    return max(abs(normalization_from_quadrature(ctx.model(k).fact, q) - ctx.model(k).fact.n_alpha)
               for k, q in quads.items())


@check("susy.orthonormality", 1e-8)
def _orthonormality(ctx):
    pm = ctx.oscillator
    quad = QuadratureSpec(truncation_radius=15.0)
    gram = bilinear_pairing(lambda z: pm.eigenfunctions(10, z)[:, None],
                            lambda z: pm.eigenfunctions(10, z)[None, :], quad)
    cross = bilinear_pairing(pm.bound_state, lambda z: pm.eigenfunctions(6, z), quad)
    return float(max(np.max(np.abs(gram - np.eye(11))), np.max(np.abs(cross))))


@check("susy.spectrum_levels", 1e-3)
def _spectrum_levels(ctx):
    grid = Grid1D(-12.0, 12.0, 600)
    levels = discretized_spectrum(ctx.oscillator.potential(grid.points), grid, order=4, count=8)
    return float(np.max(np.abs(levels.real - (np.arange(8) - 0.5))))


@check("susy.spectrum_reality", 1e-6)
def _spectrum_reality(ctx):
    grid = Grid1D(-12.0, 12.0, 600)
    levels = discretized_spectrum(ctx.oscillator.potential(grid.points), grid, order=4, count=8)
    return float(np.max(np.abs(levels.imag)))


def reconstruction_errors(pm, grid, g, sizes):
    xs = grid.points
    errors = []
    for n_terms in sizes:
        coefficients, bound = expansion_coefficients(pm, g, grid, n_terms)
        rebuilt = coefficients @ pm.eigenfunctions(n_terms - 1, xs) + bound * pm.bound_state(xs)
        errors.append(rel_l2(rebuilt, g, xs))
    return errors


@check("susy.completeness", 0.99)
def _completeness(ctx):
    grid = Grid1D.from_spacing(-12.0, 12.0, 0.02)
    g = gaussian_packet(grid.points, 0.5, 0.4)
    errors = reconstruction_errors(ctx.oscillator, grid, g, (8, 16, 32, 64))
    return max(later / earlier for earlier, later in zip(errors, errors[1:]))


# --- kernels ----------------------------------------------------------------------


@check("kernel.soliton_closed_vs_theorem", 1e-6)
def _soliton_lattice(ctx):
    pm = ctx.soliton
    axis = np.linspace(-5.0, 5.0, 11)
    worst = 0.0
    for t in (0.3, 1.0):
        theorem, _ = theorem_kernel_matrix(pm, axis, axis, t, ctx.quad, ctx.threads)
        closed = soliton_kernel_closed(pm.fact.a, pm.fact.c, axis[:, None], axis[None, :], t).value
        worst = max(worst, float(np.max(np.abs(theorem - closed))))
    return worst


@check("kernel.oscillator_closed_vs_theorem", 1e-6)
def _oscillator_points(ctx):
    pm = ctx.oscillator
    xs = np.array([0.4, -1.0, 1.5])
    worst = 0.0
    for y in (-0.8, 0.6):
        theorem = theorem_kernel(pm, xs, y, 0.7, ctx.quad).value
        closed = oscillator_kernel_closed(pm.fact.C, xs, y, 0.7, ctx.quad).value
        worst = max(worst, float(np.max(np.abs(theorem - closed))))
    return worst


@check("kernel.oscillator_display_prefactor", 1e-8)
def _display(ctx):
    ratio = oscillator_display_ratio(ctx.oscillator.fact.C, [0.4, -0.2], -0.8, 0.7, ctx.quad)
    return abs(ratio - np.sqrt(2.0 * np.pi)) / np.sqrt(2.0 * np.pi)


@check("kernel.three_way_oscillator", 1e-3)
def _three_way(ctx):
    cfg = _with_example(ctx.cfg, "oscillator")
    states = evolve_states(cfg)
    evolution = cfg.evolution
    xs = Grid1D.from_spacing(evolution.x_min, evolution.x_max, evolution.spacing).points
    methods = [m for m in states if m != "initial"]
    return max(rel_l2(states[a], states[b], xs) for i, a in enumerate(methods) for b in methods[i + 1:])


def _with_example(cfg, example):
    """Default packet and methods on a domain wide enough for the packet tails at the evolution time."""
    evolution = dataclasses.replace(cfg.evolution, x_min=min(cfg.evolution.x_min, -OSC_EVOLUTION_RADIUS),
                                    x_max=max(cfg.evolution.x_max, OSC_EVOLUTION_RADIUS))
    return dataclasses.replace(cfg, example=example, packet=PacketConfig(), evolution=evolution,
                               methods=MethodsConfig(spectral_terms=64))


@check("kernel.bound_phase_oscillator", 1e-5)
def _bound_phase_osc(ctx):
    pm = ctx.oscillator
    grid = Grid1D.from_spacing(-10.0, 10.0, 0.2)
    xs = grid.points
    phi = pm.bound_state(xs)
    state = propagate_state(Method.THEOREM_QUAD, pm, phi, grid, 0.7, ctx.quad, threads=ctx.threads)
    return float(np.max(np.abs(state - np.exp(0.35j) * phi)))


@check("kernel.bound_phase_soliton", 1e-5)
def _bound_phase_sol(ctx):
    pm = ctx.soliton
    grid = Grid1D.from_spacing(-30.0, 30.0, 0.05)
    xs = grid.points
    phi = pm.bound_state(xs)
    state = propagate_state(Method.CLOSED_FORM, pm, phi, grid, 0.7, ctx.quad)
    return float(np.max(np.abs(state - np.exp(1j * pm.fact.a ** 2 * 0.7) * phi)))


@check("kernel.bound_state_isolation", 1e-5)
def _isolation(ctx):
    pm = ctx.oscillator
    grid = Grid1D.from_spacing(-10.0, 10.0, 0.2)
    xs = grid.points
    phi = pm.bound_state(xs)
    matrix, _ = theorem_kernel_matrix(pm, xs, xs, 0.7, ctx.quad, ctx.threads)
    k_l = matrix - np.outer(phi, phi) * np.exp(0.35j)
    return float(np.max(np.abs(integrate.simpson(k_l * phi, x=xs, axis=1))))


def intertwining_evolution_gap(pm, grid, xs_out, t, quad):
    ys = grid.points
    g = gaussian_packet(ys, 0.5, 1.0)
    dg = -(ys - 0.5) / 2.0 * g
    lg = apply_L(pm.fact, g, dg, ys)
    kernel, _ = closed_form_matrix(pm, xs_out, ys, t, quad)
    lhs = integrate.simpson(kernel * lg, x=ys, axis=1)
    if isinstance(pm.base, HarmonicOscillator):
        k0 = osc_propagator(xs_out[:, None], ys[None, :], t)
        dk0 = osc_propagator_dx(xs_out[:, None], ys[None, :], t)
    else:
        k0 = free_propagator(xs_out[:, None], ys[None, :], t)
        dk0 = free_propagator_dx(xs_out[:, None], ys[None, :], t)
    evolved = integrate.simpson(k0 * g, x=ys, axis=1)
    devolved = integrate.simpson(dk0 * g, x=ys, axis=1)
    rhs = devolved - pm.fact.log_derivative(xs_out) * evolved
    return float(np.max(np.abs(lhs - rhs)))


@check("kernel.intertwining_evolution", 1e-5)
def _intertwining_evolution(ctx):
    xs_out = np.linspace(-3.0, 3.0, 13)
    return max(
        intertwining_evolution_gap(ctx.oscillator, Grid1D.from_spacing(-10.0, 10.0, 0.1), xs_out, 0.7, ctx.quad),
        intertwining_evolution_gap(ctx.soliton, Grid1D.from_spacing(-15.0, 16.0, 0.05), xs_out, 0.7, ctx.quad),
    )


def pde_residual(kernel, potential, xs, ys, t, step):
    """max |(i d/dt - h_c) K| with 4th-order x and 2nd-order t differences."""
    offsets = np.arange(-2, 3) * step
    worst = 0.0
    for y in ys:
        points = (xs[:, None] + offsets[None, :]).ravel()
        now = kernel(points, y, t).reshape(xs.size, 5)
        dt = (kernel(xs, y, t + step) - kernel(xs, y, t - step)) / (2.0 * step)
        laplacian = now @ np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * step ** 2)
        residual = 1j * dt + laplacian - potential(xs) * now[:, 2]
        worst = max(worst, float(np.max(np.abs(residual))))
    return worst


def _pde_ratio(ctx, example, coarse):
    pm = ctx.model(example)
    xs = np.array([-0.5, 0.0, 0.5])
    ys = np.array([-0.4, 0.3])
    if example == "soliton":
        def kernel(x, y, t):
            return np.asarray(soliton_kernel_closed(pm.fact.a, pm.fact.c, x, y, t).value)
    else:
        quad = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12)

        def kernel(x, y, t):
            return np.asarray(oscillator_kernel_closed(pm.fact.C, np.atleast_1d(x), y, t, quad).value)
    first = pde_residual(kernel, pm.potential, xs, ys, 0.7, coarse)
    second = pde_residual(kernel, pm.potential, xs, ys, 0.7, coarse / 2.0)
    return first / second


@check("kernel.pde_residual_soliton", 3.5, lower=True)
def _pde_soliton(ctx):
    return _pde_ratio(ctx, "soliton", 0.02)


@check("kernel.pde_residual_oscillator", 3.5, lower=True)
def _pde_oscillator(ctx):
    return _pde_ratio(ctx, "oscillator", 0.05)


def _weak_semigroup(pm, grid, t1, t2, quad):
    xs = grid.points
    packet = gaussian_packet(xs, 0.0, 1.0)
    first = propagate_state(Method.CLOSED_FORM, pm, packet, grid, t2, quad)
    composed = propagate_state(Method.CLOSED_FORM, pm, first, grid, t1, quad)
    direct = propagate_state(Method.CLOSED_FORM, pm, packet, grid, t1 + t2, quad)
    return rel_l2(composed, direct, xs)


@check("kernel.semigroup_soliton", 1e-5)
def _semigroup(ctx):
    return _weak_semigroup(ctx.soliton, Grid1D.from_spacing(-20.0, 20.0, 0.05), 0.4, 0.6, ctx.quad)


@check("kernel.symmetry", 1e-7)
def _symmetry(ctx):
    pm = ctx.soliton
    points = ctx.rng.uniform(-3.0, 3.0, size=(4, 2))
    worst = 0.0
    for x, y in points:
        forward = theorem_kernel(pm, x, y, 0.7, ctx.quad).value
        backward = theorem_kernel(pm, y, x, 0.7, ctx.quad).value
        worst = max(worst, abs(forward - backward))
    closed = soliton_kernel_closed(pm.fact.a, pm.fact.c, points[:, 0], points[:, 1], 0.7).value
    swapped = soliton_kernel_closed(pm.fact.a, pm.fact.c, points[:, 1], points[:, 0], 0.7).value
    return max(worst, float(np.max(np.abs(closed - swapped))))


@check("kernel.spectral_eigenfunction", 1e-8)
def _spectral_eigen(ctx):
    pm = ctx.oscillator
    grid = Grid1D.from_spacing(-15.0, 15.0, 0.02)
    xs = grid.points
    phi3 = pm.eigenfunction(3, xs)
    state = propagate_state(Method.SPECTRAL_SUM, pm, phi3, grid, 0.7, ctx.quad, n_terms=8)
    return float(np.max(np.abs(state - np.exp(-3.5j * 0.7) * phi3)))


@check("kernel.short_time", 0.02)
def _short_time(ctx):
    grid = Grid1D.from_spacing(-5.5, 9.5, 0.005)
    xs = grid.points
    packet = gaussian_packet(xs, 2.0, 1.0)
    state = propagate_state(Method.CLOSED_FORM, ctx.soliton, packet, grid, 0.01, ctx.quad)
    return rel_l2(state, packet, xs)


# --- finite-difference oracle -------------------------------------------------------------


@check("oracle.cn_free_gaussian", 1e-4)
def _cn_free(ctx):
    grid = Grid1D(-40.0, 40.0, 4096)
    xs = grid.points
    run = EvolutionConfig.for_duration(grid, 1.0, 5e-4)
    state = cn_evolve(np.zeros(xs.size), gaussian_packet(xs, 0.0, 1.0), run)
    return rel_l2(state, free_gaussian(xs, 1.0, 0.0, 1.0), xs)


@check("oracle.cn_oscillator_ground", 1e-4)
def _cn_ground(ctx):
    grid = Grid1D.from_spacing(-12.0, 12.0, 0.02)
    xs = grid.points
    psi0 = osc_eigenfunction(0, xs)
    run = EvolutionConfig.for_duration(grid, 1.0, 1e-3)
    state = cn_evolve(0.25 * xs * xs, psi0, run)
    return float(np.max(np.abs(state - np.exp(-0.5j) * psi0)) / np.max(np.abs(psi0)))


@check("oracle.cn_soliton_bound", 1e-4)
def _cn_soliton(ctx):
    pm = ctx.soliton
    grid = Grid1D.from_spacing(-25.0, 25.0, 0.01)
    xs = grid.points
    phi = pm.bound_state(xs)
    run = EvolutionConfig.for_duration(grid, 1.0, 1e-3)
    state = cn_evolve(pm.potential(xs), phi, run)
    return rel_l2(state, np.exp(1j * pm.fact.a ** 2) * phi, xs)


@check("oracle.cn_norm_real_potential", 1e-12)
def _cn_norm(ctx):
    grid = Grid1D.from_spacing(-12.0, 12.0, 0.05)
    xs = grid.points
    packet = gaussian_packet(xs, 1.0, 1.0, momentum=0.5)
    state = cn_evolve(0.25 * xs * xs, packet, EvolutionConfig.for_duration(grid, 1.0, 1e-2))
    return abs(np.linalg.norm(state) / np.linalg.norm(packet) - 1.0)


@check("oracle.cn_coefficient_moduli", 1e-4)
def _cn_moduli(ctx):
    pm = ctx.oscillator
    grid = Grid1D.from_spacing(-OSC_EVOLUTION_RADIUS, OSC_EVOLUTION_RADIUS, 0.0125)
    packet = gaussian_packet(grid.points, 1.0, 1.0)
    state = cn_evolve(pm.potential(grid.points), packet, EvolutionConfig.for_duration(grid, 0.7, 1e-3))
    before, _ = expansion_coefficients(pm, packet, grid, 6)
    after, _ = expansion_coefficients(pm, state, grid, 6)
    return float(np.max(np.abs(np.abs(after) - np.abs(before))))


@check("oracle.cn_time_order", 3.5, lower=True)
def _cn_order(ctx):
    pm = ctx.soliton
    grid = Grid1D.from_spacing(-40.0, 40.0, 0.05)
    xs = grid.points
    phi = pm.bound_state(xs)
    potential = pm.potential(xs)

    def run(dt):
        return cn_evolve(potential, phi, EvolutionConfig.for_duration(grid, 1.0, dt))

    reference = run(0.00125)
    return rel_l2(run(0.02), reference, xs) / rel_l2(run(0.01), reference, xs)


# --- runner -----------------------------------------------------------------------


def select(pattern: str) -> List[Check]:
    return [c for c in REGISTRY if fnmatch.fnmatchcase(c.name, pattern)]


def run_checks(cfg: ScenarioConfig) -> VerificationReport:
    """Run every registered check matching cfg.verify.pattern; failures are recorded, not raised."""
    ctx = CheckContext(cfg)
    report = VerificationReport(__version__, cfg.to_dict(), seed=cfg.seed)
    overrides: Dict[str, float] = cfg.verify.tolerances
    for item in select(cfg.verify.pattern):
        tolerance = overrides.get(item.name, item.tolerance)
        started = time.perf_counter()
        detail = ""
        try:
            metric = float(item.run(ctx))
        except Exception as exc:  # a crashing check is a failed check
            metric, detail = float("nan"), f"{type(exc).__name__}: {exc}"
            logger.exception("check %s raised", item.name)
        passed = bool(np.isfinite(metric)) and (metric >= tolerance if item.lower else metric <= tolerance)
        seconds = time.perf_counter() - started
        report.record(item.name, metric, tolerance, passed, seconds, detail)
        logger.info("%s %s: %.3e (tol %.1e, %.1fs)", "✅" if passed else "❌", item.name, metric, tolerance, seconds)
    return report
