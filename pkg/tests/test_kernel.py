import numpy as np
import pytest

from models.base_problems import free_propagator, osc_jost_pair, osc_propagator
from models.grid import Grid1D
from models.kernel import (
    KernelEval,
    Method,
    expansion_coefficients,
    kernel_matrix,
    oscillator_display_ratio,
    oscillator_kernel_closed,
    propagate_state,
    soliton_kernel_closed,
    spectral_kernel,
    split_boundary_terms,
    tail_mass,
    theorem_kernel,
    theorem_kernel_matrix,
)
from models.oracle import gaussian_packet
from utils.errors import DomainTooSmallError, SingularTimeError

TOL_KERNEL = 1e-6
TOL_PHASE = 1e-5


# ### closed forms against the theorem


def test_soliton_closed_form_matches_theorem(soliton_model, quad):
    fact = soliton_model.fact
    x = np.array([-2.0, -0.5, 0.0, 1.0, 2.5])
    for y, t in ((0.3, 0.7), (-1.0, 0.3)):
        theorem = theorem_kernel(soliton_model, x, y, t, quad)
        closed = soliton_kernel_closed(fact.a, fact.c, x, y, t)
        np.testing.assert_allclose(theorem.value, closed.value, atol=TOL_KERNEL)
        assert theorem.method is Method.THEOREM_QUAD


def test_oscillator_closed_form_matches_theorem(osc_model, quad):
    x = np.array([0.4, -1.0])
    theorem = theorem_kernel(osc_model, x, -0.8, 0.7, quad)
    closed = oscillator_kernel_closed(2j, x, -0.8, 0.7, quad)
    np.testing.assert_allclose(theorem.value, closed.value, atol=TOL_KERNEL)
    assert closed.err_estimate < 1e-6


def test_scalar_evaluation_returns_complex(soliton_model, quad):
    value = theorem_kernel(soliton_model, 0.2, -0.1, 0.5, quad).value
    assert isinstance(value, complex)
    assert isinstance(soliton_kernel_closed(1.0, soliton_model.fact.c, 0.2, -0.1, 0.5).value, complex)


def test_literal_display_prefactor(osc_model, quad):
    ratio = oscillator_display_ratio(2j, [0.4, -0.2], -0.8, 0.7, quad)
    assert ratio == pytest.approx(np.sqrt(2.0 * np.pi), rel=1e-8)


def test_boundary_terms_cancel():
    left, right = split_boundary_terms(osc_jost_pair(), np.array([0.3 + 0.1j, -2.0j]), 0.7)
    np.testing.assert_array_equal(left + right, 0.0)


def test_kernel_symmetry(soliton_model, quad):
    fact = soliton_model.fact
    closed = soliton_kernel_closed(fact.a, fact.c, 0.9, -1.4, 0.6).value
    swapped = soliton_kernel_closed(fact.a, fact.c, -1.4, 0.9, 0.6).value
    assert closed == pytest.approx(swapped, abs=1e-14)
    forward = theorem_kernel(soliton_model, 0.9, -1.4, 0.6, quad).value
    backward = theorem_kernel(soliton_model, -1.4, 0.9, 0.6, quad).value
    assert forward == pytest.approx(backward, abs=1e-7)


@pytest.mark.parametrize("method", ["TheoremQuad", "ClosedForm", "SpectralSum"])
def test_oscillator_kernel_symmetry(osc_model, quad, method):
    xs = np.array([0.9, -0.4, 1.7])
    ys = np.array([-1.4, 0.6])
    forward, _ = kernel_matrix(method, osc_model, xs, ys, 0.7, quad)
    backward, _ = kernel_matrix(method, osc_model, ys, xs, 0.7, quad)
    np.testing.assert_allclose(forward, backward.T, atol=1e-7)


def test_soliton_kernel_reduces_to_free_as_a_vanishes(soliton_transform):
    x = np.array([-1.0, 0.2, 1.5])
    value = soliton_kernel_closed(1e-6, soliton_transform.c, x, 0.4, 1.0).value
    np.testing.assert_allclose(value, free_propagator(x, 0.4, 1.0), atol=1e-5)


def test_untransformed_models_reduce_to_base_kernels(free_model, harmonic_model, quad):
    x = np.linspace(-2, 2, 5)
    np.testing.assert_allclose(theorem_kernel(free_model, x, 0.1, 0.4, quad).value, free_propagator(x, 0.1, 0.4))
    matrix, err = kernel_matrix(Method.CLOSED_FORM, harmonic_model, x, [0.1, 0.3], 0.4, quad)
    np.testing.assert_allclose(matrix, osc_propagator(x[:, None], np.array([0.1, 0.3])[None, :], 0.4))
    assert err == 0.0


def test_singular_times_are_rejected(soliton_model, osc_model, quad):
    with pytest.raises(SingularTimeError):
        soliton_kernel_closed(1.0, soliton_model.fact.c, 0.0, 0.0, 0.0)
    with pytest.raises(SingularTimeError):
        oscillator_kernel_closed(2j, 0.0, 0.0, 4.0, quad)
    with pytest.raises(SingularTimeError):
        theorem_kernel(osc_model, 0.0, 0.0, np.pi, quad)


def test_kernel_eval_validates_error_estimate():
    with pytest.raises(ValueError):
        KernelEval(1.0 + 0j, -1.0, Method.CLOSED_FORM)
    with pytest.raises(ValueError):
        KernelEval(1.0 + 0j, np.nan, Method.CLOSED_FORM)


def test_threaded_matrix_matches_serial(soliton_model, quad):
    xs = np.array([-1.0, 0.0, 1.5])
    ys = np.array([-0.5, 0.5, 1.0])
    serial, _ = theorem_kernel_matrix(soliton_model, xs, ys, 0.7, quad, threads=1)
    threaded, _ = theorem_kernel_matrix(soliton_model, xs, ys, 0.7, quad, threads=3)
    np.testing.assert_array_equal(serial, threaded)
    np.testing.assert_allclose(serial[1, 2], theorem_kernel(soliton_model, 0.0, 1.0, 0.7, quad).value)


# ### spectral sums


def test_spectral_kernel_flags_truncation(osc_model, free_model):
    result = spectral_kernel(osc_model, 16, np.array([0.1, 0.4]), 0.2, 0.7)
    assert result.truncated and result.method is Method.SPECTRAL_SUM
    matrix, _ = kernel_matrix("SpectralSum", osc_model, [0.1, 0.4], [0.2, -0.3, 0.0], 0.7, n_terms=16)
    assert matrix.shape == (2, 3)
    np.testing.assert_allclose(matrix[:, 0], result.value)
    with pytest.raises(ValueError):
        spectral_kernel(free_model, 16, 0.0, 0.0, 0.7)
    with pytest.raises(ValueError):
        kernel_matrix("OracleCN", osc_model, [0.0], [0.0], 0.7)


def test_expansion_coefficients_of_an_eigenfunction(osc_model):
    grid = Grid1D.from_spacing(-15.0, 15.0, 0.02)
    phi = osc_model.eigenfunction(2, grid.points)
    coefficients, bound = expansion_coefficients(osc_model, phi, grid, 6)
    np.testing.assert_allclose(coefficients, np.eye(6)[2], atol=1e-10)
    assert abs(bound) < 1e-10


# ### state propagation


def test_soliton_bound_state_only_acquires_a_phase(soliton_model, quad):
    grid = Grid1D.from_spacing(-25.0, 25.0, 0.05)
    phi = soliton_model.bound_state(grid.points)
    state = propagate_state(Method.CLOSED_FORM, soliton_model, phi, grid, 0.7, quad)
    np.testing.assert_allclose(state, np.exp(0.7j) * phi, atol=TOL_PHASE)


def test_spectral_propagation_of_an_eigenfunction(osc_model, quad):
    grid = Grid1D.from_spacing(-15.0, 15.0, 0.02)
    phi = osc_model.eigenfunction(3, grid.points)
    state = propagate_state("SpectralSum", osc_model, phi, grid, 0.7, quad, n_terms=8)
    np.testing.assert_allclose(state, np.exp(-3.5j * 0.7) * phi, atol=1e-8)


def test_oscillator_methods_agree(osc_model, quad):
    grid = Grid1D.from_spacing(-9.0, 9.0, 0.2)
    packet = gaussian_packet(grid.points, 1.0, 1.0)
    closed = propagate_state("ClosedForm", osc_model, packet, grid, 0.7, quad, threads=2)
    spectral = propagate_state("SpectralSum", osc_model, packet, grid, 0.7, quad, n_terms=64)
    np.testing.assert_allclose(closed, spectral, atol=1e-5)


def test_tail_mass_guard(free_model, quad):
    grid = Grid1D.from_spacing(-5.0, 5.0, 0.05)
    packet = gaussian_packet(grid.points, 4.5, 1.0)
    assert tail_mass(packet, grid) > quad.abs_tol
    with pytest.raises(DomainTooSmallError):
        propagate_state("ClosedForm", free_model, packet, grid, 0.5, quad)


def test_oracle_is_not_a_kernel_source(osc_model, quad):
    grid = Grid1D.from_spacing(-8.0, 8.0, 0.1)
    with pytest.raises(ValueError):
        propagate_state("OracleCN", osc_model, gaussian_packet(grid.points, 0.0, 1.0), grid, 0.5, quad)
