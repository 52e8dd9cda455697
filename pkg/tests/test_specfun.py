import numpy as np
import pytest
from scipy import integrate, special

from models.grid import Grid1D
from models.oracle import apply_h_grid
from models.specfun import (
    OSC_GROUND_PREFACTOR,
    cerf,
    faddeeva_w,
    osc_eigenfunction,
    osc_eigenfunction_deriv,
    osc_eigenfunction_derivs,
    osc_eigenfunctions,
)
from utils.errors import FaddeevaRangeError

TOL = 1e-12
TOL_FD = 1e-6


def test_faddeeva_reference_values():
    np.testing.assert_allclose(faddeeva_w(1j), np.e * special.erfc(1.0), rtol=TOL)
    assert faddeeva_w(0.0) == pytest.approx(1.0)
    assert isinstance(faddeeva_w(0.5 + 0.5j), complex)


def test_faddeeva_vectorized_shape():
    z = np.linspace(-2, 2, 12).reshape(3, 4) + 0.3j
    assert faddeeva_w(z).shape == (3, 4)


def test_faddeeva_overflow_region_raises():
    with pytest.raises(FaddeevaRangeError):
        faddeeva_w(-30j)
    with pytest.raises(FaddeevaRangeError):
        faddeeva_w(np.array([0.0, np.nan]))


def test_faddeeva_lower_half_plane_inside_limit():
    z = 0.5 - 2.0j
    np.testing.assert_allclose(faddeeva_w(z), special.wofz(z), rtol=TOL)


def test_cerf_matches_real_erf():
    x = np.linspace(-6, 6, 121)
    value = cerf(x)
    np.testing.assert_allclose(value.real, special.erf(x), rtol=0, atol=1e-14)
    np.testing.assert_allclose(value.imag, 0.0, atol=1e-14)


def test_cerf_matches_scipy_complex_erf():
    re, im = np.meshgrid(np.linspace(-3, 3, 13), np.linspace(-3, 3, 13))
    z = re + 1j * im
    np.testing.assert_allclose(cerf(z), special.erf(z), rtol=1e-11, atol=1e-13)


def test_cerf_is_bounded_and_real_on_the_real_axis():
    value = cerf(np.linspace(-30.0, 30.0, 601))
    assert np.all(np.abs(value) <= 1.0 + 1e-15)
    np.testing.assert_allclose(value.imag, 0.0, atol=1e-15)


def test_cerf_is_odd(rng):
    z = rng.uniform(-5, 5, 50) + 1j * rng.uniform(-5, 5, 50)
    np.testing.assert_allclose(cerf(-z), -cerf(z), rtol=0, atol=1e-13)


def test_cerf_far_left_half_plane_does_not_overflow():
    assert abs(cerf(-6.0 + 0.5j) + 1.0) < 1e-12
    assert isinstance(cerf(1.0 + 1.0j), complex)


def test_ground_state_prefactor():
    assert osc_eigenfunction(0, 0.0) == pytest.approx(OSC_GROUND_PREFACTOR, rel=TOL)
    assert isinstance(osc_eigenfunction(3, 0.2), float)


def test_eigenfunctions_orthonormal():
    x = np.linspace(-15, 15, 3001)
    table = osc_eigenfunctions(8, x)
    gram = integrate.simpson(table[:, None, :] * table[None, :, :], x=x, axis=-1)
    np.testing.assert_allclose(gram, np.eye(9), atol=1e-10)


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_eigenfunction_equation(n):
    grid = Grid1D.from_spacing(-10.0, 10.0, 0.01)
    x = grid.points
    psi = osc_eigenfunction(n, x)
    lhs = apply_h_grid(0.25 * x * x, psi, grid, order=4)
    np.testing.assert_allclose(lhs, (n + 0.5) * psi[2:-2], atol=TOL_FD)


def test_derivative_formula_matches_finite_differences():
    x = np.linspace(-4, 4, 17)
    h = 1e-5
    for n in range(6):
        fd = (osc_eigenfunction(n, x + h) - osc_eigenfunction(n, x - h)) / (2 * h)
        np.testing.assert_allclose(osc_eigenfunction_deriv(n, x), fd, atol=1e-8)
    assert osc_eigenfunction_derivs(5, x).shape == (6, 17)


def test_high_order_recurrence_stays_bounded():
    table = osc_eigenfunctions(200, np.array([0.0, 5.0, 20.0, 40.0]))
    assert np.all(np.isfinite(table))
    assert np.max(np.abs(table)) < 1.0


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        osc_eigenfunction(-1, 0.0)
    with pytest.raises(ValueError):
        osc_eigenfunctions(-1, 0.0)
