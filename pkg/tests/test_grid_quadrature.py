import numpy as np
import pytest

from models.grid import Grid1D
from models.quadrature import QuadratureSpec, integrate_complex
from utils.errors import GridMismatchError, QuadratureError


def test_grid_from_spacing():
    grid = Grid1D.from_spacing(-10.0, 10.0, 0.1)
    assert grid.n_points == 201
    assert grid.spacing == pytest.approx(0.1)
    assert grid.coordinate(100) == pytest.approx(0.0)
    assert grid.index_of(0.26) == 103
    with pytest.raises(IndexError):
        grid.index_of(11.0)


def test_refined_grid_is_nested():
    grid = Grid1D(-2.0, 2.0, 41)
    fine = grid.refined(4)
    assert fine.n_points == 161
    np.testing.assert_allclose(fine.points[::4], grid.points, atol=1e-15)


@pytest.mark.parametrize("bounds", [(1.0, 1.0, 11), (0.0, 1.0, 2), (0.0, np.inf, 11), (0.0, 1.0, 10.5)])
def test_grid_validation(bounds):
    with pytest.raises(ValueError):
        Grid1D(*bounds)


def test_grid_sample_check():
    grid = Grid1D(0.0, 1.0, 11)
    grid.check_samples(np.zeros(11), np.ones(11))
    with pytest.raises(GridMismatchError):
        grid.check_samples(np.zeros(11), np.zeros((11, 2)))


def test_quadrature_spec_validation():
    assert QuadratureSpec().tail_decades == pytest.approx(np.log(1e10))
    with pytest.raises(ValueError):
        QuadratureSpec(truncation_radius=-1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_complex_gaussian_integral():
    value, err = integrate_complex(lambda z: np.exp(1j * z - z * z), -10.0, 10.0, QuadratureSpec())
    assert complex(value) == pytest.approx(np.sqrt(np.pi) * np.exp(-0.25), abs=1e-10)
    assert 0.0 <= err < 1e-8


def test_array_valued_integrand_keeps_its_shape():
    moments = np.arange(6).reshape(2, 3)
    value, _ = integrate_complex(lambda z: z ** moments * (1 + 1j), 0.0, 1.0, QuadratureSpec())
    assert value.shape == (2, 3)
    np.testing.assert_allclose(value, (1 + 1j) / (moments + 1.0), rtol=1e-10)


def test_empty_interval_returns_zeros():
    value, err = integrate_complex(lambda z: np.ones(4) * z, 2.0, 2.0, QuadratureSpec())
    np.testing.assert_array_equal(value, np.zeros(4))
    assert err == 0.0


def test_non_convergence_raises_with_estimate():
    quad = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=2)
    with pytest.raises(QuadratureError) as info:
        integrate_complex(lambda z: np.exp(400j * z * z), 0.0, 20.0, quad)
    assert info.value.estimate is not None
    assert info.value.code == "quadrature"
