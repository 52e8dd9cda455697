# utils/errors.py
"""Exception hierarchy shared by the numerical core and the CLI.

Every error carries a short ``code`` so the propagator command can record a
failed lattice point as a flagged row instead of aborting the run.
"""

from typing import Optional


class PropagatorError(Exception):
    """Base class for every error raised by this package."""

    code = "error"


class FaddeevaRangeError(PropagatorError, ArithmeticError):
    """w(z) requested where e^{-z^2} overflows double precision."""

    code = "faddeeva_range"


class SingularTimeError(PropagatorError, ValueError):
    """Kernel requested at a caustic or outside its branch cell."""

    code = "singular_time"


class SpectralBoundaryError(PropagatorError, ValueError):
    """Resolvent requested on the continuous spectrum [0, inf)."""

    code = "spectral_boundary"


class UnsupportedEnergyError(PropagatorError, ValueError):
    """Closed-form Green function or Jost pair not available at this energy."""

    code = "unsupported_energy"


class RealZeroRiskError(PropagatorError, ValueError):
    """Transformation parameters allow u to vanish on the real line."""

    code = "real_zero_risk"


class NearZeroError(PropagatorError, ArithmeticError):
    """|u(x)| fell below the relative threshold at a sampled point."""

    code = "near_zero"


class NoBoundStateError(PropagatorError, ValueError):
    code = "no_bound_state"


class DegenerateNormalizationError(PropagatorError, ArithmeticError):
    code = "degenerate_normalization"


class DivergenceError(PropagatorError, ArithmeticError):
    """Integrand tail is not negligible at the edge of the window."""

    code = "divergence"


class QuadratureError(PropagatorError, ArithmeticError):
    """Adaptive quadrature failed; keeps the best estimate it reached."""

    code = "quadrature"

    def __init__(self, message: str, estimate=None, error: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DomainTooSmallError(PropagatorError, ValueError):
    code = "domain_too_small"


class ResolutionError(PropagatorError, ValueError):
    code = "resolution"


class GridMismatchError(PropagatorError, ValueError):
    code = "grid_mismatch"


class ConfigError(PropagatorError, ValueError):
    """Invalid scenario file; ``field`` and ``line`` locate the problem."""

    code = "config"

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.field = field
        self.line = line
