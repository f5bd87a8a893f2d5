"""Adaptive quadrature and the special functions the model leans on.

Thin, contract-stable wrappers: `integrate` drives an adaptive interval
subdivision with an embedded Gauss-Kronrod error estimate (QUADPACK), and the
special functions delegate to scipy.special.  Keeping the package behind this
surface pins down error handling (everything funnels into the package error
taxonomy) and gives a single place to tighten tolerances.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sci_integrate
from scipy import special as _sci_special

from .errors import DomainError, IntegrationFailureError, InvalidParameterError

# Default absolute/relative tolerance.  Nested integrands (a quadrature whose
# integrand itself runs a quadrature) should pass 1e-8 to keep the inner noise
# below the outer error estimate.
DEFAULT_TOL = 1e-10
NESTED_TOL = 1e-8


@dataclass(frozen=True)
class IntegrationResult:
    """Value, error estimate, and cost of one adaptive integration."""

    value: float
    error_estimate: float
    evaluations: int


def integrate(f, a, b, tol=DEFAULT_TOL, points=None):
    """Integrate f over the finite interval (a, b).

    points, when given, lists interior abscissas (peaks, kinks, zeros of the
    integrand) that the subdivision must honor; entries outside (a, b) are
    ignored.  Integrable endpoint singularities (e.g. ln x at 0) are handled
    by the underlying extrapolation.

    Raises IntegrationFailureError when the requested tolerance is not
    reached; the exception carries the best estimate found.
    """
    if not np.isfinite(a) or not np.isfinite(b) or not a < b:
        raise InvalidParameterError(f"need finite bounds with a < b, got ({a}, {b})")
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    interior = None
    if points is not None:
        interior = sorted(float(p) for p in points if a < p < b)
        if not interior:
            interior = None
    limit = 200 if interior is None else max(200, 10 * len(interior))
    out = _sci_integrate.quad(
        f, a, b, epsabs=tol, epsrel=tol, limit=limit, points=interior, full_output=1
    )
    value, error_estimate = out[0], out[1]
    if len(out) > 3:
        raise IntegrationFailureError(
            f"quadrature on ({a}, {b}) did not converge: {out[3]}",
            best_estimate=value,
            error_estimate=error_estimate,
        )
    return IntegrationResult(
        value=float(value),
        error_estimate=float(error_estimate),
        evaluations=int(out[2]["neval"]),
    )


def integrate_semi_infinite(f, a, tol=DEFAULT_TOL, points=None):
    """Integrate f over [a, +inf) via the map t = 1/(1 + x - a).

    The image interval is (0, 1]; dx = dt/t^2.  f must decay fast enough that
    the transformed integrand stays integrable (exponential or power decay
    faster than 1/x^2 both work).  points are x-space breakpoints and are
    mapped through the transform.
    """
    if not np.isfinite(a):
        raise InvalidParameterError("lower bound must be finite")

    def transformed(t):
        x = a + (1.0 - t) / t
        return f(x) / (t * t)

    t_points = None
    if points is not None:
        t_points = [1.0 / (1.0 + p - a) for p in points if p > a]
    return integrate(transformed, 0.0, 1.0, tol=tol, points=t_points)


def log_gamma(x):
    """ln Gamma(x) for x > 0.  Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("log_gamma requires x > 0")
    out = _sci_special.gammaln(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def erf(x):
    """Error function.  Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    out = _sci_special.erf(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def digamma(x):
    """Logarithmic derivative of Gamma for x > 0.  Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("digamma requires x > 0")
    out = _sci_special.psi(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def regularized_lower_incomplete_gamma(s, x):
    """P(s, x) = gamma(s, x)/Gamma(s) for s > 0, x >= 0.  Array-friendly."""
    s_arr = np.asarray(s, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(s_arr <= 0):
        raise DomainError("regularized incomplete gamma requires s > 0")
    if np.any(x_arr < 0):
        raise DomainError("regularized incomplete gamma requires x >= 0")
    out = _sci_special.gammainc(s_arr, x_arr)
    scalar = (np.isscalar(s) or s_arr.ndim == 0) and (np.isscalar(x) or x_arr.ndim == 0)
    return float(out) if scalar else out


def log_factorial(n):
    """ln(n!) for integer n >= 0."""
    if n < 0 or int(n) != n:
        raise DomainError("log_factorial requires an integer n >= 0")
    return float(_sci_special.gammaln(n + 1.0))


SQRT_2PI = math.sqrt(2.0 * math.pi)
