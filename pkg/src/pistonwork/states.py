"""Slope distributions p(alpha) induced on the piston potential by the membrane.

After the radiation state is swapped onto the membrane, the membrane's
position statistics show up downstream only through the distribution of the
dimensionless slope alpha.  Three families cover every state compared here:

  Gaussian(alpha0, epsilon)            displaced / thermal / squeezed membranes
  Fock(n)                              number states: the oscillator position
                                       density with vacuum std 1, centered at 1
  PhaseRandomizedCoherent(nbar, tau)   coherent state with Gaussian phase jitter

Densities are honest probability densities on the whole real line; the
rectification to alpha > 0 (discarding non-confining realizations) is owned by
the `work` module, not here.

Every family also knows how to draw exact samples from itself given a
numpy Generator, which the Monte Carlo work path uses.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import roots_hermite

from . import quad
from .errors import DegenerateDistributionError, InvalidParameterError

_SQRT2 = math.sqrt(2.0)

# Gauss-Legendre composite rule for the phase average: 512 panels x 10 nodes
# on the scaled phase u = phi/tau, |u| <= 8 (the phase weight is a unit
# Gaussian in u, so the truncated tail is ~1e-15 of the mass).
_PANELS = 512
_NODES_PER_PANEL = 10


def _composite_gauss_legendre(lo, hi, panels, nodes):
    base_x, base_w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    w = (half[:, None] * base_w[None, :]).ravel()
    return x, w


_PHASE_U, _PHASE_W = _composite_gauss_legendre(-8.0, 8.0, _PANELS, _NODES_PER_PANEL)
# Fold the unit-Gaussian phase weight and the 1/(2*pi) prefactor (phase
# normalization x position normalization) into the quadrature weights.
_PHASE_COEFF = _PHASE_W * np.exp(-0.5 * _PHASE_U**2) / (2.0 * math.pi)


def _log_abs_hermite(n, z):
    """(log|H_n(z)|, sign) via the three-term recurrence, scalar z.

    Magnitudes overflow float64 near n ~ 150 for large z, so the mantissa is
    renormalized whenever it passes 1e100 and the shed factor accumulates in
    log space.
    """
    if n == 0:
        return 0.0, 1.0
    h_prev, h = 1.0, 2.0 * z
    shift = 0.0
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
        if abs(h) > 1e100:
            h_prev *= 1e-100
            h *= 1e-100
            shift += math.log(1e100)
    if h == 0.0:
        return -math.inf, 0.0
    return math.log(abs(h)) + shift, math.copysign(1.0, h)


def _log_abs_hermite_array(n, z):
    """Vectorized counterpart of _log_abs_hermite for 1-D arrays."""
    z = np.asarray(z, dtype=float)
    if n == 0:
        return np.zeros_like(z), np.ones_like(z)
    h_prev, h = np.ones_like(z), 2.0 * z
    shift = np.zeros_like(z)
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
        big = np.abs(h) > 1e100
        if big.any():
            h_prev = np.where(big, h_prev * 1e-100, h_prev)
            h = np.where(big, h * 1e-100, h)
            shift = np.where(big, shift + math.log(1e100), shift)
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(h)) + shift
    return log_mag, np.sign(h)


@dataclass(frozen=True)
class Gaussian:
    """Normal slope law; epsilon == 0 marks the degenerate point mass."""

    alpha0: float
    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.alpha0):
            raise InvalidParameterError("alpha0 must be finite")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise InvalidParameterError("epsilon must be >= 0")

    @property
    def is_point_mass(self):
        return self.epsilon == 0.0

    def density(self, alpha):
        if self.is_point_mass:
            raise DegenerateDistributionError(
                "zero-width Gaussian has no pointwise density; "
                "use the point-mass code path"
            )
        z = (alpha - self.alpha0) / self.epsilon
        if abs(z) > 40.0:
            return 0.0
        return math.exp(-0.5 * z * z) / (quad.SQRT_2PI * self.epsilon)

    def support_window(self):
        """Interval outside which density() returns exactly 0."""
        return (self.alpha0 - 40.0 * self.epsilon, self.alpha0 + 40.0 * self.epsilon)

    def quad_points(self):
        """Abscissas adaptive rules should honor (peak and inflections)."""
        if self.is_point_mass:
            return []
        return [
            self.alpha0 - self.epsilon,
            self.alpha0,
            self.alpha0 + self.epsilon,
        ]

    def sample(self, generator, size):
        if self.is_point_mass:
            return np.full(size, self.alpha0)
        return self.alpha0 + self.epsilon * generator.standard_normal(size)


@dataclass(frozen=True)
class Fock:
    """Slope law of a membrane prepared in the n-th number state."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParameterError("Fock index n must be an integer >= 0")
        object.__setattr__(self, "n", int(self.n))

    @cached_property
    def _log_norm(self):
        # 2^n n! sqrt(2*pi): normalization of H_n(z)^2 exp(-z^2) dz in alpha units
        return self.n * math.log(2.0) + quad.log_factorial(self.n) + 0.5 * math.log(
            2.0 * math.pi
        )

    def density(self, alpha):
        z = (alpha - 1.0) / _SQRT2
        log_h, sign = _log_abs_hermite(self.n, z)
        if sign == 0.0:
            return 0.0
        log_p = 2.0 * log_h - z * z - self._log_norm
        return math.exp(log_p) if log_p > -745.0 else 0.0

    def density_array(self, alpha):
        z = (np.asarray(alpha, dtype=float) - 1.0) / _SQRT2
        log_h, _ = _log_abs_hermite_array(self.n, z)
        log_p = 2.0 * log_h - z * z - self._log_norm
        return np.where(log_p > -745.0, np.exp(np.maximum(log_p, -745.0)), 0.0)

    def support_window(self):
        half = _SQRT2 * (math.sqrt(2.0 * self.n + 1.0) + 8.0)
        return (1.0 - half, 1.0 + half)

    def quad_points(self):
        """Zeros of the density (the Hermite nodes) in slope units."""
        if self.n == 0:
            return [1.0]
        zeros = roots_hermite(self.n)[0]
        return [1.0] + list(1.0 + _SQRT2 * zeros)

    def sample(self, generator, size):
        """Draw from the density by uniform-envelope rejection.

        The envelope uses the global bound H_n(z)^2 e^{-z^2} <= 1.0865^2 *
        2^n n!, i.e. density <= 0.4710 everywhere, over the support window
        (truncated mass < 1e-28).
        """
        lo, hi = self.support_window()
        bound = 0.4710
        rate = 1.0 / (bound * (hi - lo))
        out = np.empty(0)
        while out.size < size:
            todo = size - out.size
            block = int(todo / rate * 1.3) + 64
            pos = generator.uniform(lo, hi, block)
            height = generator.uniform(0.0, bound, block)
            accepted = pos[height <= self.density_array(pos)]
            out = np.concatenate([out, accepted])
        return out[:size]


@dataclass(frozen=True)
class PhaseRandomizedCoherent:
    """Coherent state whose phase carries Gaussian jitter of std tau.

    The slope density is the phase average of unit-width Gaussians centered
    at 1 + 2*sqrt(nbar)*cos(phi); the average is evaluated on a fixed
    composite Gauss-Legendre rule in the scaled phase u = phi/tau, which
    stays accurate uniformly in tau (including tau -> 0+).
    """

    nbar: float
    tau: float

    def __post_init__(self):
        if not np.isfinite(self.nbar) or self.nbar < 0:
            raise InvalidParameterError("nbar must be >= 0")
        if not np.isfinite(self.tau) or self.tau <= 0:
            raise InvalidParameterError("tau must be > 0")

    @cached_property
    def _centers(self):
        return 1.0 + 2.0 * math.sqrt(self.nbar) * np.cos(self.tau * _PHASE_U)

    def density(self, alpha):
        d = alpha - self._centers
        return float(np.sum(_PHASE_COEFF * np.exp(-0.5 * d * d)))

    def support_window(self):
        reach = 2.0 * math.sqrt(self.nbar)
        return (1.0 - reach - 12.0, 1.0 + reach + 12.0)

    def quad_points(self):
        reach = 2.0 * math.sqrt(self.nbar)
        return [1.0 - reach, 1.0, 1.0 + reach]

    def sample(self, generator, size):
        """Exact draws via the compound representation: a Gaussian phase
        composed with a unit Gaussian position."""
        phase = self.tau * generator.standard_normal(size)
        noise = generator.standard_normal(size)
        return 1.0 + 2.0 * math.sqrt(self.nbar) * np.cos(phase) + noise


# Tagged union of the supported families.
AlphaDistribution = Gaussian | Fock | PhaseRandomizedCoherent

PRESET_KINDS = ("coherent", "thermal", "squeezed", "fock", "phase-randomized")

_KIND_ALIASES = {
    "squeezedcoherent": "squeezed",
    "squeezed-coherent": "squeezed",
    "phaserandomized": "phase-randomized",
    "phase_randomized": "phase-randomized",
}


@dataclass(frozen=True)
class StatePreset:
    """Named radiation state, parameterized by mean photon number."""

    kind: str
    nbar: float | None = None
    n: int | None = None
    r: float | None = None
    tau: float | None = None


def _require(value, name, kind):
    if value is None:
        raise InvalidParameterError(f"preset '{kind}' requires parameter {name}")
    return value


def from_preset(preset):
    """Map a named radiation state to its slope distribution."""
    kind = preset.kind.lower()
    kind = _KIND_ALIASES.get(kind, kind)
    if kind == "coherent":
        nbar = _require(preset.nbar, "nbar", kind)
        if nbar < 0:
            raise InvalidParameterError("nbar must be >= 0")
        return Gaussian(1.0 + 2.0 * math.sqrt(nbar), 1.0)
    if kind == "thermal":
        nbar = _require(preset.nbar, "nbar", kind)
        if nbar < 0:
            raise InvalidParameterError("nbar must be >= 0")
        return Gaussian(1.0, math.sqrt(1.0 + 2.0 * nbar))
    if kind == "squeezed":
        nbar = _require(preset.nbar, "nbar", kind)
        r = _require(preset.r, "r", kind)
        displacement = nbar - math.sinh(r) ** 2
        if displacement < 0:
            raise InvalidParameterError(
                f"squeezed preset needs nbar >= sinh(r)^2 = {math.sinh(r)**2:.6g}"
            )
        return Gaussian(1.0 + 2.0 * math.sqrt(displacement), math.exp(-r))
    if kind == "fock":
        return Fock(_require(preset.n, "n", kind))
    if kind == "phase-randomized":
        return PhaseRandomizedCoherent(
            _require(preset.nbar, "nbar", kind), _require(preset.tau, "tau", kind)
        )
    raise InvalidParameterError(
        f"unknown preset kind '{preset.kind}'; expected one of {PRESET_KINDS}"
    )


def coherent(nbar):
    return from_preset(StatePreset("coherent", nbar=nbar))


def thermal(nbar):
    return from_preset(StatePreset("thermal", nbar=nbar))


def squeezed_coherent(nbar, r):
    return from_preset(StatePreset("squeezed", nbar=nbar, r=r))


def fock(n):
    return from_preset(StatePreset("fock", n=n))


def phase_randomized(nbar, tau):
    return from_preset(StatePreset("phase-randomized", nbar=nbar, tau=tau))


def moments(dist):
    """(mean, variance) of the slope law by adaptive quadrature.

    The point mass returns its exact (alpha0, 0).
    """
    if isinstance(dist, Gaussian) and dist.is_point_mass:
        return dist.alpha0, 0.0
    lo, hi = dist.support_window()
    pts = dist.quad_points()
    mean = quad.integrate(lambda a: a * dist.density(a), lo, hi, tol=1e-12, points=pts).value
    var = quad.integrate(
        lambda a: (a - mean) ** 2 * dist.density(a), lo, hi, tol=1e-12, points=pts
    ).value
    return mean, var
