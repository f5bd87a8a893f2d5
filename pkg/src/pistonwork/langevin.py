"""Overdamped Langevin dynamics of the piston: the dynamical cross-check.

Starting from the dimensional equation of motion

    gamma dX/dt = kappa*X_M - F0 + N*kBT/X + sqrt(2*gamma*kBT) xi(t)

(the gas pushes with N*kBT/X, the load presses with F0 shifted by the
membrane coupling), rescale position by L = N*kBT/F0 and time by gamma*L/F0,
i.e. x = X/L and tau = t*F0/(gamma*L).  Every dimensional constant drops
out and the reduced dynamics reads

    dx/dtau = -alpha + 1/x + sqrt(2/N) xi(tau).

Its stationary density is exactly the Gamma equilibrium law
x^N exp(-alpha*N*x)(alpha*N)^(N+1)/Gamma(N+1), which is what `run` verifies
empirically (moments + Kolmogorov-Smirnov).  The noise term scales as
sqrt(2/N) because the potential is measured in units of N*kBT while the bath
temperature stays kBT.

Walkers are independent: walker w draws all of its noise from the
counter-based stream (seed, w), so ensembles can execute in any order or in
parallel and reproduce the same summary bit-for-bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import equilibrium, rng
from .errors import InvalidParameterError, NoStationaryStateError

# Per-walker noise is drawn in blocks of this many steps; the sequence seen
# by a walker is independent of the block size.
_NOISE_BLOCK = 4096

BOUNDARY_POLICIES = ("reject-step",)


@dataclass(frozen=True)
class LangevinConfig:
    """Integration plan for one stationary-state run.

    samples counts retained draws per walker, so the summary sees
    samples * ensemble values in total.  dt must respect the stability bound
    dt <= 0.1/(alpha*N); the shipped default (see plan_run) is half that.
    """

    n_particles: int
    alpha: float
    dt: float
    burn_in: int
    samples: int
    thin: int
    ensemble: int
    seed: int
    x0: float
    boundary: str = "reject-step"

    def __post_init__(self):
        if int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise InvalidParameterError("n_particles must be an integer >= 1")
        if self.alpha <= 0:
            raise NoStationaryStateError("langevin requires alpha > 0")
        if self.dt <= 0:
            raise InvalidParameterError("dt must be positive")
        if self.dt > 0.1 / (self.alpha * self.n_particles) * (1 + 1e-12):
            raise InvalidParameterError(
                f"dt = {self.dt:g} violates the stability bound "
                f"0.1/(alpha*N) = {0.1/(self.alpha*self.n_particles):g}"
            )
        if self.x0 <= 0:
            raise InvalidParameterError("x0 must be positive")
        if self.burn_in < 0 or self.samples < 1 or self.thin < 1 or self.ensemble < 1:
            raise InvalidParameterError("burn_in/samples/thin/ensemble out of range")
        if self.boundary not in BOUNDARY_POLICIES:
            raise InvalidParameterError(
                f"unknown boundary policy '{self.boundary}'"
            )


@dataclass(frozen=True)
class EnsembleSummary:
    """Empirical stationary statistics of one run."""

    mean: float
    variance: float
    snr: float
    ks_statistic: float
    retained: int
    rejected_steps: int
    mean_stderr: float
    variance_stderr: float
    warning: str | None = None


def relaxation_steps(n_particles, alpha, dt):
    """Steps per relaxation time 1/alpha^2 of the linearized dynamics."""
    return max(1, math.ceil(1.0 / (alpha * alpha * dt)))


def plan_run(n_particles, alpha, total_samples, seed, dt=None, ensemble=None,
             burn_in=None, thin=None, x0=None):
    """Fill a LangevinConfig with conservative defaults.

    dt defaults to 0.05/(alpha*N) (half the stability bound); thinning is
    three relaxation times so retained samples are close to independent;
    burn-in is eight relaxation times.  total_samples is the retained total
    across the ensemble (split evenly, rounded up).
    """
    if total_samples < 1:
        raise InvalidParameterError("total_samples must be >= 1")
    if dt is None:
        dt = 0.05 / (alpha * n_particles)
    relax = relaxation_steps(n_particles, alpha, dt)
    if ensemble is None:
        ensemble = min(1000, total_samples)
    per_walker = -(-total_samples // ensemble)
    if thin is None:
        thin = 3 * relax
    if burn_in is None:
        burn_in = 8 * relax
    if x0 is None:
        x0 = 1.0 / alpha
    return LangevinConfig(
        n_particles=n_particles,
        alpha=alpha,
        dt=dt,
        burn_in=burn_in,
        samples=per_walker,
        thin=thin,
        ensemble=ensemble,
        seed=seed,
        x0=x0,
    )


def _advance(x, alpha, n_particles, dt, noise):
    """One explicit step with Gaussian increments; nonpositive proposals are
    rejected in place.  Works on scalars and arrays; returns (x', rejected)."""
    proposal = x + (-alpha + 1.0 / x) * dt + math.sqrt(2.0 * dt / n_particles) * noise
    bad = proposal <= 0.0
    if np.ndim(x) == 0:
        return (x, 1) if bad else (proposal, 0)
    return np.where(bad, x, proposal), int(np.count_nonzero(bad))


def step(x, alpha, n_particles, dt, noise):
    """Single update of the piston position (rejection returns x unchanged)."""
    if x <= 0:
        raise InvalidParameterError("step requires x > 0")
    return _advance(x, alpha, n_particles, dt, noise)[0]


def run(config, return_samples=False):
    """Integrate the ensemble and summarize its stationary statistics.

    All walkers advance together (vectorized over the ensemble axis); walker
    w consumes only the (seed, w) noise stream.  Returns the summary, or
    (summary, samples) with samples shaped (ensemble, samples) when
    return_samples is set.
    """
    walkers = config.ensemble
    per_walker = config.samples
    total_steps = config.burn_in + per_walker * config.thin
    generators = [rng.stream_generator(config.seed, w) for w in range(walkers)]
    x = np.full(walkers, float(config.x0))
    out = np.empty((walkers, per_walker))
    rejected = 0
    retained_count = 0
    done_steps = 0
    while done_steps < total_steps:
        block = min(_NOISE_BLOCK, total_steps - done_steps)
        noise = np.stack([g.standard_normal(block) for g in generators])
        for j in range(block):
            x, nrej = _advance(x, config.alpha, config.n_particles, config.dt,
                               noise[:, j])
            rejected += nrej
            done_steps += 1
            past_burn = done_steps - config.burn_in
            if past_burn > 0 and past_burn % config.thin == 0:
                out[:, retained_count] = x
                retained_count += 1
    assert retained_count == per_walker

    flat = out.ravel()
    retained = flat.size
    mean = float(flat.mean())
    variance = float(flat.var(ddof=1))
    walker_means = out.mean(axis=1)
    walker_vars = out.var(axis=1, ddof=1) if per_walker > 1 else np.zeros(walkers)
    if walkers > 1:
        mean_stderr = float(walker_means.std(ddof=1) / math.sqrt(walkers))
        variance_stderr = float(walker_vars.std(ddof=1) / math.sqrt(walkers))
    else:
        # single walker: fall back to the naive iid formulas
        mean_stderr = float(flat.std(ddof=1) / math.sqrt(retained))
        variance_stderr = float(
            flat.std(ddof=1) ** 2 * math.sqrt(2.0 / max(retained - 1, 1))
        )

    eq = equilibrium.GammaEquilibrium(config.n_particles, config.alpha)
    ks = ks_statistic(flat, eq)

    total = total_steps * walkers
    warning = None
    if rejected / total > 0.01:
        warning = (
            f"unstable-dt: {rejected}/{total} steps rejected (> 1%); "
            "reduce dt or raise x0"
        )
    summary = EnsembleSummary(
        mean=mean,
        variance=variance,
        snr=mean / math.sqrt(variance) if variance > 0 else math.inf,
        ks_statistic=ks,
        retained=retained,
        rejected_steps=rejected,
        mean_stderr=mean_stderr,
        variance_stderr=variance_stderr,
        warning=warning,
    )
    if return_samples:
        return summary, out
    return summary


def retained_step_indices(config):
    """Global step index of each retained sample (for raw dumps)."""
    return [config.burn_in + (j + 1) * config.thin for j in range(config.samples)]


def ks_statistic(values, eq):
    """Kolmogorov-Smirnov distance between the sample and the Gamma law."""
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    cdf = equilibrium.gamma_cdf(v, eq)
    grid = np.arange(n, dtype=float)
    return float(np.max(np.maximum(cdf - grid / n, (grid + 1.0) / n - cdf)))


def ks_critical_value(n, significance=0.01):
    """Asymptotic KS critical distance at the given significance level."""
    if n < 1:
        raise InvalidParameterError("need at least one sample")
    return math.sqrt(-0.5 * math.log(significance / 2.0)) / math.sqrt(n)
