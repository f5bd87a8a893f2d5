"""Isothermal work extracted by the piston, averaged over slope statistics.

A run with slope alpha > 0 extracts normalized work w(alpha) = -ln(alpha) in
the thermodynamic limit; the fluctuating (finite-N) piston picks up the
factor (N+1)/N.  Runs with alpha <= 0 never equilibrate and are discarded,
so reported averages are conditioned on the success subensemble of
probability p_s (divide the raw slope average by p_s).  Whole-ensemble
figures are just w_bar * p_s; the CLI exposes that view behind a flag.

Two independent routes compute the same average: adaptive quadrature over the
slope density (mean_work) and conditioned Monte Carlo over exact slope
samples (mean_work_mc).  They share no numerics and cross-validate each
other in the tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import quad, rng, states
from .errors import (
    InvalidParameterError,
    NoStableEnsembleError,
    NoStationaryStateError,
)

# The |ln alpha| end of the slope integral is split at this point and the
# (0, SLICE] piece is integrated in the substituted variable u = -ln(alpha).
SLICE = 1e-6

# Monte Carlo samples are filled in fixed-size chunks; chunk c consumes only
# the (seed, c) random stream, so any chunk-parallel schedule reproduces the
# serial result bit-for-bit.
_MC_CHUNK = 1 << 16

_NEAR_ZERO = (1e-5, 1e-4, 1e-3, 1e-2, 0.1)


@dataclass(frozen=True)
class WorkResult:
    """Mean work conditioned on success, with its provenance data.

    n_correction is the Brownian-piston factor (N+1)/N (1 in the
    thermodynamic limit); quad_error propagates the quadrature error
    estimate, mc_stderr / mc_trials describe the Monte Carlo route.
    """

    w_bar: float
    p_s: float
    n_correction: float
    quad_error: float | None = None
    mc_stderr: float | None = None
    mc_trials: int | None = None


def _brownian_factor(n_particles):
    """(N+1)/N, or exactly 1 for the thermodynamic limit (None)."""
    if n_particles is None:
        return 1.0
    if int(n_particles) != n_particles or n_particles < 1:
        raise InvalidParameterError("particle count must be an integer >= 1 or None")
    return (n_particles + 1) / n_particles


def work_deterministic(alpha):
    """Normalized quasistatic work -ln(alpha) for a fixed confining slope."""
    if alpha <= 0:
        raise NoStationaryStateError("work requires alpha > 0")
    return -math.log(alpha)


def work_finite_n(alpha, n_particles):
    """Work with the fluctuating-piston correction, -((N+1)/N) ln(alpha)."""
    if alpha <= 0:
        raise NoStationaryStateError("work requires alpha > 0")
    return -_brownian_factor(n_particles) * math.log(alpha)


def delta_work_check(alpha, n_particles):
    """Work rebuilt by integrating the mean piston position over the slope.

    Quadrature of <x>(a) = (N+1)/(a*N) along the path from alpha to 1;
    must reproduce work_finite_n(alpha) — the consistency check between the
    incremental and closed-form work expressions.
    """
    if alpha <= 0:
        raise NoStationaryStateError("work requires alpha > 0")
    c = _brownian_factor(n_particles)
    if alpha == 1.0:
        return 0.0
    mean_position = lambda a: c / a
    if alpha < 1.0:
        return quad.integrate(mean_position, alpha, 1.0, tol=1e-13).value
    return -quad.integrate(mean_position, 1.0, alpha, tol=1e-13).value


def mean_potential_energy(alpha, n_particles):
    """<alpha*x - ln x> in the stationary state.

    Closed form (N+1)/N - digamma(N+1) + ln(alpha*N); the thermodynamic
    limit (None) gives 1 + ln(alpha), the potential at its minimum plus the
    unit of compression energy.
    """
    if alpha <= 0:
        raise NoStationaryStateError("mean potential energy requires alpha > 0")
    if n_particles is None:
        return 1.0 + math.log(alpha)
    c = _brownian_factor(n_particles)
    n = int(n_particles)
    return c - quad.digamma(n + 1.0) + math.log(alpha * n)


def success_probability(dist):
    """Mass of the slope law above 0: the fraction of stable runs.

    Gaussian slopes use the erf closed form; other families integrate their
    density (the closed form is cross-checked against quadrature in tests).
    """
    if isinstance(dist, states.Gaussian):
        if dist.is_point_mass:
            return 1.0 if dist.alpha0 > 0 else 0.0
        return 0.5 * (1.0 + quad.erf(dist.alpha0 / (math.sqrt(2.0) * dist.epsilon)))
    lo, hi = dist.support_window()
    if hi <= 0.0:
        return 0.0
    value = quad.integrate(
        dist.density, max(lo, 0.0), hi, tol=1e-12, points=dist.quad_points()
    ).value
    return min(max(value, 0.0), 1.0)


def mean_work(dist, n_particles=None, tol=1e-12):
    """Mean extracted work over the success subensemble, by quadrature.

    w_bar = -c * int_0^inf ln(a) p(a) da / p_s.  The integrable ln
    singularity at a = 0 is handled by splitting at SLICE and integrating
    the lower piece in u = -ln(a).
    """
    c = _brownian_factor(n_particles)
    if isinstance(dist, states.Gaussian) and dist.is_point_mass:
        if dist.alpha0 <= 0:
            raise NoStableEnsembleError("point mass at nonpositive slope")
        return WorkResult(-c * math.log(dist.alpha0), 1.0, c, quad_error=0.0)
    p_s = success_probability(dist)
    if p_s <= 0.0:
        raise NoStableEnsembleError("slope distribution has no mass above 0")

    lo, hi = dist.support_window()
    lo = max(lo, SLICE)
    core_value = core_error = 0.0
    if hi > lo:
        pts = list(_NEAR_ZERO) + list(dist.quad_points())

        def integrand(alpha):
            p = dist.density(alpha)
            return math.log(alpha) * p if p != 0.0 else 0.0

        core = quad.integrate(integrand, lo, hi, tol=tol, points=pts)
        core_value, core_error = core.value, core.error_estimate

    slice_value = slice_error = 0.0
    if dist.density(SLICE) > 0.0 or dist.density(0.5 * SLICE) > 0.0:
        # int_0^SLICE ln(a) p(a) da = -int_{u0}^inf u p(e^-u) e^-u du
        u0 = -math.log(SLICE)

        def tail(u):
            a = math.exp(-u)
            return u * dist.density(a) * a

        piece = quad.integrate_semi_infinite(tail, u0, tol=max(tol, 1e-13))
        slice_value, slice_error = -piece.value, piece.error_estimate

    integral = core_value + slice_value
    return WorkResult(
        w_bar=-c * integral / p_s,
        p_s=p_s,
        n_correction=c,
        quad_error=c * (core_error + slice_error) / p_s,
    )


def mean_work_mc(dist, n_particles=None, samples=100_000, seed=0):
    """Mean extracted work by conditioned Monte Carlo.

    Draws exact slope samples, discards a <= 0 (the acceptance rate is the
    p_s estimate), and averages work_finite_n over the survivors.  Sampling
    is chunked: chunk c uses only the (seed, c) stream — see _MC_CHUNK.
    """
    if samples < 2 or int(samples) != samples:
        raise InvalidParameterError("samples must be an integer >= 2")
    samples = int(samples)
    c = _brownian_factor(n_particles)
    if isinstance(dist, states.Gaussian) and dist.is_point_mass:
        if dist.alpha0 <= 0:
            raise NoStableEnsembleError("point mass at nonpositive slope")
        return WorkResult(
            -c * math.log(dist.alpha0), 1.0, c, mc_stderr=0.0, mc_trials=samples
        )

    accepted_chunks = []
    trials = 0
    filled = 0
    chunk_index = 0
    while filled < samples:
        goal = min(_MC_CHUNK, samples - filled)
        generator = rng.stream_generator(seed, chunk_index)
        chunk_index += 1
        got = 0
        proposals_here = 0
        while got < goal:
            block = 4 * (goal - got) + 256
            draws = dist.sample(generator, block)
            proposals_here += block
            positive = draws > 0.0
            hits = int(np.count_nonzero(positive))
            if got + hits >= goal:
                # count trials only up to the draw completing this chunk
                need = goal - got
                cutoff = int(np.nonzero(np.cumsum(positive) == need)[0][0])
                kept = draws[: cutoff + 1][positive[: cutoff + 1]]
                trials += cutoff + 1
                accepted_chunks.append(kept)
                got += need
            else:
                trials += block
                accepted_chunks.append(draws[positive])
                got += hits
            if proposals_here > 10_000_000:
                raise NoStableEnsembleError(
                    "Monte Carlo acceptance rate too low "
                    f"({got}/{proposals_here} in one chunk)"
                )
        filled += goal

    alphas = np.concatenate(accepted_chunks)
    w = -c * np.log(alphas)
    stderr = float(np.std(w, ddof=1) / math.sqrt(samples))
    return WorkResult(
        w_bar=float(np.mean(w)),
        p_s=samples / trials,
        n_correction=c,
        mc_stderr=stderr,
        mc_trials=trials,
    )


def coherent_asymptote(nbar):
    """Large-photon-number limit of the coherent-state mean work."""
    if nbar <= 0:
        raise InvalidParameterError("asymptote defined for nbar > 0")
    return -math.log1p(2.0 * math.sqrt(nbar))
