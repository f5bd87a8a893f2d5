import math

import numpy as np
import pytest

from pistonwork import quad, rng, states
from pistonwork.errors import DegenerateDistributionError, InvalidParameterError

SQRT_2PI = math.sqrt(2 * math.pi)


def normalization(dist):
    lo, hi = dist.support_window()
    res = quad.integrate(dist.density, lo, hi, tol=1e-10, points=dist.quad_points())
    return res.value


def test_gaussian_peak_value():
    g = states.Gaussian(1.0, 1.0)
    assert math.isclose(g.density(1.0), 1.0 / SQRT_2PI, rel_tol=1e-14)


def test_gaussian_density_formula():
    g = states.Gaussian(2.0, 0.7)
    for a in (-1.0, 0.0, 1.3, 2.0, 4.5):
        ref = math.exp(-0.5 * ((a - 2.0) / 0.7) ** 2) / (0.7 * SQRT_2PI)
        assert math.isclose(g.density(a), ref, rel_tol=1e-14)


def test_point_mass_rejects_pointwise_density():
    g = states.Gaussian(1.0, 0.0)
    assert g.is_point_mass
    with pytest.raises(DegenerateDistributionError):
        g.density(1.0)


def test_vacuum_number_state_is_unit_gaussian():
    f = states.Fock(0)
    g = states.Gaussian(1.0, 1.0)
    for a in np.linspace(-4.0, 6.0, 41):
        assert math.isclose(f.density(a), g.density(a), rel_tol=0, abs_tol=1e-14)


def test_zero_amplitude_phase_randomized_is_unit_gaussian():
    p = states.PhaseRandomizedCoherent(0.0, math.pi / 4)
    g = states.Gaussian(1.0, 1.0)
    for a in np.linspace(-4.0, 6.0, 21):
        assert math.isclose(p.density(a), g.density(a), rel_tol=0, abs_tol=1e-10)


def test_phase_randomized_density_vs_grid_oracle():
    """Independent dense trapezoid over the phase variable."""
    nbar, tau = 4.0, math.pi / 4
    p = states.PhaseRandomizedCoherent(nbar, tau)
    phis = np.linspace(-8 * tau, 8 * tau, 200001)
    weights = np.exp(-0.5 * (phis / tau) ** 2) / (tau * SQRT_2PI)
    for a in (0.0, 1.0, 2.5, 5.0):
        cond = np.exp(-0.5 * (a - 1.0 - 2 * math.sqrt(nbar) * np.cos(phis)) ** 2) / SQRT_2PI
        oracle = np.trapezoid(weights * cond, phis)
        assert math.isclose(p.density(a), float(oracle), rel_tol=0, abs_tol=1e-10)


def test_normalization_across_families():
    dists = [
        states.Gaussian(1.0, 1.0),
        states.Gaussian(1.5, 0.7),
        states.Gaussian(1.0, 3.0),
        states.Fock(1),
        states.Fock(3),
        states.Fock(10),
        states.PhaseRandomizedCoherent(4.0, math.pi / 4),
        states.PhaseRandomizedCoherent(2.0, 0.5),
    ]
    for d in dists:
        assert abs(normalization(d) - 1.0) < 1e-8


def test_phase_randomized_normalization_tight():
    p = states.PhaseRandomizedCoherent(4.0, math.pi / 4)
    assert abs(normalization(p) - 1.0) < 1e-6


def test_density_nonnegative():
    for d in (states.Gaussian(0.0, 2.0), states.Fock(5),
              states.PhaseRandomizedCoherent(9.0, 1.2)):
        lo, hi = d.support_window()
        for a in np.linspace(lo, hi, 101):
            assert d.density(a) >= 0.0


def test_preset_mappings():
    d = states.from_preset(states.StatePreset("coherent", nbar=4.0))
    assert (d.alpha0, d.epsilon) == (5.0, 1.0)
    d = states.from_preset(states.StatePreset("thermal", nbar=4.0))
    assert (d.alpha0, d.epsilon) == (1.0, 3.0)
    d = states.from_preset(states.StatePreset("squeezed", nbar=math.sinh(2.0) ** 2, r=2.0))
    assert math.isclose(d.alpha0, 1.0, abs_tol=1e-12)
    assert math.isclose(d.epsilon, math.exp(-2.0), rel_tol=1e-14)
    d = states.from_preset(states.StatePreset("fock", n=3))
    assert isinstance(d, states.Fock) and d.n == 3
    d = states.from_preset(states.StatePreset("phase-randomized", nbar=4.0, tau=0.5))
    assert isinstance(d, states.PhaseRandomizedCoherent)


def test_vacuum_presets_coincide():
    c = states.from_preset(states.StatePreset("coherent", nbar=0.0))
    t = states.from_preset(states.StatePreset("thermal", nbar=0.0))
    assert c == states.Gaussian(1.0, 1.0)
    assert t == states.Gaussian(1.0, 1.0)


def test_unsqueezed_preset_equals_coherent():
    for nbar in (0.0, 2.0, 7.5):
        s = states.from_preset(states.StatePreset("squeezed", nbar=nbar, r=0.0))
        c = states.from_preset(states.StatePreset("coherent", nbar=nbar))
        assert s == c


def test_preset_validation():
    with pytest.raises(InvalidParameterError):
        states.from_preset(states.StatePreset("squeezed", nbar=1.0, r=2.0))
    with pytest.raises(InvalidParameterError):
        states.from_preset(states.StatePreset("coherent", nbar=-1.0))
    with pytest.raises(InvalidParameterError):
        states.from_preset(states.StatePreset("phase-randomized", nbar=1.0, tau=0.0))
    with pytest.raises(InvalidParameterError):
        states.from_preset(states.StatePreset("fock", n=-1))
    with pytest.raises(InvalidParameterError):
        states.from_preset(states.StatePreset("fock", n=2.5))
    with pytest.raises(InvalidParameterError):
        states.from_preset(states.StatePreset("laser", nbar=1.0))


def test_gaussian_moments():
    for a0, eps in ((1.0, 1.0), (0.0, 2.0), (5.0, 0.3)):
        mean, var = states.moments(states.Gaussian(a0, eps))
        assert abs(mean - a0) < 1e-8
        assert abs(var - eps * eps) < 1e-8


def test_point_mass_moments():
    mean, var = states.moments(states.Gaussian(2.0, 0.0))
    assert (mean, var) == (2.0, 0.0)


def test_number_state_moments():
    mean, var = states.moments(states.Fock(3))
    assert abs(mean - 1.0) < 1e-6
    assert abs(var - 7.0) < 1e-6
    for n in (0, 1, 2, 5, 10):
        mean, var = states.moments(states.Fock(n))
        assert abs(mean - 1.0) < 1e-6
        assert abs(var - (2 * n + 1)) < 1e-6


def test_number_and_thermal_moments_match():
    for n in (1, 3, 8):
        fm, fv = states.moments(states.Fock(n))
        tm, tv = states.moments(states.from_preset(states.StatePreset("thermal", nbar=float(n))))
        assert abs(fm - tm) < 1e-6
        assert abs(fv - tv) < 1e-6


def test_phase_randomized_moments_small_spread():
    mean, var = states.moments(states.PhaseRandomizedCoherent(4.0, 1e-3))
    assert abs(mean - 5.0) < 1e-4
    assert abs(var - 1.0) < 1e-4


def test_phase_randomized_moments_closed_form():
    """First two moments have a closed form via the cosine moments of the
    wrapped Gaussian phase: E[cos phi] = exp(-tau^2/2),
    E[cos^2 phi] = (1 + exp(-2 tau^2))/2."""
    for nbar, tau in ((1.0, 0.3), (4.0, math.pi / 4), (9.0, 1.2)):
        mean, var = states.moments(states.PhaseRandomizedCoherent(nbar, tau))
        c1 = math.exp(-0.5 * tau * tau)
        c2 = 0.5 * (1.0 + math.exp(-2.0 * tau * tau))
        ref_mean = 1.0 + 2.0 * math.sqrt(nbar) * c1
        ref_var = 1.0 + 4.0 * nbar * (c2 - c1 * c1)
        assert abs(mean - ref_mean) < 1e-7
        assert abs(var - ref_var) < 1e-7


def test_number_state_density_scalar_matches_array():
    f = states.Fock(7)
    grid = np.linspace(-8.0, 10.0, 57)
    arr = f.density_array(grid)
    for a, v in zip(grid, arr):
        assert math.isclose(f.density(float(a)), float(v), rel_tol=0, abs_tol=1e-15)


def test_samplers_match_moments():
    n = 200_000
    cases = [
        states.Gaussian(5.0, 1.0),
        states.Fock(3),
        states.PhaseRandomizedCoherent(4.0, math.pi / 4),
    ]
    for seed, dist in enumerate(cases, start=20):
        draws = dist.sample(rng.stream_generator(seed, 0), n)
        mean, var = states.moments(dist)
        se_mean = math.sqrt(var / n)
        assert abs(draws.mean() - mean) < 5 * se_mean
        assert abs(draws.var(ddof=1) - var) / var < 0.05


def test_sampler_determinism():
    for dist in (states.Gaussian(1.0, 2.0), states.Fock(2),
                  states.PhaseRandomizedCoherent(1.0, 0.7)):
        a = dist.sample(rng.stream_generator(42, 0), 5000)
        b = dist.sample(rng.stream_generator(42, 0), 5000)
        assert np.array_equal(a, b)


def test_support_window_contains_the_mass():
    for dist in (states.Gaussian(1.0, 2.0), states.Fock(4),
                  states.PhaseRandomizedCoherent(4.0, 0.9)):
        lo, hi = dist.support_window()
        assert dist.density(lo) < 1e-12
        assert dist.density(hi) < 1e-12


def test_convenience_constructors():
    assert states.coherent(4.0) == states.Gaussian(5.0, 1.0)
    assert states.thermal(4.0) == states.Gaussian(1.0, 3.0)
    assert states.squeezed_coherent(2.0, 0.0) == states.coherent(2.0)
    assert states.fock(2) == states.Fock(2)
    prc = states.phase_randomized(1.0, 0.5)
    assert (prc.nbar, prc.tau) == (1.0, 0.5)
