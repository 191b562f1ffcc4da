"""Regularized chaos measures: synthesis routes, normalization, symmetry,
and the closed-form limit law."""

import numpy as np
import pytest

from chaos_opuc import (
    CouplingParams,
    fb_cdf,
    field_on_circle,
    gmc_mass_samples,
    gmc_r_measure,
    ks_statistic,
    sample_complex_gaussians,
)


def test_fft_route_matches_direct_sum():
    g = sample_complex_gaussians(40, seed=71)
    fast = field_on_circle(g, 0.8, 128)
    slow = field_on_circle(g, 0.8, 2 * np.pi * np.arange(128) / 128)
    assert np.max(np.abs(fast.values - slow.values)) < 1e-10
    assert np.array_equal(fast.thetas, slow.thetas)


def test_field_is_real_and_centered():
    g = sample_complex_gaussians(300, seed=72)
    field = field_on_circle(g, 0.9, 1024)
    assert np.isrealobj(field.values)
    # zero-mode absent: the grid average vanishes identically
    assert abs(field.values.mean()) < 1e-12


def test_field_validation():
    g = sample_complex_gaussians(16, seed=73)
    with pytest.raises(ValueError):
        field_on_circle(g, 1.0, 64)
    with pytest.raises(ValueError):
        field_on_circle(g, 0.5, 16)  # grid not finer than truncation


def test_mass_normalization():
    # E[total mass] = 1 (counterterm exact up to negligible truncation tail)
    params = CouplingParams(6.0)
    masses = gmc_mass_samples(params, 0.9, 2000, 4096, 10**4, seed=74)
    se = masses.std(ddof=1) / np.sqrt(masses.size)
    assert abs(masses.mean() - 1.0) < 3 * se


def test_density_rotation_invariance():
    # the law of the density is rotation invariant: marginals at theta = 0
    # and theta = pi agree (two-sample KS at 1e4 replicas)
    params = CouplingParams(4.0)
    gamma = params.gamma
    at_zero = np.empty(10**4)
    at_pi = np.empty(10**4)
    for i in range(10**4):
        field = field_on_circle(sample_complex_gaussians(128, seed=[75, i]), 0.9, 256)
        measure = gmc_r_measure(field, gamma)
        at_zero[i] = measure.density[0]
        at_pi[i] = measure.density[128]
    assert ks_statistic(at_zero, at_pi) < 0.02


def test_critical_direction_monotonicity():
    """Approaching gamma = 1 at fixed radius: the mass mean stays 1 while
    the bulk drains into the tail (medians fall, upper quantiles rise)."""
    params = CouplingParams(4.0)
    r, k_max, m_grid = 0.95, 512, 2048
    n = 4000
    fields = np.empty((n, m_grid))
    for i in range(n):
        fields[i] = field_on_circle(sample_complex_gaussians(k_max, seed=[76, i]), r, m_grid).values
    medians, q95s = [], []
    for gamma in (0.9, 0.95, 0.99):
        masses = (1 - r**2) ** (gamma**2) * np.mean(np.exp(gamma * fields), axis=1)
        se = masses.std(ddof=1) / np.sqrt(n)
        assert abs(masses.mean() - 1.0) < 3 * se
        medians.append(np.median(masses))
        q95s.append(np.quantile(masses, 0.95))
    assert medians[0] > medians[1] > medians[2]
    assert q95s[0] < q95s[1] < q95s[2]


def test_fb_cdf_shape():
    gamma = 1.0 / np.sqrt(2.0)
    x = np.linspace(0.0, 20.0, 200)
    cdf = fb_cdf(gamma, x)
    assert cdf[0] == 0.0
    assert np.all(np.diff(cdf) >= 0)
    assert cdf[-1] < 1.0 and cdf[-1] > 0.9
    # at x = K the value is exactly e^{-1}
    from scipy.special import gamma as gamma_fn

    scale = 1.0 / gamma_fn(1.0 - gamma**2)
    assert fb_cdf(gamma, np.array([scale]))[0] == pytest.approx(np.exp(-1.0))
    with pytest.raises(ValueError):
        fb_cdf(1.1, x)


def test_mass_samples_deterministic():
    params = CouplingParams(4.0)
    a = gmc_mass_samples(params, 0.9, 100, 512, 50, seed=77)
    b = gmc_mass_samples(params, 0.9, 100, 512, 50, seed=77)
    assert np.array_equal(a, b)
    assert np.all(a > 0)
