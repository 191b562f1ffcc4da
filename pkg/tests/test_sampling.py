"""Coefficient sampler: laws, determinism, and the derived-seed scheme."""

import numpy as np
import pytest

from chaos_opuc import (
    CouplingParams,
    VerblunskySequence,
    derive_rng,
    sample_complex_gaussians,
    sample_verblunsky,
    sample_verblunsky_batch,
)
from chaos_opuc.analysis import ks_statistic


def test_determinism_bit_identical():
    a = sample_verblunsky(CouplingParams(3.0), 40, seed=5, with_terminal=True)
    b = sample_verblunsky(CouplingParams(3.0), 40, seed=5, with_terminal=True)
    assert np.array_equal(a.alphas, b.alphas)
    assert a.terminal == b.terminal
    c = sample_verblunsky(CouplingParams(3.0), 40, seed=6)
    assert not np.array_equal(a.alphas, c.alphas)


def test_modulus_inverse_cdf():
    # |alpha_j|^2 ~ Beta(1, beta_j): CDF 1 - (1-x)^{beta_j}, KS < 0.01 at 1e5
    params = CouplingParams(3.0)
    j = 4
    alphas, _ = sample_verblunsky_batch(params, j + 1, 10**5, seed=21)
    mod2 = np.abs(alphas[:, j]) ** 2
    b_j = params.beta_j(j)
    assert ks_statistic(mod2, lambda x: 1.0 - (1.0 - np.asarray(x)) ** b_j) < 0.01


def test_phases_uniform_and_rotation_invariant():
    # uniform phases make the law invariant under a global rotation; check
    # arg(alpha) directly and |alpha| across two independent streams
    params = CouplingParams(2.0)
    alphas, _ = sample_verblunsky_batch(params, 3, 2 * 10**4, seed=22)
    phases = (np.angle(alphas[:, 1]) + np.pi) / (2 * np.pi)
    assert ks_statistic(phases, lambda x: np.asarray(x)) < 0.02
    rotated = np.exp(0.7j) * alphas[:, 1]
    other, _ = sample_verblunsky_batch(params, 3, 2 * 10**4, seed=23)
    assert ks_statistic(np.abs(rotated), np.abs(other[:, 1])) < 0.02
    rot_phases = (np.angle(rotated) + np.pi) / (2 * np.pi)
    assert ks_statistic(rot_phases, lambda x: np.asarray(x)) < 0.02


def test_terminal_is_unimodular():
    seq = sample_verblunsky(CouplingParams(2.0), 10, seed=9, with_terminal=True)
    assert abs(abs(seq.terminal) - 1.0) < 1e-12
    assert len(seq) == 10
    assert seq.all_coefficients().size == 11


def test_complex_gaussian_normalization():
    g = sample_complex_gaussians(2 * 10**5, seed=31)
    n = g.size
    assert abs(np.mean(np.abs(g) ** 2) - 1.0) < 3 * np.sqrt(1.0 / n)  # E|N|^2 = 1
    assert abs(np.mean(g**2)) < 3 * np.sqrt(1.0 / n)                  # E[N^2] = 0
    assert abs(np.mean(g)) < 3 * np.sqrt(0.5 / n)


def test_validation():
    with pytest.raises(ValueError):
        CouplingParams(0.0)
    with pytest.raises(ValueError):
        VerblunskySequence([1.2])
    with pytest.raises(ValueError):
        VerblunskySequence([0.1], terminal=0.5)


def test_coupling_params_derived_quantities():
    p = CouplingParams(8.0)
    assert p.gamma == pytest.approx(0.5)
    assert p.beta_j(0) == 4.0
    assert p.beta_j(3) == 16.0
    assert CouplingParams(2.0).phase == "critical"
    assert CouplingParams(1.0).phase == "supercritical"
    assert CouplingParams(3.0).phase == "subcritical"


def test_derive_rng_flattens_composite_seeds():
    # chunked drivers pass [seed, index]; must equal the flat spelling
    a = derive_rng([3, 5], 7).standard_normal(4)
    b = derive_rng(3, 5, 7).standard_normal(4)
    assert np.array_equal(a, b)
    c = derive_rng(3, 5, 8).standard_normal(4)
    assert not np.array_equal(a, c)
