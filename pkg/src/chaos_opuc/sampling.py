"""Seedable random sources: Verblunsky coefficients and complex Gaussians.

The coefficient law is the circular-ensemble one: |alpha_j|^2 is
Beta(1, beta*(j+1)/2), the phase is uniform, and an optional terminal
coefficient is uniform on the unit circle. Sampling uses the inverse CDF
|alpha_j|^2 = 1 - U^(1/beta_j), which is exact and branch-free.

Seeds: every sampler takes an integer seed and derives its stream as
``np.random.default_rng([seed, *tags])``, so identical inputs give
bit-identical outputs and distinct tags give independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CouplingParams",
    "VerblunskySequence",
    "derive_rng",
    "sample_verblunsky",
    "sample_verblunsky_batch",
    "sample_complex_gaussians",
    "sample_complex_gaussians_batch",
]


def derive_rng(seed, *tags) -> np.random.Generator:
    """Generator seeded by the flattened entropy [seed..., tags...].

    ``seed`` may be an int or a sequence of ints (a pre-derived stream),
    so replica/chunk indices can be appended without nesting.
    """
    if isinstance(seed, (list, tuple, np.ndarray)):
        entropy = [int(s) for s in seed]
    else:
        entropy = [int(seed)]
    entropy.extend(int(t) for t in tags)
    return np.random.default_rng(entropy)


@dataclass(frozen=True)
class CouplingParams:
    """The coupling constant beta and quantities derived from it."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def gamma(self) -> float:
        return float(np.sqrt(2.0 / self.beta))

    def beta_j(self, j) -> float:
        """Shape parameter of the j-th coefficient: beta*(j+1)/2."""
        return self.beta * (np.asarray(j) + 1) / 2.0

    @property
    def phase(self) -> str:
        if self.beta > 2:
            return "subcritical"
        if self.beta == 2:
            return "critical"
        return "supercritical"


@dataclass(frozen=True)
class VerblunskySequence:
    """A finite coefficient sequence, optionally with a unimodular terminal.

    The fixed convention value alpha_{-1} = -1 is exposed as a class
    constant and never stored in ``alphas``.
    """

    alphas: np.ndarray
    terminal: complex | None = None
    beta: float | None = None

    ALPHA_MINUS_ONE = -1.0

    def __post_init__(self):
        object.__setattr__(self, "alphas", np.asarray(self.alphas, dtype=complex))
        if self.alphas.ndim != 1:
            raise ValueError("alphas must be one-dimensional")
        if self.alphas.size and np.max(np.abs(self.alphas)) >= 1.0:
            raise ValueError("interior coefficients must satisfy |alpha_j| < 1")
        if self.terminal is not None:
            t = complex(self.terminal)
            if abs(abs(t) - 1.0) > 1e-12:
                raise ValueError("terminal coefficient must be unimodular")
            object.__setattr__(self, "terminal", t)

    def __len__(self) -> int:
        return self.alphas.size

    def all_coefficients(self) -> np.ndarray:
        """Interior coefficients followed by the terminal one when present."""
        if self.terminal is None:
            return self.alphas
        return np.concatenate([self.alphas, [self.terminal]])

    @property
    def rhos(self) -> np.ndarray:
        return np.sqrt(1.0 - np.abs(self.alphas) ** 2)


def _modulus_squared(params, n, rng, size=None):
    j = np.arange(n)
    bj = params.beta_j(j)
    shape = (size, n) if size is not None else n
    u = rng.random(shape)
    return 1.0 - u ** (1.0 / bj)


def sample_verblunsky(params: CouplingParams, n: int, seed: int,
                      with_terminal: bool = False) -> VerblunskySequence:
    """Draw one coefficient sequence of length n (plus optional terminal)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = derive_rng(seed, 0x53E1)
    mod2 = _modulus_squared(params, n, rng)
    phases = np.exp(2j * np.pi * rng.random(n))
    alphas = np.sqrt(mod2) * phases
    terminal = np.exp(2j * np.pi * rng.random()) if with_terminal else None
    return VerblunskySequence(alphas, terminal=terminal, beta=params.beta)


def sample_verblunsky_batch(params: CouplingParams, n: int, n_samples: int, seed: int,
                            with_terminal: bool = False):
    """Vectorized sampler: returns (alphas[s, j], terminal[s] or None)."""
    rng = derive_rng(seed, 0x53E2)
    mod2 = _modulus_squared(params, n, rng, size=n_samples)
    alphas = np.sqrt(mod2) * np.exp(2j * np.pi * rng.random((n_samples, n)))
    terminal = np.exp(2j * np.pi * rng.random(n_samples)) if with_terminal else None
    return alphas, terminal


def sample_complex_gaussians(k_max: int, seed: int) -> np.ndarray:
    """K i.i.d. standard complex Gaussians (E|N|^2 = 1, E[N^2] = 0)."""
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    rng = derive_rng(seed, 0x6A55)
    z = rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max)
    return z / np.sqrt(2.0)


def sample_complex_gaussians_batch(k_max: int, n_samples: int, seed: int) -> np.ndarray:
    rng = derive_rng(seed, 0x6A56)
    z = rng.standard_normal((n_samples, k_max)) + 1j * rng.standard_normal((n_samples, k_max))
    return z / np.sqrt(2.0)
