"""Spectral measures on the circle and the total-mass products.

Two concrete forms: the smooth density with finitely many coefficients
(all later ones zero), and the atomic measure supported on the spectrum of
the unitary operator with a terminal coefficient, whose weights make an
exact quadrature rule for low-degree polynomials. The total-mass products
C0, M_inf, C0' are sampled exactly through the identity
-log(1 - |alpha_j|^2) ~ Exp(beta*(j+1)/2): the phases integrate out of the
mass, so one exponential per (j, replica) is the whole cost.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .sampling import CouplingParams, VerblunskySequence, derive_rng

__all__ = [
    "SpectralMeasure",
    "TotalMassSample",
    "bernstein_szego_density",
    "quadrature",
    "total_mass",
    "total_mass_samples",
    "mellin_reference",
]

_MASS_TAG = 0xC0


@dataclass(frozen=True)
class SpectralMeasure:
    kind: str  # "atomic" | "gridded"
    angles: np.ndarray | None = None   # atomic support
    weights: np.ndarray | None = None  # atomic weights, sum to 1
    thetas: np.ndarray | None = None   # grid angles
    density: np.ndarray | None = None  # density w.r.t. d.theta/2pi


@dataclass(frozen=True)
class TotalMassSample:
    value: float
    beta: float
    truncation: int


def bernstein_szego_density(seq: VerblunskySequence, theta_grid) -> SpectralMeasure:
    """Density prod(1-|alpha_j|^2) / |Phi*_n(e^{i.theta})|^2 w.r.t. d.theta/2pi."""
    from .opuc import szego_coefficients

    if seq.terminal is not None:
        raise ValueError("density form requires all coefficients strictly interior")
    thetas = np.asarray(theta_grid, dtype=float)
    coeffs = szego_coefficients(seq).phi_star
    z = np.exp(1j * thetas)
    vals = np.polynomial.polynomial.polyval(z, coeffs)
    norm = float(np.prod(1.0 - np.abs(seq.alphas) ** 2))
    density = norm / np.abs(vals) ** 2
    return SpectralMeasure(kind="gridded", thetas=thetas, density=density)


def quadrature(seq: VerblunskySequence) -> SpectralMeasure:
    """Atomic measure on the terminal operator's eigenangles.

    Weights come from the Christoffel function of the orthonormal
    polynomials: pi_j = 1 / sum_{k<n} |phi_k(z_j)|^2 with
    phi_k = Phi_k / prod_{i<k} rho_i. The rule integrates every polynomial
    of degree <= n-1 exactly against any measure sharing the interior
    coefficients.
    """
    from .cmv import paraorthogonal_spectrum
    from .opuc import _coefficient_table

    if seq.terminal is None:
        raise ValueError("quadrature requires a terminal coefficient")
    angles = paraorthogonal_spectrum(seq)
    n = angles.size
    if n > 1:
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
        if np.min(gaps) < 1e-10:
            warnings.warn("nearly coincident quadrature nodes; weights may be ill-conditioned")
    z = np.exp(1j * angles)
    table = _coefficient_table(seq.alphas)  # interior only: degrees 0..n-1
    rhos = seq.rhos
    christoffel = np.zeros(n)
    norm = 1.0
    for k in range(n):
        phi_k = table[k][0]
        vals = np.polynomial.polynomial.polyval(z, phi_k)
        christoffel += np.abs(vals) ** 2 / norm**2
        if k < rhos.size:
            norm *= rhos[k]
    weights = 1.0 / christoffel
    return SpectralMeasure(kind="atomic", angles=angles, weights=weights)


def _log_mass_increments(params: CouplingParams, variant: str, j0: int, j1: int):
    """Deterministic part and exponential scale of log-mass terms j0 <= j < j1."""
    j = np.arange(j0, j1)
    iota = 2.0 / (params.beta * (j + 1))
    if variant == "c0":
        if params.beta < 2:
            raise ValueError("the c0 product requires beta >= 2")
        if params.beta == 2:
            # iota_0 = 1: the leading factor is replaced by 2/(1 - |alpha_0|^2)
            const = np.empty_like(iota)
            head = j == 0
            const[head] = np.log(2.0)
            const[~head] = np.log1p(-iota[~head])
        else:
            const = np.log1p(-iota)
    elif variant in ("m_inf", "c0_prime"):
        const = -iota
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return iota, const


def total_mass_samples(params: CouplingParams, j_max: int, n_samples: int, seed,
                       variant: str = "c0", force_zero_alphas: bool = False) -> np.ndarray:
    """Samples of the truncated product (one exponential draw per factor)."""
    rng = derive_rng(seed, _MASS_TAG)
    log_mass = np.zeros(n_samples)
    sample_block = 256
    j_block = 25000
    for j0 in range(0, j_max, j_block):
        j1 = min(j0 + j_block, j_max)
        iota, const = _log_mass_increments(params, variant, j0, j1)
        log_mass += const.sum()
        if force_zero_alphas:
            continue
        for s0 in range(0, n_samples, sample_block):
            s1 = min(s0 + sample_block, n_samples)
            e = rng.standard_exponential((s1 - s0, j1 - j0))
            log_mass[s0:s1] += e @ iota
    return np.exp(log_mass)


def total_mass(params: CouplingParams, j_max: int, seed,
               variant: str = "c0", force_zero_alphas: bool = False) -> TotalMassSample:
    value = total_mass_samples(params, j_max, 1, seed, variant, force_zero_alphas)[0]
    return TotalMassSample(value=float(value), beta=params.beta, truncation=j_max)


def mellin_reference(params: CouplingParams, z) -> complex:
    """Gamma(1 - 2z/beta) / Gamma(1 - 2/beta)^z, the mass's Mellin transform."""
    beta = params.beta
    if beta <= 2:
        raise ValueError("closed-form transform requires beta > 2")
    arg = 1.0 - 2.0 * np.asarray(z) / beta
    if np.any((np.real(arg) <= 0) & (np.imag(arg) == 0) & (np.real(arg) == np.round(np.real(arg)))):
        raise ValueError("Gamma pole at this transform point")
    base = special.gamma(1.0 - 2.0 / beta)
    return complex(special.gamma(arg) / base ** np.asarray(z))
