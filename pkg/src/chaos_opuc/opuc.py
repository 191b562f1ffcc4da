"""The Szegő recursion engine.

Forward direction: monic orthogonal polynomials Phi_n on the unit circle and
their reversed partners Phi*_n, driven by a coefficient sequence through

    Phi_{n+1}(z)  = z Phi_n(z) - conj(alpha_n) Phi*_n(z)
    Phi*_{n+1}(z) =   Phi*_n(z) - alpha_n z Phi_n(z)

with Phi_0 = Phi*_0 = 1. Also provided: the Blaschke-type ratio
Q_n(z) = z Phi_n(z)/Phi*_n(z), the continuous log determination of Phi*_n,
trigonometric moments of the underlying measure, and the inverse (Schur) map
from moments back to coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampling import CouplingParams, VerblunskySequence, sample_verblunsky_batch

__all__ = [
    "OpucPair",
    "szego_step",
    "szego_coefficients",
    "q_ratio",
    "log_phi_star",
    "log_polynomial_series",
    "moments_from_alphas",
    "schur_inverse",
    "sample_phi_star_abs2",
]


@dataclass(frozen=True)
class OpucPair:
    """Ascending coefficient vectors of (Phi_n, Phi*_n)."""

    phi: np.ndarray
    phi_star: np.ndarray

    @property
    def degree(self) -> int:
        return self.phi.size - 1


def _coefficients(seq) -> np.ndarray:
    if isinstance(seq, VerblunskySequence):
        return seq.all_coefficients()
    return np.asarray(seq, dtype=complex)


def szego_step(phi_at_z: complex, phi_star_at_z: complex, alpha: complex, z: complex):
    """One pointwise recursion step; returns the updated (phi, phi_star) values."""
    return (z * phi_at_z - np.conj(alpha) * phi_star_at_z,
            phi_star_at_z - alpha * z * phi_at_z)


def szego_coefficients(seq) -> OpucPair:
    """Exact polynomial coefficients after running the full sequence."""
    phi, phi_star = _coefficient_table(_coefficients(seq))[-1]
    return OpucPair(phi, phi_star)


def _coefficient_table(alphas):
    """All intermediate (phi_m, phi*_m) coefficient vectors, m = 0..len(alphas)."""
    phi = np.array([1.0 + 0j])
    phi_star = np.array([1.0 + 0j])
    table = [(phi, phi_star)]
    for a in alphas:
        z_phi = np.concatenate([[0.0], phi])
        padded_star = np.concatenate([phi_star, [0.0]])
        phi = z_phi - np.conj(a) * padded_star
        phi_star = padded_star - a * z_phi
        table.append((phi, phi_star))
    return table


def q_ratio(seq, z: complex) -> complex:
    """Q_n(z) = z Phi_n(z) / Phi*_n(z); contraction of the closed disc."""
    phi = phi_star = 1.0 + 0j
    for a in _coefficients(seq):
        phi, phi_star = szego_step(phi, phi_star, a, z)
    if phi_star == 0:
        raise ZeroDivisionError("Phi*_n vanishes at z (boundary zero)")
    return z * phi / phi_star


def log_phi_star(seq, z: complex) -> complex:
    """The branch of log Phi*_n(z) that vanishes at z = 0.

    Accumulated as sum_j Log(1 - alpha_j Q_j(z)) with principal logs; each
    factor is 1 - w with |w| < 1, hence has positive real part, so the
    principal branch never crosses its cut.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("log determination defined for |z| < 1")
    total = 0.0 + 0j
    q = z  # Q_0
    for a in _coefficients(seq):
        w = a * q
        total += np.log(1.0 - w)
        q = z * (q - np.conj(a)) / (1.0 - w)
    return total


def log_polynomial_series(coeffs, k_max: int) -> np.ndarray:
    """Taylor coefficients l_1..l_k of log P for a polynomial with P(0) = 1.

    Standard convolution recursion: l_k = b_k - sum_{m<k} (m/k) l_m b_{k-m}.
    """
    b = np.zeros(k_max + 1, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    take = min(coeffs.size, k_max + 1)
    b[:take] = coeffs[:take]
    if b[0] != 1.0:
        raise ValueError("constant term must be 1")
    ell = np.zeros(k_max + 1, dtype=complex)
    for k in range(1, k_max + 1):
        acc = b[k]
        for m in range(1, k):
            acc -= (m / k) * ell[m] * b[k - m]
        ell[k] = acc
    return ell[1:]


def moments_from_alphas(seq, m_max: int) -> np.ndarray:
    """Trigonometric moments c_m = integral of e^{-im.theta} d.mu, m = 1..m_max.

    Uses the orthogonality of Phi_m against z^0: with c_{-m} = conj(c_m),
    monic Phi_m gives c_{-m} = -sum_{l<m} Phi_m[l] c_{-l}. Exact in exact
    arithmetic; c_m depends only on alpha_0..alpha_{m-1}.
    """
    alphas = _coefficients(seq)
    if m_max > alphas.size:
        raise ValueError("m_max exceeds the number of coefficients")
    table = _coefficient_table(alphas[:m_max])
    c_neg = np.zeros(m_max + 1, dtype=complex)
    c_neg[0] = 1.0
    for m in range(1, m_max + 1):
        phi_m = table[m][0]
        c_neg[m] = -np.dot(phi_m[:m], c_neg[:m])
    return np.conj(c_neg[1:])


def schur_inverse(moments, n: int) -> VerblunskySequence:
    """Recover alpha_0..alpha_{n-1} from moments c_1..c_n (Toeplitz recursion).

    Raises ValueError when the data is degenerate (some |alpha_j| >= 1,
    i.e. the moments do not come from a measure with n strictly interior
    coefficients).
    """
    c = np.asarray(moments, dtype=complex)
    if c.size < n:
        raise ValueError("need at least n moments")
    phi = np.array([1.0 + 0j])
    norm = 1.0
    alphas = np.zeros(n, dtype=complex)
    for j in range(n):
        s = np.dot(np.conj(phi), c[: j + 1])  # sum_k conj(phi[k]) c_{k+1}
        alpha = s / norm
        if abs(alpha) >= 1.0:
            raise ValueError(f"degenerate moment data at step {j}: |alpha| = {abs(alpha):.6f}")
        alphas[j] = alpha
        z_phi = np.concatenate([[0.0], phi])
        phi_star = np.conj(phi[::-1])
        phi = z_phi - np.conj(alpha) * np.concatenate([phi_star, [0.0]])
        norm *= 1.0 - abs(alpha) ** 2
    return VerblunskySequence(alphas)


def sample_phi_star_abs2(params: CouplingParams, z: complex, n: int,
                         n_samples: int, seed: int) -> np.ndarray:
    """Monte Carlo samples of |Phi*_n(z)|^2 under the coefficient law."""
    alphas, _ = sample_verblunsky_batch(params, n, n_samples, seed)
    phi = np.ones(n_samples, dtype=complex)
    phi_star = np.ones(n_samples, dtype=complex)
    for j in range(n):
        a = alphas[:, j]
        phi, phi_star = z * phi - np.conj(a) * phi_star, phi_star - a * z * phi
    return np.abs(phi_star) ** 2
