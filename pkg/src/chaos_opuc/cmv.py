"""Five-diagonal unitary (CMV) operators built from coefficient sequences.

The operator factors as C = L.M with L = Diag(Theta_0, Theta_2, ...) and
M = Diag(1, Theta_1, Theta_3, ...), each Theta_j the 2x2 block
[[alpha_j, rho_j], [rho_j, -conj(alpha_j)]]. The n x n truncation replaces
every coefficient of index >= n by zero (blocks crossing the cut keep only
their in-range entries). With a unimodular terminal coefficient the matrix
is exactly unitary and its spectrum is the circular-ensemble point process.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .sampling import CouplingParams, VerblunskySequence, sample_verblunsky_batch

__all__ = [
    "CmvFactors",
    "build_cmv",
    "cmv_trace_powers",
    "trace_leading_term",
    "paraorthogonal_spectrum",
    "sample_trace_powers",
    "first_gaussian_partial_sums",
]


@dataclass(frozen=True)
class CmvFactors:
    size: int
    alphas: np.ndarray  # padded to length `size`
    L: np.ndarray
    M: np.ndarray

    @cached_property
    def C(self) -> np.ndarray:
        return self.L @ self.M


def _padded_coefficients(seq, n):
    if isinstance(seq, VerblunskySequence):
        coeffs = seq.all_coefficients()
    else:
        coeffs = np.asarray(seq, dtype=complex)
    out = np.zeros(n, dtype=complex)
    take = min(n, coeffs.size)
    out[:take] = coeffs[:take]
    return out


def build_cmv(seq, n: int) -> CmvFactors:
    """Dense n x n factors L, M (and their product) for the truncated operator."""
    if n < 1:
        raise ValueError("n must be at least 1")
    al = _padded_coefficients(seq, n)
    rho = np.sqrt(np.clip(1.0 - np.abs(al) ** 2, 0.0, None))
    L = np.zeros((n, n), dtype=complex)
    M = np.zeros((n, n), dtype=complex)
    M[0, 0] = 1.0
    for j in range(0, n, 2):
        L[j, j] = al[j]
        if j + 1 < n:
            L[j, j + 1] = rho[j]
            L[j + 1, j] = rho[j]
            L[j + 1, j + 1] = -np.conj(al[j])
    for j in range(1, n, 2):
        M[j, j] = al[j]
        if j + 1 < n:
            M[j, j + 1] = rho[j]
            M[j + 1, j] = rho[j]
            M[j + 1, j + 1] = -np.conj(al[j])
    return CmvFactors(size=n, alphas=al, L=L, M=M)


def _row_diagonals(C, n):
    """Row-indexed diagonals d[s][i] = C[i, i+s], zero out of range."""
    d = {}
    for s in range(-2, 3):
        arr = np.zeros(n, dtype=complex)
        if s >= 0:
            arr[: n - s] = np.diagonal(C, offset=s)
        else:
            arr[-s:] = np.diagonal(C, offset=s)
        d[s] = arr
    return d


def cmv_trace_powers(cmv: CmvFactors, k_max: int) -> np.ndarray:
    """tr(C^k) for k = 1..k_max, using the five-diagonal structure.

    Each power is advanced by a banded-times-dense product, O(n^2) per k.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    n = cmv.size
    C = cmv.C
    d = _row_diagonals(C, n)
    traces = np.zeros(k_max, dtype=complex)
    V = C.copy()
    traces[0] = np.trace(V)
    for k in range(2, k_max + 1):
        out = np.zeros_like(V)
        for s in range(-2, 3):
            lo, hi = max(0, -s), n - max(0, s)
            out[lo:hi] += d[s][lo:hi, None] * V[lo + s: hi + s]
        V = out
        traces[k - 1] = np.trace(V)
    return traces


def trace_leading_term(seq, k: int, alpha_minus_one: complex = -1.0) -> complex:
    """The combinatorial first-order term F_k of tr(C^k).

    F_k = sum_{j >= -1} conj(alpha_j) rho^2_{j+1} ... rho^2_{j+k-1} alpha_{j+k},
    with the convention coefficient alpha_{-1} supplied explicitly (default -1)
    and the sequence zero-padded on the right.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(seq, VerblunskySequence):
        alphas = seq.all_coefficients()
    else:
        alphas = np.asarray(seq, dtype=complex)
    n = alphas.size
    padded = np.zeros(n + k + 1, dtype=complex)
    padded[:n] = alphas
    rho2 = 1.0 - np.abs(padded) ** 2
    total = 0.0 + 0j
    for j in range(-1, n + 1):
        a_j = alpha_minus_one if j == -1 else padded[j]
        if a_j == 0:
            continue
        window = np.prod(rho2[j + 1: j + k]) if k > 1 else 1.0
        total += np.conj(a_j) * window * padded[j + k]
    return complex(total)


def paraorthogonal_spectrum(seq: VerblunskySequence, n: int | None = None) -> np.ndarray:
    """Eigenangles (sorted, in [0, 2pi)) of the unitary operator with terminal coefficient.

    Computed as roots of the final monic polynomial through its companion
    matrix; the dense unitary eigensolve is kept as a test-time cross-check.
    """
    from .opuc import szego_coefficients

    if not isinstance(seq, VerblunskySequence) or seq.terminal is None:
        raise ValueError("a terminal (unimodular) coefficient is required")
    if n is None:
        n = len(seq) + 1
    if n != len(seq) + 1:
        raise ValueError("n must equal the total coefficient count")
    phi = szego_coefficients(seq).phi
    roots = np.roots(phi[::-1])
    return np.sort(np.mod(np.angle(roots), 2 * np.pi))


# ---------------------------------------------------------------------------
# Batched Monte Carlo over spectra: build the five diagonals of C directly
# from the coefficients, no matrices, replicas vectorized along axis 0.


def _shift(a, u):
    """out[..., i] = a[..., i+u], zero-filled outside the range."""
    if u == 0:
        return a
    out = np.zeros_like(a)
    if u > 0:
        out[..., :-u] = a[..., u:]
    else:
        out[..., -u:] = a[..., :u]
    return out


def _batch_cmv_diagonals(alphas):
    """Row-indexed diagonals of C = L.M for a batch; alphas has shape (S, n)."""
    S, n = alphas.shape
    rho = np.sqrt(np.clip(1.0 - np.abs(alphas) ** 2, 0.0, None))
    Ld = {u: np.zeros((S, n), dtype=complex) for u in (-1, 0, 1)}
    Md = {u: np.zeros((S, n), dtype=complex) for u in (-1, 0, 1)}
    je = np.arange(0, n, 2)
    Ld[0][:, je] = alphas[:, je]
    jef = je[je + 1 < n]
    Ld[0][:, jef + 1] = -np.conj(alphas[:, jef])
    Ld[1][:, jef] = rho[:, jef]       # L[j, j+1]
    Ld[-1][:, jef + 1] = rho[:, jef]  # L[j+1, j]
    Md[0][:, 0] = 1.0
    jo = np.arange(1, n, 2)
    Md[0][:, jo] = alphas[:, jo]
    jof = jo[jo + 1 < n]
    Md[0][:, jof + 1] = -np.conj(alphas[:, jof])
    Md[1][:, jof] = rho[:, jof]
    Md[-1][:, jof + 1] = rho[:, jof]
    C = {}
    for s in range(-2, 3):
        acc = np.zeros((S, n), dtype=complex)
        for u in (-1, 0, 1):
            v = s - u
            if abs(v) > 1:
                continue
            acc += Ld[u] * _shift(Md[v], u)
        C[s] = acc
    return C


def _batch_traces(diags, k_max):
    """tr(C^k), k = 1..k_max (k_max <= 3), from row-indexed diagonals."""
    out = [diags[0].sum(axis=-1)]
    if k_max >= 2:
        t2 = 0.0
        for s in range(-2, 3):
            t2 = t2 + (diags[s] * _shift(diags[-s], s)).sum(axis=-1)
        out.append(t2)
    if k_max >= 3:
        t3 = 0.0
        for s in range(-2, 3):
            for t in range(-2, 3):
                w = -s - t
                if abs(w) > 2:
                    continue
                term = diags[s] * _shift(diags[t], s) * _shift(diags[w], s + t)
                t3 = t3 + term.sum(axis=-1)
        out.append(t3)
    if k_max > 3:
        raise NotImplementedError("batched traces implemented for k <= 3")
    return np.stack(out, axis=-1)


def sample_trace_powers(params: CouplingParams, n: int, k_max: int,
                        n_samples: int, seed: int) -> np.ndarray:
    """Monte Carlo samples of (tr U^1, ..., tr U^k_max) over full unitary spectra."""
    interior, terminal = sample_verblunsky_batch(params, n - 1, n_samples, seed,
                                                 with_terminal=True)
    alphas = np.concatenate([interior, terminal[:, None]], axis=1)
    return _batch_traces(_batch_cmv_diagonals(alphas), k_max)


def first_gaussian_partial_sums(params: CouplingParams, j_max: int,
                                n_samples: int, seed: int) -> np.ndarray:
    """Replicated partial sums S_J = sum_{j=-1}^{J} conj(alpha_j) alpha_{j+1}.

    The j = -1 term is -alpha_0. Per replica the sum needs coefficients up to
    index J+1; sampling is chunked to bound memory.
    """
    total = np.zeros(n_samples, dtype=complex)
    chunk = max(1, 10**7 // (j_max + 2))
    done = 0
    idx = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        al, _ = sample_verblunsky_batch(params, j_max + 2, m, [seed, idx])
        total[done: done + m] = -al[:, 0] + np.einsum(
            "ij,ij->i", np.conj(al[:, :-1]), al[:, 1:])
        done += m
        idx += 1
    return total
