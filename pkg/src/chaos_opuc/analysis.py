"""Statistical helpers: KS distances, moment estimators, and the circle-moment series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

__all__ = [
    "TestReport",
    "circle_moment_series",
    "ks_statistic",
    "ks_test",
    "empirical_moment",
]

_MAX_TERMS = 10**5


@dataclass
class TestReport:
    __test__ = False  # not a pytest case, despite the name

    name: str
    statistic: float
    threshold: float
    n_samples: int
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.statistic <= self.threshold

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "n_samples": self.n_samples,
            "pass": bool(self.passed),
            "metadata": self.metadata,
        }


def circle_moment_series(lam: float, u, tol: float = 1e-12) -> float:
    """Angular moment E|1 - e^{i.theta} u|^{-2 lam} as a binomial-squared series.

    The value is sum_k binom(lam+k-1, k)^2 |u|^{2k}; terms are computed with
    log-Gamma for stability and summed until the relative increment drops
    below ``tol`` (hard cap 1e5 terms).
    """
    x = abs(complex(u)) ** 2
    if x >= 1.0:
        raise ValueError("|u| must be < 1")
    if lam == 0 or x == 0.0:
        return 1.0
    total = 1.0
    log_x = np.log(x)
    for k in range(1, _MAX_TERMS + 1):
        log_binom = special.gammaln(lam + k) - special.gammaln(lam) - special.gammaln(k + 1)
        term = np.exp(2 * log_binom + k * log_x)
        total += term
        if term < tol * total:
            break
    return float(total)


def _ecdf_sup_distance(samples, cdf):
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    up = np.max(np.arange(1, n + 1) / n - f)
    down = np.max(f - np.arange(0, n) / n)
    return float(max(up, down))


def _two_sample_sup_distance(a, b):
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    # ECDF of b evaluated just left/right of each point of a, and vice versa;
    # the sup is attained at a data point of the pooled sample.
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_statistic(samples, reference) -> float:
    """KS sup-distance; ``reference`` is either a CDF callable or a second sample."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("empty sample")
    if callable(reference):
        return _ecdf_sup_distance(samples, reference)
    reference = np.asarray(reference)
    if reference.size == 0:
        raise ValueError("empty reference sample")
    return _two_sample_sup_distance(samples, reference)


def ks_test(samples, reference, name: str = "ks", threshold: float = 0.05) -> TestReport:
    """KS distance wrapped in a report, with an asymptotic p-value attached."""
    d = ks_statistic(samples, reference)
    n = np.asarray(samples).size
    if callable(reference):
        n_eff = float(n)
    else:
        m = np.asarray(reference).size
        n_eff = n * m / (n + m)
    p = float(special.kolmogorov(d * np.sqrt(n_eff)))
    return TestReport(name=name, statistic=d, threshold=threshold, n_samples=int(n),
                      metadata={"p_value": p})


def empirical_moment(samples, transform=None):
    """Sample mean and standard error, optionally of ``transform(samples)``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    if transform is not None:
        x = np.asarray(transform(x), dtype=float)
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return mean, se
