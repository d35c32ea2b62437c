"""Rank-based comparison of K methods over N datasets: Friedman chi-square
test and the Nemenyi critical-difference post hoc analysis.

Per dataset the methods are ranked 1 = best with average-rank tie handling,
so every rank row sums to K(K+1)/2. The test statistic is

    chi2_F = 12N / (K(K+1)) * (sum_j R_j^2 - K(K+1)^2 / 4)

with K-1 degrees of freedom, where R_j is method j's mean rank. Two methods
differ significantly when their mean ranks differ by more than

    CD = q_alpha * sqrt(K(K+1) / (6N)).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.stats import rankdata

# Studentized-range-based critical values q_alpha at alpha = 0.05 for K
# simultaneous methods (infinite degrees of freedom, divided by sqrt(2)).
NEMENYI_Q_05 = {
    2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850,
    7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164,
}


@dataclass(frozen=True)
class RankTable:
    """Values (N datasets x K methods), their per-row ranks, and mean ranks."""

    values: np.ndarray
    ranks: np.ndarray
    mean_ranks: np.ndarray
    higher_is_better: bool


def rank_rows(values: np.ndarray, higher_is_better: bool = True) -> RankTable:
    """Rank each row (1 = best); ties get the average of the tied positions."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 2:
        raise ValueError("need an N x K matrix with N >= 2 and K >= 2")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    keyed = -values if higher_is_better else values
    ranks = np.vstack([rankdata(row, method="average") for row in keyed])
    return RankTable(values=values, ranks=ranks, mean_ranks=ranks.mean(axis=0),
                     higher_is_better=higher_is_better)


def friedman(rt: RankTable) -> tuple[float, float]:
    """Friedman statistic over the mean ranks and its chi-square upper-tail p."""
    n, k = rt.values.shape
    r = rt.mean_ranks
    stat = 12.0 * n / (k * (k + 1)) * (float(np.sum(r ** 2)) - k * (k + 1) ** 2 / 4.0)
    stat = max(stat, 0.0)
    return stat, chi2_sf(stat, k - 1)


def nemenyi_q(k: int, alpha: float = 0.05) -> float:
    if alpha != 0.05:
        raise ValueError("built-in critical values cover alpha = 0.05 only")
    if k not in NEMENYI_Q_05:
        raise ValueError(f"no critical value for K={k}; supported K: 2..10")
    return NEMENYI_Q_05[k]


def nemenyi_cd(k: int, n: int, q_alpha: float) -> float:
    """Critical mean-rank difference q_alpha * sqrt(K(K+1)/(6N))."""
    if k < 2 or n < 1 or q_alpha <= 0:
        raise ValueError("need K >= 2, N >= 1 and q_alpha > 0")
    return q_alpha * math.sqrt(k * (k + 1) / (6.0 * n))


def pairwise_significance(rt, cd: float) -> np.ndarray:
    """Boolean matrix: entry (i,j) is True iff |R_i - R_j| strictly exceeds cd."""
    ranks = rt.mean_ranks if isinstance(rt, RankTable) else np.asarray(rt, dtype=np.float64)
    diff = np.abs(ranks[:, None] - ranks[None, :])
    return diff > cd


def chi2_sf(x: float, df: int) -> float:
    """Upper tail of the chi-square distribution, Q(df/2, x/2).

    Computed from the regularized incomplete gamma function: a power series
    for the lower function when x/2 < df/2 + 1, otherwise a modified Lentz
    continued fraction for the upper function. Relative accuracy ~1e-14.
    """
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x <= 0.0:
        return 1.0
    s = df / 2.0
    z = x / 2.0
    if z < s + 1.0:
        return 1.0 - _gamma_lower_series(s, z)
    return _gamma_upper_cf(s, z)


def _gamma_front(s: float, z: float) -> float:
    return math.exp(-z + s * math.log(z) - math.lgamma(s))


def _gamma_lower_series(s: float, z: float) -> float:
    """Regularized lower incomplete gamma P(s,z) by power series."""
    term = 1.0 / s
    total = term
    a = s
    for _ in range(1000):
        a += 1.0
        term *= z / a
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return total * _gamma_front(s, z)


def _gamma_upper_cf(s: float, z: float) -> float:
    """Regularized upper incomplete gamma Q(s,z) by continued fraction."""
    tiny = 1e-300
    b = z + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, 1000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return h * _gamma_front(s, z)
