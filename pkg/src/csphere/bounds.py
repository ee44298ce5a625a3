"""Analytic lower bounds on expected search cost and their Monte Carlo
validation helpers.

The bounds evaluate closed forms in the system dimension n, constellation
size L, radius factor alpha, SNR rho, and the constellation's mean
intra-point squared distance. Two clamped reduction factors drive them:

    beta_c = (1/(alpha n)) * (E rho + 1)
    beta_s(k) = ((n-k)/(alpha n)) * (E rho (n-k)/n + 1)

with E the mean intra-constellation squared distance. The prescreened
search admits the per-level bound 6L + 6(n-k)(1-beta_s)_+ +
9 L^(n-k+1) (1-beta_s)_+ (1-beta_c)_+, the plain search the same without
the 6L term and without the (1-beta_c)_+ factor. Both are true lower
bounds on the expected fixed-radius cost, derived through Markov
inequalities, so empirical frozen-radius averages must sit above them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundParams:
    """System parameters feeding the closed-form bounds."""

    n: int
    L: int
    alpha: float
    rho: float
    e_intra: float

    def __post_init__(self):
        if self.n < 1 or self.L < 2:
            raise ValueError(f"need n >= 1 and L >= 2, got n={self.n}, L={self.L}")
        if self.alpha <= 0 or self.rho <= 0 or self.e_intra <= 0:
            raise ValueError("alpha, rho, and e_intra must be positive")


def _clamp(v: float) -> float:
    return v if v > 0.0 else 0.0


def beta_factors(p: BoundParams, k: int) -> tuple[float, float]:
    """Complexity reduction factors (beta_c, beta_s) at tree level k.

    beta_c grows with SNR and shrinks with n (for fixed alpha * E); beta_s
    vanishes at the root where no deeper levels remain.
    """
    if not 1 <= k <= p.n:
        raise ValueError(f"level must lie in 1..{p.n}, got {k}")
    beta_c = (p.e_intra * p.rho + 1.0) / (p.alpha * p.n)
    depth = p.n - k
    beta_s = (depth / (p.alpha * p.n)) * (p.e_intra * p.rho * depth / p.n + 1.0)
    return beta_c, beta_s


def _bound_terms(p: BoundParams, prescreened: bool):
    """Per-level (base, log10 of the clamped dominant term) pairs."""
    terms = []
    for k in range(1, p.n + 1):
        beta_c, beta_s = beta_factors(p, k)
        fs = _clamp(1.0 - beta_s)
        fc = _clamp(1.0 - beta_c) if prescreened else 1.0
        base = (6 * p.L if prescreened else 0.0) + 6 * (p.n - k) * fs
        factor = fs * fc
        if factor > 0.0:
            log10_dom = math.log10(9.0) + (p.n - k + 1) * math.log10(p.L) + math.log10(factor)
        else:
            log10_dom = -math.inf
        terms.append((base, log10_dom))
    return terms


def _evaluate(p: BoundParams, prescreened: bool, log10: bool) -> float:
    terms = _bound_terms(p, prescreened)
    if not log10:
        total = 0.0
        for base, log10_dom in terms:
            if log10_dom > 308.0:
                return math.inf
            dom = 10.0**log10_dom if log10_dom > -math.inf else 0.0
            total += base + dom
        return total
    # Log-domain evaluation for constellation powers beyond float range.
    logs = []
    for base, log10_dom in terms:
        if base > 0.0:
            logs.append(math.log10(base))
        if log10_dom > -math.inf:
            logs.append(log10_dom)
    if not logs:
        return -math.inf
    peak = max(logs)
    return peak + math.log10(sum(10.0 ** (lg - peak) for lg in logs))


def csd_bound(p: BoundParams, log10: bool = False) -> float:
    """Lower bound on the expected fixed-radius cost of the prescreened
    search: sum over levels of 6L + 6(n-k)(1-beta_s)_+ +
    9 L^(n-k+1) (1-beta_s)_+ (1-beta_c)_+.

    With ``log10=True`` the base-10 logarithm of the bound is returned,
    evaluated in log space so huge L^(n-k+1) powers never overflow.
    """
    return _evaluate(p, prescreened=True, log10=log10)


def sd_bound(p: BoundParams, log10: bool = False) -> float:
    """Lower bound on the expected fixed-radius cost of the plain search:
    sum over levels of 6(n-k)(1-beta_s)_+ + 9 L^(n-k+1) (1-beta_s)_+."""
    return _evaluate(p, prescreened=False, log10=log10)


def lemma_probabilities(
    p: BoundParams, pair_distance_sq: float, k: int
) -> tuple[float, float]:
    """Markov lower bounds on the two per-level survival probabilities.

    For a transmitted/candidate symbol pair at squared distance d2, the
    scaled circle metric satisfies Pr(metric <= C) >= (1 - (d2 rho + 1) /
    (alpha n))_+; for partial vectors at squared distance D2 = d2 over the
    n-k trailing symbols, Pr(d_{k+1} <= C) >= (1 - ((n-k)/(alpha n)) *
    (D2 rho / n + 1))_+.
    """
    if pair_distance_sq < 0:
        raise ValueError("pair distance must be nonnegative")
    if not 1 <= k <= p.n:
        raise ValueError(f"level must lie in 1..{p.n}, got {k}")
    pr_cc = _clamp(1.0 - (pair_distance_sq * p.rho + 1.0) / (p.alpha * p.n))
    depth = p.n - k
    pr_sc = _clamp(1.0 - (depth / (p.alpha * p.n)) * (pair_distance_sq * p.rho / p.n + 1.0))
    return pr_cc, pr_sc


@dataclass(frozen=True)
class LevelCountSummary:
    """Moment estimates of the per-level surviving counts across trials.

    ``cc_sc_product_mean[k-1]`` estimates E[N_cc[k] * N_sc[k+1]] and
    ``indicator_cov[k-1]`` the covariance of the two survival indicator
    events under a uniformly random candidate, recovered from the counts
    (the product factorizes because the two events depend on disjoint
    symbol coordinates).
    """

    n: int
    L: int
    trials: int
    sc_mean: np.ndarray
    sc_stderr: np.ndarray
    cc_mean: np.ndarray
    cc_stderr: np.ndarray
    cc_sc_product_mean: np.ndarray
    indicator_cov: np.ndarray
    indicator_cov_stderr: np.ndarray


def empirical_level_counts(stats_list, constellation_size: int) -> LevelCountSummary:
    """Summarize frozen-radius search statistics across trials.

    Expects stats gathered with a fixed radius (no shrinking) so the counts
    match the fixed-C analysis setting. The indicator covariance per level
    compares the fraction of prescreen survivors at level k with the
    fraction of sphere survivors at level k+1; its standard error comes
    from the influence function of the sample covariance.
    """
    if not stats_list:
        raise ValueError("need at least one trial")
    L = constellation_size
    n = len(stats_list[0].n_sc)
    trials = len(stats_list)
    sc = np.array([st.n_sc for st in stats_list], dtype=float)  # (T, n)
    cc = np.array([st.n_cc for st in stats_list], dtype=float)
    sc_mean = sc.mean(axis=0)
    cc_mean = cc.mean(axis=0)
    sc_stderr = sc.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(n)
    cc_stderr = cc.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(n)

    product_mean = np.zeros(n)
    cov = np.zeros(n)
    cov_se = np.zeros(n)
    for k in range(1, n + 1):
        parents = sc[:, k] if k < n else np.ones(trials)  # N_sc[k+1], root = 1
        product_mean[k - 1] = float(np.mean(cc[:, k - 1] * parents))
        a = cc[:, k - 1] / L
        b = parents / (L ** (n - k)) if k < n else parents
        ab_mean = float(np.mean(a * b))
        cov[k - 1] = ab_mean - float(np.mean(a)) * float(np.mean(b))
        influence = (a - a.mean()) * (b - b.mean()) - cov[k - 1]
        if trials > 1:
            cov_se[k - 1] = float(influence.std(ddof=1)) / math.sqrt(trials)
    return LevelCountSummary(
        n=n,
        L=L,
        trials=trials,
        sc_mean=sc_mean,
        sc_stderr=sc_stderr,
        cc_mean=cc_mean,
        cc_stderr=cc_stderr,
        cc_sc_product_mean=product_mean,
        indicator_cov=cov,
        indicator_cov_stderr=cov_se,
    )
