"""MIMO problem instance generation and search-radius calibration.

Instances follow the block Rayleigh fading model r = H s + v with unit
mean-energy symbols drawn uniformly from a constellation, channel entries
circularly-symmetric complex Gaussian with unit variance, and noise entries
circularly-symmetric complex Gaussian with variance sigma2. The SNR
convention is rho = m / sigma2.

All sampling takes an explicit numpy Generator. Reproducible per-trial
substreams come from ``substream_rng`` which keys a counter-based Philox
generator on (master_seed, *path), so results never depend on worker
scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammainc

from .constellation import Constellation

ALPHA_BISECTION_TOL = 1e-10
DEFAULT_EPSILON = 0.01


@dataclass(frozen=True)
class MimoInstance:
    """One channel use: r = h @ s_bar + v, exactly as constructed."""

    h: np.ndarray
    s_bar: np.ndarray
    s_indices: np.ndarray
    v: np.ndarray
    r: np.ndarray
    sigma2: float
    rho: float

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[1]


def substream_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Independent substream keyed on (master_seed, *path).

    Philox is counter based, so any (seed, path) pair yields the same
    stream on every platform and under any worker layout.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def sample_channel(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """m x n matrix of unit-variance circularly-symmetric complex Gaussians
    (real and imaginary parts each Normal(0, 1/2))."""
    if m < n or n < 1:
        raise ValueError(f"need m >= n >= 1, got m={m}, n={n}")
    re = rng.standard_normal((m, n))
    im = rng.standard_normal((m, n))
    return math.sqrt(0.5) * (re + 1j * im)


def sample_symbols(c: Constellation, n: int, rng: np.random.Generator, return_indices: bool = False):
    """n i.i.d. uniform draws from the constellation points."""
    idx = rng.integers(0, c.size, size=n)
    symbols = c.points[idx]
    if return_indices:
        return symbols, idx
    return symbols


def sample_noise(m: int, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """m complex Gaussian noise samples with per-entry variance sigma2.

    sigma2 = 0 is allowed for noise-free instances and yields the zero
    vector (one Gaussian draw is still consumed so paired runs at different
    noise levels stay aligned).
    """
    if sigma2 < 0:
        raise ValueError(f"noise variance must be nonnegative, got {sigma2}")
    re = rng.standard_normal(m)
    im = rng.standard_normal(m)
    return math.sqrt(sigma2 / 2.0) * (re + 1j * im)


@lru_cache(maxsize=256)
def radius_alpha(n: int, epsilon: float = DEFAULT_EPSILON) -> float:
    """Radius factor alpha such that Pr(G <= alpha * n) = 1 - epsilon for
    G a sum of n unit-mean exponentials (Gamma shape n, scale 1).

    G models the scaled noise energy ||v||^2 / sigma2, so a squared radius
    of alpha * n * sigma2 contains the transmitted vector with probability
    1 - epsilon. Solved by bisection on the regularized lower incomplete
    gamma function to an absolute tolerance of 1e-10.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    target = 1.0 - epsilon
    lo = 0.0
    hi = 1.0
    while gammainc(n, hi * n) < target:
        hi *= 2.0
    while hi - lo > ALPHA_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if gammainc(n, mid * n) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def snr_db_to_sigma2(snr_db: float, m: int) -> float:
    """Noise variance for a target SNR in dB under rho = m / sigma2."""
    return m / (10.0 ** (snr_db / 10.0))


def make_instance(
    c: Constellation, m: int, n: int, sigma2: float, rng: np.random.Generator
) -> MimoInstance:
    """Draw one (H, s_bar, v) triple and assemble the received vector."""
    h = sample_channel(m, n, rng)
    s_bar, idx = sample_symbols(c, n, rng, return_indices=True)
    v = sample_noise(m, sigma2, rng)
    r = h @ s_bar + v
    rho = m / sigma2 if sigma2 > 0 else math.inf
    return MimoInstance(h=h, s_bar=s_bar, s_indices=idx, v=v, r=r, sigma2=float(sigma2), rho=rho)
