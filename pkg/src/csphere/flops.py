"""Deterministic modeled-FLOP accounting for detector runs.

Pricing conventions (complex multiply = 4 FLOPs, complex add = 2):

* a partial-distance update costs 6*(n - k) + 9 for the first sibling of a
  parent at level k (the carry term is shared) and 9 for each further
  sibling, comparison against the radius included;
* one circular prescreen test costs 6; tests run as per-level bulk screens,
  and the initial metric table plus first screen of all levels is charged
  as 6*L*n of preprocessing once per problem;
* every radius change recomputes the n per-level thresholds at 1 FLOP each;
* enumeration sorting is charged ceil(L * log2 L) comparison FLOPs per sort
  (per parent for distance-ordered enumeration, once per level for
  metric-ordered enumeration).

Counters are integers and depend only on the search trajectory, never on
wall time or worker layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CC_TEST_FLOPS = 6
PED_SIBLING_FLOPS = 9


def sort_flops(length: int) -> int:
    """Comparison budget for sorting ``length`` values."""
    if length < 2:
        return 0
    return math.ceil(length * math.log2(length))


@dataclass
class FlopLedger:
    """Per-category and per-level FLOP counters for one search."""

    n_levels: int
    ped_first_sibling: int = 0
    ped_other_sibling: int = 0
    cc_test: int = 0
    cc_threshold_refresh: int = 0
    enumeration_overhead: int = 0
    preprocessing: int = 0
    per_level: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.per_level is None:
            self.per_level = np.zeros(self.n_levels, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(
            self.ped_first_sibling
            + self.ped_other_sibling
            + self.cc_test
            + self.cc_threshold_refresh
            + self.enumeration_overhead
            + self.preprocessing
        )

    def charge_ped(self, level_k: int, is_first_sibling: bool) -> int:
        """Partial-distance update at level ``level_k`` (1-based)."""
        if is_first_sibling:
            cost = 6 * (self.n_levels - level_k) + PED_SIBLING_FLOPS
            self.ped_first_sibling += cost
        else:
            cost = PED_SIBLING_FLOPS
            self.ped_other_sibling += cost
        self.per_level[level_k - 1] += cost
        return cost

    def charge_ped_batch(self, level_k: int, count: int) -> int:
        """``count`` sibling updates at one parent, first-sibling carry
        included once."""
        if count <= 0:
            return 0
        first = 6 * (self.n_levels - level_k) + PED_SIBLING_FLOPS
        rest = PED_SIBLING_FLOPS * (count - 1)
        self.ped_first_sibling += first
        self.ped_other_sibling += rest
        self.per_level[level_k - 1] += first + rest
        return first + rest

    def charge_ped_level(self, level_k: int, siblings_per_parent: int, parents: int) -> int:
        """Sibling updates for ``parents`` parents at one level, each
        expanding ``siblings_per_parent`` children."""
        if parents <= 0 or siblings_per_parent <= 0:
            return 0
        first = 6 * (self.n_levels - level_k) + PED_SIBLING_FLOPS
        rest = PED_SIBLING_FLOPS * (siblings_per_parent - 1)
        self.ped_first_sibling += parents * first
        self.ped_other_sibling += parents * rest
        cost = parents * (first + rest)
        self.per_level[level_k - 1] += cost
        return cost

    def charge_cc(self, level_k: int, count: int = 1) -> int:
        cost = CC_TEST_FLOPS * count
        self.cc_test += cost
        self.per_level[level_k - 1] += cost
        return cost

    def charge_threshold_refresh(self) -> int:
        """One multiplication per level whenever the radius changes."""
        self.cc_threshold_refresh += self.n_levels
        self.per_level += 1
        return self.n_levels

    def charge_enumeration(self, level_k: int, length: int) -> int:
        cost = sort_flops(length)
        self.enumeration_overhead += cost
        self.per_level[level_k - 1] += cost
        return cost

    def charge_preprocessing(self, constellation_size: int) -> int:
        """Metric table construction and initial screen, 6*L per level."""
        cost = CC_TEST_FLOPS * constellation_size * self.n_levels
        self.preprocessing += cost
        self.per_level += CC_TEST_FLOPS * constellation_size
        return cost


def structural_totals(stats, n: int, constellation_size: int) -> tuple[int, int]:
    """Fixed-radius structural cost model evaluated from measured per-level
    counts.

    Given the surviving-node counts ``stats.n_sc`` (levels 1..n, with the
    virtual level n+1 holding one node) and prescreen-surviving point counts
    ``stats.n_cc``, returns the pair

    * plain search: sum_k (6*(n-k) + 9*L) * N_sc[k+1]
    * prescreened search: sum_k 6*L + (6*(n-k) + 9*N_cc[k]) * N_sc[k+1]

    These model one pass at a fixed radius; for a radius-shrinking run they
    differ from the live ledger and both views are reported.
    """
    L = constellation_size
    n_sc = np.asarray(stats.n_sc, dtype=np.int64)
    n_cc = np.asarray(stats.n_cc, dtype=np.int64)
    if n_sc.shape != (n,) or n_cc.shape != (n,):
        raise ValueError("per-level counts must have length n")
    c_sd = 0
    c_csd = 0
    for k in range(1, n + 1):
        parents = 1 if k == n else int(n_sc[k])  # N_sc[k+1], virtual root = 1
        c_sd += (6 * (n - k) + 9 * L) * parents
        c_csd += 6 * L + (6 * (n - k) + 9 * int(n_cc[k - 1])) * parents
    return int(c_sd), int(c_csd)
