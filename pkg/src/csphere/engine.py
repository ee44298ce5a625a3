"""Depth-first sphere search over constellation trees.

Four variants share one search skeleton:

* ``plain-sd``: natural child order, every child of a surviving parent gets
  a partial-distance update (the L-expansion behavior);
* ``se-sd``: children visited in ascending partial distance, which needs
  explicit updates for all siblings, plus a short-circuit that skips the
  remaining siblings once one violates the sphere constraint;
* ``csd``: a per-symbol circular prescreen (|x_k - s_k|^2 <= C * delta_k^2,
  a necessary condition for the sphere constraint) filters children before
  any partial-distance work;
* ``c-csd``: the prescreened search visiting children in ascending circle
  metric, which needs no per-parent sorting because the metric is the same
  under every parent.

The tree runs from level n (root) to level 1 (leaf). The sphere test is
strict (d < C), the prescreen inclusive (metric <= C * delta^2). Reaching a
leaf inside the sphere shrinks the radius to the leaf distance; exhausting
the root without a candidate grows the initial radius additively and
restarts, so the search always terminates with an exact maximum-likelihood
solution.

Prescreen bookkeeping: the circle-metric table is built once per problem
(charged as preprocessing), each restart epoch rescreens every level in
full, and radius shrinks refresh the thresholds and re-filter the cached
survivor sets without recomputing metrics, keeping the test count at L per
level per epoch.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import DEFAULT_EPSILON, radius_alpha
from .constellation import Constellation
from .errors import SearchSpaceTooLargeError
from .flops import FlopLedger
from .linalg import derived_qr_family, pseudo_inverse, qr_givens, row_norms_sq
from .ordering import (
    compute_pruning_profile,
    delta2_sorted_columns,
    pac_full_order,
    pac_modified_order,
    pinv_order,
)

VARIANTS = ("plain-sd", "se-sd", "csd", "c-csd")
ORDERINGS = ("natural", "pinv", "pac-full", "pac-modified")
BRUTE_FORCE_GUARD = 10**7

# Frozen-radius searches for order-insensitive variants run level-batched
# (identical trajectory and counters, one vectorized pass per level); tests
# flip this off to compare against the depth-first reference.
FROZEN_BATCH = True


@dataclass(frozen=True)
class DetectorConfig:
    """Detector variant, symbol ordering, and radius policy.

    ``radius_growth`` scales the additive restart increment (1.0 restarts
    with C0 + C0_initial). ``frozen_radius`` disables both shrinking and
    restarts so surviving-node counts match the fixed-radius analysis
    setting; a frozen search may end without a candidate. With
    ``check_cc_chain`` every sphere-constraint pass also evaluates the
    prescreen at the same radius and records violations (instrumentation
    only, never charged).
    """

    variant: str = "plain-sd"
    ordering: str = "natural"
    epsilon: float = DEFAULT_EPSILON
    radius_growth: float = 1.0
    frozen_radius: bool = False
    check_cc_chain: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}, expected one of {ORDERINGS}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.radius_growth <= 0.0:
            raise ValueError(f"radius_growth must be positive, got {self.radius_growth}")

    @property
    def uses_cc(self) -> bool:
        return self.variant in ("csd", "c-csd")


@dataclass(frozen=True)
class PreprocessedProblem:
    """QR-transformed instance ready for the tree search.

    ``r_mat`` and ``y`` come from the QR of the column-permuted channel;
    ``x`` (the unconstrained estimate H^+ r) and ``delta2`` (squared row
    norms of H^+) are reindexed by ``perm``, which maps tree level (leaf
    first) to original symbol index. ``c0`` is the initial squared radius.
    """

    r_mat: np.ndarray
    y: np.ndarray
    x: np.ndarray
    delta2: np.ndarray
    c0: float
    perm: np.ndarray


@dataclass
class SearchStats:
    """Per-level counters and the modeled-FLOP ledger for one search.

    ``n_sc[k-1]`` counts nodes passing the sphere test at level k at the
    radius current when tested (exactly the fixed-radius surviving count in
    frozen mode); ``n_cc[k-1]`` counts constellation points passing the
    prescreen at the final radius. ``ped_computations`` and ``cc_tests``
    count work performed, not survivors.
    """

    n_sc: np.ndarray
    n_cc: np.ndarray
    ped_computations: np.ndarray
    cc_tests: np.ndarray
    nodes_visited: int
    radius_updates: int
    radius_restarts: int
    modeled_flops: int
    wall_time: float
    found: bool
    best_metric: float
    cc_chain_violations: int
    ledger: FlopLedger


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def residual_sq(h: np.ndarray, r: np.ndarray, s: np.ndarray) -> float:
    """Squared Euclidean distance ||r - h s||^2."""
    d = r - h @ s
    return float(np.sum(d.real**2 + d.imag**2))


def ped_step(b_next: complex, d_next: float, r_kk: float, s_k: complex) -> float:
    """One partial-distance update: d_k = d_next + |b_next - r_kk * s_k|^2.

    Never below ``d_next``, so partial distances grow monotonically toward
    the leaf.
    """
    if d_next < 0:
        raise ValueError(f"partial distance must be nonnegative, got {d_next}")
    z = b_next - r_kk * s_k
    return d_next + (z.real * z.real + z.imag * z.imag)


def cc_test(x_k: complex, s_k: complex, threshold: float) -> bool:
    """Inclusive circular prescreen: |x_k - s_k|^2 <= threshold."""
    z = x_k - s_k
    return (z.real * z.real + z.imag * z.imag) <= threshold


@dataclass(frozen=True)
class LevelContext:
    """Per-level quantities needed to order the children of one parent."""

    points: np.ndarray
    x_k: complex | None = None
    b_next: complex | None = None
    r_kk: float | None = None
    d_next: float = 0.0


def order_children(variant: str, ctx: LevelContext) -> np.ndarray:
    """Visiting order of constellation indices for one parent.

    Natural order for ``plain-sd`` and ``csd``; ascending circle metric for
    ``c-csd`` (identical under every parent at the level); ascending child
    partial distance for ``se-sd`` (parent specific). Equal keys keep
    ascending constellation index.
    """
    L = ctx.points.size
    if variant in ("plain-sd", "csd"):
        return np.arange(L)
    if variant == "c-csd":
        if ctx.x_k is None:
            raise ValueError("c-csd ordering needs x_k")
        return np.argsort(_abs2(ctx.x_k - ctx.points), kind="stable")
    if variant == "se-sd":
        if ctx.b_next is None or ctx.r_kk is None:
            raise ValueError("se-sd ordering needs b_next and r_kk")
        peds = ctx.d_next + _abs2(ctx.b_next - ctx.r_kk * ctx.points)
        return np.argsort(peds, kind="stable")
    raise ValueError(f"unknown variant {variant!r}")


def initial_radius_sq(m: int, sigma2: float, epsilon: float) -> float:
    """Squared radius containing the noise energy with probability
    1 - epsilon: the (1 - epsilon) quantile of ||v||^2."""
    return radius_alpha(m, epsilon) * m * sigma2


def preprocess(
    h: np.ndarray,
    r: np.ndarray,
    sigma2: float,
    constellation: Constellation,
    config: DetectorConfig,
) -> PreprocessedProblem:
    """QR-transform an instance under the configured symbol ordering.

    The pseudo-inverse quantities are computed once in natural order and
    reindexed by the chosen permutation (they track columns under
    permutation). The predict-and-change orderings depend on the received
    vector through the unconstrained estimate, so they are recomputed per
    call; the modified variant selects its factorization from the
    shifted-column QR family of the norm-sorted channel instead of running
    a fresh factorization.
    """
    h = np.asarray(h, dtype=complex)
    r = np.asarray(r, dtype=complex)
    m, n = h.shape
    base = qr_givens(h)
    hdag = pseudo_inverse(h, factorization=base)
    delta2 = row_norms_sq(hdag)
    x = hdag @ r

    if config.ordering == "natural":
        perm = np.arange(n)
    elif config.ordering == "pinv":
        perm = pinv_order(delta2)
    elif config.ordering == "pac-full":
        profile = compute_pruning_profile(x, delta2, constellation)
        perm = pac_full_order(profile)
    else:
        profile = compute_pruning_profile(x, delta2, constellation)
        perm = pac_modified_order(profile, delta2)

    if config.ordering == "pac-modified" and n > 1:
        sort_perm = delta2_sorted_columns(delta2)
        members, _, _ = derived_qr_family(h[:, sort_perm])
        root = perm[-1]
        pos = int(np.flatnonzero(sort_perm == root)[0])
        fact = members[pos]
    else:
        fact = qr_givens(h[:, perm])

    y = fact.q.conj().T @ r
    c0 = initial_radius_sq(m, sigma2, config.epsilon)
    return PreprocessedProblem(
        r_mat=fact.r,
        y=y,
        x=x[perm],
        delta2=delta2[perm],
        c0=c0,
        perm=perm,
    )


def search(
    problem: PreprocessedProblem,
    constellation: Constellation,
    config: DetectorConfig,
) -> tuple[np.ndarray | None, SearchStats]:
    """Run the configured sphere search.

    Returns the detected symbol vector in original symbol order together
    with the search statistics. In frozen-radius mode the result is the best
    leaf inside the fixed sphere, or None when the sphere is empty; in
    normal mode the result is always the exact maximum-likelihood vector
    (up to exact distance ties, resolved first-found).
    """
    t_start = time.perf_counter()
    r_mat = problem.r_mat
    n = r_mat.shape[0]
    pts = constellation.points
    L = constellation.size
    variant = config.variant
    uses_cc = config.uses_cc
    frozen = config.frozen_radius

    ledger = FlopLedger(n_levels=n)
    n_sc = np.zeros(n, dtype=np.int64)
    ped_counts = np.zeros(n, dtype=np.int64)
    cc_counts = np.zeros(n, dtype=np.int64)
    nodes_visited = 0
    radius_updates = 0
    radius_restarts = 0
    cc_chain_violations = 0

    delta2 = np.asarray(problem.delta2, dtype=float)
    y = problem.y
    rdiag = r_mat.diagonal().real.copy()
    r_rows = [r_mat[li, li + 1 :] for li in range(n)]

    need_metric = uses_cc or config.ordering.startswith("pac") or config.check_cc_chain
    metric = None
    if need_metric:
        dx = problem.x[:, None] - pts[None, :]
        metric = dx.real**2 + dx.imag**2  # (n, L)
    if uses_cc or config.ordering.startswith("pac"):
        ledger.charge_preprocessing(L)

    sorted_idx: list[np.ndarray] = []
    sorted_metric: list[np.ndarray] = []
    if variant == "c-csd":
        for li in range(n):
            order = np.argsort(metric[li], kind="stable")
            sorted_idx.append(order)
            sorted_metric.append(metric[li][order])
            ledger.charge_enumeration(li + 1, L)

    thresholds = np.zeros(n)
    alive: list[np.ndarray] = [np.arange(L)] * n
    cutoff = np.full(n, L, dtype=np.int64)
    all_indices = np.arange(L)

    # Search-wide mutable state shared by the closures below.
    C = 0.0
    found = False
    best_metric = math.inf
    best_idx: np.ndarray | None = None
    s_idx = np.zeros(n, dtype=np.int64)
    s_val = np.zeros(n, dtype=complex)

    def screen_all(charge: bool) -> None:
        """Full prescreen of every level at the current radius; one test per
        constellation point per level."""
        nonlocal alive
        for li in range(n):
            thresholds[li] = C * delta2[li]
            cc_counts[li] += L
            if charge:
                ledger.charge_cc(li + 1, L)
            if variant == "csd":
                alive[li] = all_indices[metric[li] <= thresholds[li]]
            else:
                cutoff[li] = int(
                    np.searchsorted(sorted_metric[li], thresholds[li], side="right")
                )

    def refilter() -> None:
        """Tighten the cached survivor sets after a radius shrink, reusing
        the stored metrics (no new tests)."""
        for li in range(n):
            thresholds[li] = C * delta2[li]
            if variant == "csd":
                keep = metric[li][alive[li]] <= thresholds[li]
                alive[li] = alive[li][keep]
            else:
                hi = int(cutoff[li])
                cutoff[li] = int(
                    np.searchsorted(sorted_metric[li][:hi], thresholds[li], side="right")
                )

    def expand(li: int, d_parent: float) -> None:
        nonlocal C, found, best_metric, best_idx
        nonlocal nodes_visited, radius_updates, cc_chain_violations

        if variant == "csd":
            cand = alive[li]
        elif variant == "c-csd":
            cand = sorted_idx[li][: cutoff[li]]
        else:
            cand = all_indices
        count = len(cand)
        if count == 0:
            return

        if li == n - 1:
            b = y[li]
        else:
            b = y[li] - np.dot(r_rows[li], s_val[li + 1 :])
        z = b - rdiag[li] * pts[cand]
        peds = d_parent + z.real * z.real + z.imag * z.imag
        ledger.charge_ped_batch(li + 1, count)
        ped_counts[li] += count

        if variant == "se-sd":
            order = np.argsort(peds, kind="stable")
            ledger.charge_enumeration(li + 1, L)
            cand = cand[order]
            peds = peds[order]

        cand_list = cand.tolist()
        ped_list = peds.tolist()
        for t in range(count):
            ped = ped_list[t]
            nodes_visited += 1
            if ped < C:
                n_sc[li] += 1
                j = cand_list[t]
                if config.check_cc_chain:
                    if metric[li][j] > C * delta2[li]:
                        cc_chain_violations += 1
                if li == 0:
                    s_idx[0] = j
                    found = True
                    if ped < best_metric:
                        best_metric = ped
                        best_idx = s_idx.copy()
                    if not frozen:
                        C = ped
                        radius_updates += 1
                        if uses_cc:
                            ledger.charge_threshold_refresh()
                            refilter()
                else:
                    s_idx[li] = j
                    s_val[li] = pts[j]
                    expand(li - 1, ped)
            elif variant == "se-sd":
                break

    ran_batched = False
    if frozen and FROZEN_BATCH and variant != "se-sd" and not config.check_cc_chain:
        # Fixed radius and order-insensitive pruning: process whole levels at
        # once. Visits the same nodes with the same charges as the
        # depth-first pass, parents in visit order so ties resolve alike.
        ran_batched = True
        C = problem.c0
        if uses_cc:
            screen_all(charge=False)
        d_parent = np.zeros(1)
        s_idx_mat = np.zeros((1, 0), dtype=np.int64)
        s_val_mat = np.zeros((1, 0), dtype=complex)
        for li in range(n - 1, -1, -1):
            if variant == "csd":
                cand = alive[li]
            elif variant == "c-csd":
                cand = sorted_idx[li][: cutoff[li]]
            else:
                cand = all_indices
            cnt = len(cand)
            parents = d_parent.shape[0]
            if cnt == 0 or parents == 0:
                break
            if li == n - 1:
                b = np.full(parents, y[li])
            else:
                b = y[li] - s_val_mat @ r_rows[li]
            z = b[:, None] - rdiag[li] * pts[cand][None, :]
            peds = d_parent[:, None] + z.real * z.real + z.imag * z.imag
            ledger.charge_ped_level(li + 1, cnt, parents)
            ped_counts[li] += parents * cnt
            nodes_visited += parents * cnt
            mask = peds < C
            n_pass = int(mask.sum())
            n_sc[li] += n_pass
            if li == 0:
                if n_pass:
                    found = True
                    flat = int(np.where(mask, peds, np.inf).argmin())
                    pr, ci = divmod(flat, cnt)
                    best_metric = float(peds[pr, ci])
                    leaf = np.empty(n, dtype=np.int64)
                    leaf[0] = cand[ci]
                    if n > 1:
                        leaf[1:] = s_idx_mat[pr]
                    best_idx = leaf
                break
            if n_pass == 0:
                break
            rows, cols = np.nonzero(mask)
            d_parent = peds[mask]
            chosen = cand[cols]
            s_val_mat = np.concatenate([pts[chosen][:, None], s_val_mat[rows]], axis=1)
            s_idx_mat = np.concatenate([chosen[:, None], s_idx_mat[rows]], axis=1)

    if not ran_batched:
        c0_eff = problem.c0
        grow = config.radius_growth * (problem.c0 if problem.c0 > 0 else 1.0)
        first_epoch = True
        while True:
            C = c0_eff
            if uses_cc:
                if not first_epoch:
                    ledger.charge_threshold_refresh()
                screen_all(charge=not first_epoch)
            expand(n - 1, 0.0)
            if found or frozen:
                break
            radius_restarts += 1
            c0_eff += grow
            first_epoch = False

    n_cc = np.zeros(n, dtype=np.int64)
    for li in range(n):
        if variant == "csd":
            n_cc[li] = len(alive[li])
        elif variant == "c-csd":
            n_cc[li] = cutoff[li]
        else:
            n_cc[li] = L

    s_hat = None
    if best_idx is not None:
        orig = np.empty(n, dtype=np.int64)
        orig[problem.perm] = best_idx
        s_hat = pts[orig]

    stats = SearchStats(
        n_sc=n_sc,
        n_cc=n_cc,
        ped_computations=ped_counts,
        cc_tests=cc_counts,
        nodes_visited=nodes_visited,
        radius_updates=radius_updates,
        radius_restarts=radius_restarts,
        modeled_flops=ledger.total,
        wall_time=time.perf_counter() - t_start,
        found=found,
        best_metric=best_metric,
        cc_chain_violations=cc_chain_violations,
        ledger=ledger,
    )
    return s_hat, stats


def detect_ml_bruteforce(
    h: np.ndarray,
    r: np.ndarray,
    constellation: Constellation,
    n: int | None = None,
    guard: int = BRUTE_FORCE_GUARD,
) -> np.ndarray:
    """Exhaustive maximum-likelihood detection, the reference oracle.

    Enumerates all L^n candidates in lexicographic index order (first symbol
    most significant) and returns the first minimizer of ||r - h s||^2, so
    exact-distance ties resolve to the lexicographically smallest candidate.
    """
    h = np.asarray(h, dtype=complex)
    r = np.asarray(r, dtype=complex)
    if n is None:
        n = h.shape[1]
    L = constellation.size
    total = L**n
    if total > guard:
        raise SearchSpaceTooLargeError(
            f"{L}^{n} = {total} candidates exceeds the guard of {guard}"
        )
    pts = constellation.points
    shape = (L,) * n
    best_dist = math.inf
    best_flat = -1
    chunk = 1 << 16
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        flat = np.arange(start, stop)
        idx = np.array(np.unravel_index(flat, shape))  # (n, chunk)
        cands = pts[idx]  # (n, chunk)
        resid = r[:, None] - h @ cands
        dists = np.sum(resid.real**2 + resid.imag**2, axis=0)
        pos = int(np.argmin(dists))
        if dists[pos] < best_dist:
            best_dist = float(dists[pos])
            best_flat = start + pos
    best_idx = np.array(np.unravel_index(best_flat, shape))
    return pts[best_idx]
