"""Symbol/column orderings that move high pruning potential toward the tree
root: minimum circles, pruning potentials, and the predict-and-change and
inverse-channel-norm permutations.

A permutation is an integer array ``perm`` of length n mapping tree level to
original symbol index: ``perm[0]`` sits at the leaf (level 1) and
``perm[n-1]`` at the root (level n). The column order of the reordered
channel matrix is exactly ``perm``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation


@dataclass(frozen=True)
class PruningProfile:
    """Minimum-circle summary of one received vector.

    ``c_min`` is the smallest radius factor for which every per-symbol
    circle holds at least one constellation point; ``mc_sets[i]`` lists the
    point indices inside symbol i's circle; ``potentials[i]`` is the number
    of points outside it, an upper bound on how many points the prescreen
    can remove for that symbol.
    """

    c_min: float
    mc_sets: tuple[tuple[int, ...], ...]
    potentials: np.ndarray

    def __post_init__(self):
        pot = np.asarray(self.potentials, dtype=np.int64)
        pot.setflags(write=False)
        object.__setattr__(self, "potentials", pot)


def compute_pruning_profile(
    x: np.ndarray, delta2: np.ndarray, c: Constellation
) -> PruningProfile:
    """Minimum circles and pruning potentials for the unconstrained estimate
    ``x`` with per-symbol scale factors ``delta2``.

    A point belongs to symbol i's circle iff its squared distance to x_i is
    at most c_min * delta2[i] (inclusive), where c_min is the max over
    symbols of the scaled distance to the nearest point. Each set is
    nonempty by construction.
    """
    x = np.asarray(x, dtype=complex)
    delta2 = np.asarray(delta2, dtype=float)
    if np.any(delta2 <= 0):
        raise ValueError("delta2 entries must be positive")
    pts = c.points
    diff = x[:, None] - pts[None, :]
    metrics = diff.real**2 + diff.imag**2  # (n, L)
    # Membership compares in the scaled domain (metric / delta2 <= c_min):
    # the same divisions that define c_min, so the nearest point of the
    # symbol attaining the max always lands inside its own circle.
    scaled = metrics / delta2[:, None]
    c_min = float(scaled.min(axis=1).max())
    member = scaled <= c_min
    mc_sets = tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in member)
    potentials = c.size - member.sum(axis=1)
    return PruningProfile(c_min=c_min, mc_sets=mc_sets, potentials=potentials)


def pac_full_order(profile: PruningProfile) -> np.ndarray:
    """Permutation placing symbols by nondecreasing pruning potential from
    leaf to root, so the root gets the largest potential. Ties keep
    ascending original symbol index."""
    return np.argsort(profile.potentials, kind="stable")


def pac_modified_order(profile: PruningProfile, delta2: np.ndarray) -> np.ndarray:
    """Permutation with the max-potential symbol at the root and the rest
    filling leaf-to-root positions by nonincreasing delta2.

    Potential ties at the root break toward the smaller delta2 (a smaller
    inverse-channel norm indicates higher potential on average), then the
    smaller index. This always selects one of the n arrangements covered by
    the shifted-column QR family of the delta2-sorted matrix.
    """
    delta2 = np.asarray(delta2, dtype=float)
    pot = profile.potentials
    n = pot.size
    best = pot.max()
    tied = np.flatnonzero(pot == best)
    root = int(tied[np.lexsort((tied, delta2[tied]))[0]])
    rest = np.array([i for i in range(n) if i != root], dtype=np.int64)
    rest = rest[np.lexsort((rest, -delta2[rest]))]
    return np.concatenate([rest, [root]]).astype(np.int64)


def pinv_order(delta2: np.ndarray) -> np.ndarray:
    """Permutation placing the smallest inverse-channel row norm at the root
    and the largest at the leaf; ties keep ascending index."""
    delta2 = np.asarray(delta2, dtype=float)
    idx = np.arange(delta2.size)
    return np.lexsort((idx, -delta2)).astype(np.int64)


def delta2_sorted_columns(delta2: np.ndarray) -> np.ndarray:
    """Column order by nonincreasing delta2 with index tie-break; the
    arrangement the shifted-column QR family is built on."""
    return pinv_order(delta2)
