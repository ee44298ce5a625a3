"""Complex matrix kernels: Givens QR with operation counters, pseudo-inverse,
pseudo-inverse row norms, and the shifted-column QR family used by the
modified predict-and-change ordering.

The QR factorization is built from two primitive operations:

* rotation: multiply a row segment by a unit-modulus phase so the leading
  entry becomes real (and nonnegative);
* cancellation: a real 2x2 Givens rotation across two rows annihilating a
  real subdiagonal entry.

Both primitives are counted, together with the length of the row segment
they acted on, so the family cost claims can be checked under any
nonnegative nondecreasing per-segment cost model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import RankDeficientError

RANK_TOL_FACTOR = 1e-10


@dataclass(frozen=True)
class QRCostModel:
    """Per-operation cost as a function of the row segment length.

    Both callables must be nonnegative and nondecreasing in the segment
    length; the default charges one abstract unit per operation.
    """

    rot_cost: Callable[[int], float] = lambda seg: 1.0
    can_cost: Callable[[int], float] = lambda seg: 1.0

    def price(self, rot_segments: Sequence[int], can_segments: Sequence[int]) -> float:
        total = 0.0
        for seg in rot_segments:
            total += self.rot_cost(seg)
        for seg in can_segments:
            total += self.can_cost(seg)
        return total


UNIT_COST = QRCostModel()


@dataclass(frozen=True)
class QRFactorization:
    """QR factors plus the rotation/cancellation work that produced them.

    ``q`` has orthonormal columns (m x n), ``r`` is n x n upper triangular
    with a real nonnegative diagonal. ``rot_segments``/``can_segments`` hold
    the row-segment length of every primitive performed, in order.
    """

    q: np.ndarray
    r: np.ndarray
    rot_segments: tuple[int, ...] = ()
    can_segments: tuple[int, ...] = ()

    @property
    def rotations(self) -> int:
        return len(self.rot_segments)

    @property
    def cancellations(self) -> int:
        return len(self.can_segments)


class _GivensWorkspace:
    """In-place rotation/cancellation engine acting on (R, Q) pairs."""

    def __init__(self, r: np.ndarray, q: np.ndarray):
        self.r = r
        self.q = q
        self.rot_segments: list[int] = []
        self.can_segments: list[int] = []

    def rotate(self, row: int, col: int, n: int) -> None:
        """Phase-align entry (row, col) to the real axis; acts on columns
        col..n-1 of the row. Counted even when the entry is already real."""
        z = self.r[row, col]
        mag = abs(z)
        if mag > 0.0:
            phase = np.conj(z) / mag
            self.r[row, col:n] *= phase
            self.q[:, row] *= np.conj(phase)
        self.r[row, col] = mag
        self.rot_segments.append(n - col)

    def cancel(self, pivot_row: int, target_row: int, col: int, n: int) -> None:
        """Annihilate the real entry (target_row, col) against the real pivot
        (pivot_row, col) with a real 2x2 Givens rotation."""
        a = self.r[pivot_row, col].real
        b = self.r[target_row, col].real
        rad = float(np.hypot(a, b))
        if rad > 0.0:
            cth = a / rad
            sth = b / rad
            top = self.r[pivot_row, col:n].copy()
            bot = self.r[target_row, col:n]
            self.r[pivot_row, col:n] = cth * top + sth * bot
            self.r[target_row, col:n] = -sth * top + cth * bot
            qa = self.q[:, pivot_row].copy()
            qb = self.q[:, target_row]
            self.q[:, pivot_row] = cth * qa + sth * qb
            self.q[:, target_row] = -sth * qa + cth * qb
        self.r[pivot_row, col] = rad
        self.r[target_row, col] = 0.0
        self.can_segments.append(n - col)


def qr_givens(h: np.ndarray) -> QRFactorization:
    """QR factorization of an m x n complex matrix (m >= n) via rotations
    and cancellations.

    Column k (0-based) rotates rows k..m-1 and cancels rows k+1..m-1, each
    over the trailing n-k column segment; for square input this is the
    (n-k+1)-rotation / (n-k)-cancellation pattern per column (1-indexed).
    The real nonnegative diagonal makes the factorization unique for
    full-rank input.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {h.shape}")
    m, n = h.shape
    if m < n:
        raise ValueError(f"need at least as many rows as columns, got {m}x{n}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix entries must be finite")

    r = h.astype(complex, copy=True)
    q = np.eye(m, dtype=complex)
    ws = _GivensWorkspace(r, q)
    for k in range(n):
        for i in range(k, m):
            ws.rotate(i, k, n)
        for i in range(k + 1, m):
            ws.cancel(k, i, k, n)
    return QRFactorization(
        q=q[:, :n],
        r=r[:n, :n],
        rot_segments=tuple(ws.rot_segments),
        can_segments=tuple(ws.can_segments),
    )


def pseudo_inverse(
    h: np.ndarray,
    factorization: QRFactorization | None = None,
    rank_tol_factor: float = RANK_TOL_FACTOR,
) -> np.ndarray:
    """Left pseudo-inverse of a full-column-rank m x n matrix (m >= n),
    computed from the QR factors as R^-1 Q* rather than by inverting the
    Gram matrix.

    Raises RankDeficientError when the smallest R diagonal falls at or
    below ``rank_tol_factor`` times the largest.
    """
    h = np.asarray(h, dtype=complex)
    fact = factorization if factorization is not None else qr_givens(h)
    diag = fact.r.diagonal().real
    tol = rank_tol_factor * float(diag.max())
    if float(diag.min()) <= tol:
        raise RankDeficientError(
            f"matrix is numerically rank deficient (min diagonal {diag.min():.3e})"
        )
    return scipy.linalg.solve_triangular(fact.r, fact.q.conj().T, lower=False)


def row_norms_sq(hdag: np.ndarray) -> np.ndarray:
    """Squared Euclidean norm of each row."""
    hdag = np.asarray(hdag, dtype=complex)
    return np.sum(hdag.real**2 + hdag.imag**2, axis=1)


def derived_qr_family(
    h_sorted: np.ndarray, cost_model: QRCostModel = UNIT_COST
) -> tuple[list[QRFactorization], float, float]:
    """QR factorizations of the n column arrangements that keep the given
    column order but move one column to the rightmost position.

    ``h_sorted`` columns are expected in nonincreasing order of their
    pseudo-inverse row norms. Member ``i`` factors the matrix whose last
    column is column ``i``; member ``n-1`` is the direct factorization of
    the input, and the others are derived from its triangular factor by a
    column shift and a short re-triangularization of the disturbed trailing
    block. Returns ``(members, cost_qr, cost_net)`` where ``cost_qr`` prices
    the direct factorization and ``cost_net`` the whole family under
    ``cost_model``; the family construction keeps ``cost_net < 2*cost_qr``.
    """
    h_sorted = np.asarray(h_sorted, dtype=complex)
    m, n = h_sorted.shape
    base = qr_givens(h_sorted)
    cost_qr = cost_model.price(base.rot_segments, base.can_segments)
    cost_net = cost_qr
    members: list[QRFactorization] = [base] * n  # placeholder, filled below
    members[n - 1] = base

    for i in range(n - 1):
        cols = list(range(n))
        cols.pop(i)
        cols.append(i)
        r_shift = base.r[:, cols].copy()
        q_shift = base.q.copy()
        ws = _GivensWorkspace(r_shift, q_shift)
        # Shifted columns i..n-2 each expose one real subdiagonal entry (the
        # old diagonal); the pivot above it turned complex, so each column
        # needs one rotation plus one cancellation, and the moved column
        # needs one final rotation of its diagonal.
        for j in range(i, n - 1):
            ws.rotate(j, j, n)
            ws.cancel(j, j + 1, j, n)
        ws.rotate(n - 1, n - 1, n)
        members[i] = QRFactorization(
            q=q_shift,
            r=r_shift,
            rot_segments=tuple(ws.rot_segments),
            can_segments=tuple(ws.can_segments),
        )
        cost_net += cost_model.price(ws.rot_segments, ws.can_segments)
    return members, cost_qr, cost_net
