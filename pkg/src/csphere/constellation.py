"""Construction and characterization of two-dimensional signal constellations.

A constellation is an ordered set of L distinct complex points. Built-in
constructors (rectangular QAM, PSK, star QAM) return sets normalized to unit
mean energy; arbitrary sets can be loaded from text files with one "re,im"
pair per line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstellationFormatError

ENERGY_TOL = 1e-12
DISTINCT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Constellation:
    """Ordered set of complex signal points.

    Points keep their construction order; later tie-breaking in sorting
    operations falls back on this index. Instances are immutable and safe
    to share across workers.
    """

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        pts = pts.reshape(-1)
        if pts.size < 2:
            raise ValueError(f"constellation needs at least 2 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("constellation points must be finite")
        diff = pts[:, None] - pts[None, :]
        dist = np.abs(diff)
        np.fill_diagonal(dist, np.inf)
        if dist.min() <= DISTINCT_TOL:
            i, j = np.unravel_index(np.argmin(dist), dist.shape)
            raise ValueError(f"constellation points {i} and {j} coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return int(self.points.size)

    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))

    def mean_point(self) -> complex:
        return complex(np.mean(self.points))

    def min_distance(self) -> float:
        diff = self.points[:, None] - self.points[None, :]
        dist = np.abs(diff)
        np.fill_diagonal(dist, np.inf)
        return float(dist.min())


def normalize(c: Constellation) -> Constellation:
    """Scale a constellation to unit mean energy.

    Idempotent: a set already within ``ENERGY_TOL`` of unit energy is
    returned unchanged, so ``normalize(normalize(c))`` is exactly
    ``normalize(c)``.
    """
    energy = c.mean_energy()
    if abs(energy - 1.0) <= ENERGY_TOL:
        return c
    return Constellation(points=c.points / math.sqrt(energy), label=c.label)


def make_rect_qam(order: int) -> Constellation:
    """Square QAM grid with odd-integer coordinates, unit mean energy.

    ``order`` must be a perfect square of at least 4 (4, 16, 64, 256, ...).
    """
    if order < 4:
        raise ValueError(f"rectangular QAM needs order >= 4, got {order}")
    side = math.isqrt(order)
    if side * side != order:
        raise ValueError(f"rectangular QAM order must be a perfect square, got {order}")
    axis = 2 * np.arange(side) - (side - 1)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    pts = (re + 1j * im).reshape(-1)
    return normalize(Constellation(points=pts, label=f"qam{order}"))


def make_psk(order: int) -> Constellation:
    """L points equally spaced on the unit circle, starting at 1+0j."""
    if order < 2:
        raise ValueError(f"PSK needs order >= 2, got {order}")
    pts = np.exp(2j * np.pi * np.arange(order) / order)
    return normalize(Constellation(points=pts, label=f"psk{order}"))


def make_star_qam(ring_sizes, ring_amplitude_ratios) -> Constellation:
    """Concentric-ring constellation, normalized to unit mean energy.

    ``ring_amplitude_ratios[j]`` is the amplitude of ring ``j + 1`` divided
    by the amplitude of the innermost ring, so sizes ``(8, 24, 32)`` with
    ratios ``(2, 3)`` put the rings at amplitudes proportional to 1:2:3.
    Every ring starts at phase 0.
    """
    ring_sizes = tuple(int(s) for s in ring_sizes)
    ratios = tuple(float(r) for r in ring_amplitude_ratios)
    if not ring_sizes:
        raise ValueError("star QAM needs at least one ring")
    if any(s <= 0 for s in ring_sizes):
        raise ValueError(f"ring sizes must be positive, got {ring_sizes}")
    if len(ratios) != len(ring_sizes) - 1:
        raise ValueError(
            f"expected {len(ring_sizes) - 1} amplitude ratios for "
            f"{len(ring_sizes)} rings, got {len(ratios)}"
        )
    if any(r <= 0 for r in ratios):
        raise ValueError(f"amplitude ratios must be positive, got {ratios}")
    amplitudes = (1.0,) + ratios
    rings = []
    for size, amp in zip(ring_sizes, amplitudes):
        rings.append(amp * np.exp(2j * np.pi * np.arange(size) / size))
    pts = np.concatenate(rings)
    sizes_txt = ",".join(str(s) for s in ring_sizes)
    return normalize(Constellation(points=pts, label=f"star({sizes_txt})"))


def load_constellation(path, normalize_points: bool = False) -> Constellation:
    """Read a constellation from a text file.

    Format: UTF-8, one "re,im" pair per line; lines starting with '#' are
    comments and blank lines are skipped. Parse failures report the 1-based
    line number. Duplicate points and files with fewer than two points are
    rejected.
    """
    pts = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ConstellationFormatError(
                    f"{path}:{lineno}: expected 're,im', got {line!r}", line=lineno
                )
            try:
                re_part = float(parts[0])
                im_part = float(parts[1])
            except ValueError as exc:
                raise ConstellationFormatError(
                    f"{path}:{lineno}: could not parse {line!r}: {exc}", line=lineno
                ) from None
            pts.append(complex(re_part, im_part))
    if len(pts) < 2:
        raise ConstellationFormatError(
            f"{path}: constellation needs at least 2 points, found {len(pts)}"
        )
    arr = np.array(pts, dtype=complex)
    diff = np.abs(arr[:, None] - arr[None, :])
    np.fill_diagonal(diff, np.inf)
    if diff.min() <= DISTINCT_TOL:
        i, j = np.unravel_index(np.argmin(diff), diff.shape)
        raise ConstellationFormatError(
            f"{path}: points {i + 1} and {j + 1} are duplicates"
        )
    c = Constellation(points=arr, label=str(path))
    if normalize_points:
        c = normalize(c)
    return c


def avg_intra_sq_distance(c: Constellation) -> float:
    """Mean squared distance over all ordered point pairs, identical pairs
    included: (1/L^2) * sum_ij |o_i - o_j|^2.

    Algebraically equal to 2*mean|o|^2 - 2*|mean o|^2, hence exactly 2 for
    any zero-mean unit-energy set (all built-in families). Ring-ratio (2, 3)
    star 64-QAM is sometimes quoted as 1.8163 in the literature; the pairwise
    computation here is authoritative for this package and yields 2.
    """
    pts = c.points
    diff = pts[:, None] - pts[None, :]
    return float(np.mean(diff.real**2 + diff.imag**2))
