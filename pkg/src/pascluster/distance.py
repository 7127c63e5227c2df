"""Distance machinery on binary images: Euclidean distance transform,
geodesic distances, influence zones and the SKIZ.

Geodesic paths are 8-connected with step costs 1 (axis) and sqrt(2)
(diagonal).  Path lengths are carried as integer step-count pairs and
compared through the canonical float ``straight + diagonal * sqrt(2)``,
which makes equidistance classification exact: two pixels tie only when
their step counts agree, never through accumulated float noise.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import AngularGrid, BinaryMask, LabelMap

__all__ = [
    "DistanceMap",
    "edt",
    "geodesic_distance",
    "influence_zones",
    "skiz",
]

SQRT2 = math.sqrt(2.0)

_NEIGH = [(-1, -1, 1), (-1, 0, 0), (-1, 1, 1),
          (0, -1, 0), (0, 1, 0),
          (1, -1, 1), (1, 0, 0), (1, 1, 1)]


@dataclass(frozen=True)
class DistanceMap:
    """Per-pixel distances in pixel units; unreachable pixels hold +inf."""

    grid: AngularGrid
    dist: np.ndarray

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=np.float64)
        if dist.shape != self.grid.shape:
            raise ValueError("distance array shape does not match grid")
        dist = dist.copy()
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)


def edt(mask: BinaryMask) -> DistanceMap:
    """Exact Euclidean distance to the nearest set pixel; zero on set pixels."""
    bits = mask.bits
    if not bits.any():
        raise ValueError("distance transform needs at least one set pixel")
    dist = ndimage.distance_transform_edt(~bits)
    return DistanceMap(mask.grid, dist)


def geodesic_distance(domain: BinaryMask, src: tuple[int, int],
                      dst: tuple[int, int]) -> float:
    """Length of the shortest 8-connected path inside the domain, or inf.

    Raises when an endpoint lies outside the domain.
    """
    bits = domain.bits
    for name, (r, c) in (("src", src), ("dst", dst)):
        if not (0 <= r < bits.shape[0] and 0 <= c < bits.shape[1]) or not bits[r, c]:
            raise ValueError(f"{name} pixel {(r, c)} is outside the domain")
    if src == dst:
        return 0.0
    nrows, ncols = bits.shape
    best = np.full(bits.shape, np.inf)
    best[src] = 0.0
    # heap entries: (key, straight, diagonal, r, c)
    heap = [(0.0, 0, 0, src[0], src[1])]
    while heap:
        key, na, nb, r, c = heapq.heappop(heap)
        if key > best[r, c]:
            continue
        if (r, c) == dst:
            return key
        for dr, dc, diag in _NEIGH:
            nr, nc = r + dr, c + dc
            if 0 <= nr < nrows and 0 <= nc < ncols and bits[nr, nc]:
                cna, cnb = na + 1 - diag, nb + diag
                ckey = cna + cnb * SQRT2
                if ckey < best[nr, nc]:
                    best[nr, nc] = ckey
                    heapq.heappush(heap, (ckey, cna, cnb, nr, nc))
    return math.inf


def _zone_labels(bits: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Multi-source geodesic label propagation with exact tie detection.

    Every seed pixel is a source at distance zero carrying its label; a
    pixel whose minimal distance is reached from two different labels (or
    only through such tied pixels) gets 0.
    """
    nrows, ncols = bits.shape
    best = np.full(bits.shape, np.inf)
    lab = np.zeros(bits.shape, dtype=np.int32)
    tie = np.zeros(bits.shape, dtype=bool)
    settled = np.zeros(bits.shape, dtype=bool)
    heap = []
    count = 0
    for r, c in np.argwhere(seeds > 0):
        best[r, c] = 0.0
        lab[r, c] = seeds[r, c]
        heapq.heappush(heap, (0.0, count, 0, 0, int(r), int(c)))
        count += 1
    while heap:
        key, _, na, nb, r, c = heapq.heappop(heap)
        if settled[r, c] or key > best[r, c]:
            continue
        settled[r, c] = True
        for dr, dc, diag in _NEIGH:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < nrows and 0 <= nc < ncols and bits[nr, nc]):
                continue
            cna, cnb = na + 1 - diag, nb + diag
            ckey = cna + cnb * SQRT2
            if ckey < best[nr, nc]:
                best[nr, nc] = ckey
                lab[nr, nc] = lab[r, c]
                tie[nr, nc] = tie[r, c]
                heapq.heappush(heap, (ckey, count, cna, cnb, nr, nc))
                count += 1
            elif ckey == best[nr, nc] and (lab[nr, nc] != lab[r, c] or tie[r, c]):
                tie[nr, nc] = True
    lab[tie | ~settled] = 0
    lab[~bits] = 0
    return lab


def influence_zones(domain: BinaryMask, seeds: LabelMap) -> LabelMap:
    """Label each domain pixel with the geodesically strictly-nearest seed.

    Equidistant pixels and pixels unreachable from every seed stay 0.
    Seed pixels must lie inside the domain.
    """
    bits = domain.bits
    seed_arr = seeds.labels
    if seed_arr.shape != bits.shape:
        raise ValueError("seed labels shape does not match domain")
    if not (seed_arr > 0).any():
        raise ValueError("influence zones need at least one seed")
    if np.any((seed_arr > 0) & ~bits):
        raise ValueError("seed pixels must lie inside the domain")
    zones = _zone_labels(bits, seed_arr)
    return LabelMap(domain.grid, _contiguous(zones))


def skiz(domain: BinaryMask, seeds: LabelMap) -> BinaryMask:
    """Domain minus all influence zones: the equidistant skeleton pixels."""
    iz = influence_zones(domain, seeds)
    return BinaryMask(domain.grid, domain.bits & (iz.labels == 0))


def _contiguous(labels: np.ndarray) -> np.ndarray:
    """Remap positive labels onto 1..n keeping first-appearance order."""
    out = labels.copy()
    present = np.unique(labels[labels > 0])
    if present.size and not np.array_equal(present, np.arange(1, present.size + 1)):
        remap = np.zeros(int(present.max()) + 1, dtype=labels.dtype)
        remap[present] = np.arange(1, present.size + 1, dtype=labels.dtype)
        out[labels > 0] = remap[labels[labels > 0]]
    return out
