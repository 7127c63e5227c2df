"""K-Power-Means baselines: the standard iterative variant and the
maxima-seeded, background-thresholded variant.

Both assign parameter points by ``argmin_k power * MCD(point, centroid)``
where MCD is the plain Euclidean distance in (azimuth, elevation) degrees.
The standard variant iterates assignment and power-weighted centroid
updates from K-Means++ style seeds over several restarts; the modified
variant performs a single assignment pass from fixed regional-maxima
centroids after removing the background below the power threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import LabelMap, PasMap
from .morphology import despeckle_smooth
from .threshold import otsu_background, power_threshold
from .watershed import WatershedConfig, foreground_markers

__all__ = [
    "WeightedPoint",
    "KpmConfig",
    "KpmResult",
    "ModifiedKpmResult",
    "mcd",
    "kpm_assign",
    "kpm_cost",
    "kmeans_pp_init",
    "kpm_standard",
    "kpm_standard_pas",
    "kpm_modified",
]


@dataclass(frozen=True)
class WeightedPoint:
    """A multipath parameter point: direction in degrees plus linear power."""

    az: float
    el: float
    power: float

    def __post_init__(self):
        if not (math.isfinite(self.power) and self.power >= 0):
            raise ValueError("point power must be finite and non-negative")


@dataclass(frozen=True)
class KpmConfig:
    """Iteration and seeding controls for the baselines.

    ``k`` may stay ``None``; pipeline layers then substitute the number of
    regional maxima of the despeckled map.  ``mu_snr_db``/``sigma_snr_db``
    feed the background threshold of the modified variant; the defaults are
    the spatial SNR statistics observed for the reference noise model.
    """

    k: int | None = None
    max_iters: int = 100
    restarts: int = 10
    seed: int = 0
    mu_snr_db: float = 21.03
    sigma_snr_db: float = 4.0

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1 when fixed")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")


@dataclass(frozen=True)
class KpmResult:
    labels: np.ndarray          # per-point cluster index, 0..k-1
    centroids: np.ndarray       # (k, 2) az/el degrees
    cost: float
    cost_history: tuple[float, ...]


@dataclass(frozen=True)
class ModifiedKpmResult:
    labels: LabelMap
    centroids: np.ndarray


def mcd(a, b) -> float:
    """Multipath component distance: Euclidean in (azimuth, elevation) degrees."""
    aaz, ael = (a.az, a.el) if isinstance(a, WeightedPoint) else (a[0], a[1])
    baz, bel = (b.az, b.el) if isinstance(b, WeightedPoint) else (b[0], b[1])
    return math.hypot(aaz - baz, ael - bel)


def _dists(coords: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - centroids[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def kpm_assign(coords: np.ndarray, powers: np.ndarray,
               centroids: np.ndarray) -> np.ndarray:
    """argmin_k power * MCD per point; ties go to the lowest centroid index."""
    return np.argmin(powers[:, None] * _dists(coords, centroids), axis=1).astype(np.int32)


def kpm_cost(coords: np.ndarray, powers: np.ndarray, centroids: np.ndarray,
             labels: np.ndarray) -> float:
    d = _dists(coords, centroids)
    return float((powers * d[np.arange(len(labels)), labels]).sum())


def kmeans_pp_init(coords: np.ndarray, powers: np.ndarray, k: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Careful seeding: draw each next centroid with probability proportional
    to the point's current cost contribution power * distance-to-nearest."""
    n = len(coords)
    weights = powers.astype(np.float64).copy()
    if weights.sum() <= 0:
        weights = np.ones(n)
    centroids = np.empty((k, 2))
    idx = _weighted_pick(weights, rng)
    centroids[0] = coords[idx]
    if k == 1:
        return centroids
    nearest = powers * np.sqrt(((coords - centroids[0]) ** 2).sum(axis=1))
    for j in range(1, k):
        w = nearest if nearest.sum() > 0 else np.ones(n)
        idx = _weighted_pick(w, rng)
        centroids[j] = coords[idx]
        cand = powers * np.sqrt(((coords - centroids[j]) ** 2).sum(axis=1))
        np.minimum(nearest, cand, out=nearest)
    return centroids


def _weighted_pick(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right").clip(0, len(weights) - 1))


def _update_centroids(coords, powers, labels, k, previous):
    cents = previous.copy()
    for j in range(k):
        sel = labels == j
        w = powers[sel]
        if w.sum() > 0:
            cents[j] = (coords[sel] * w[:, None]).sum(axis=0) / w.sum()
        elif sel.any():
            cents[j] = coords[sel].mean(axis=0)
        # empty cluster keeps its previous centroid
    return cents


def kpm_standard(coords: np.ndarray, powers: np.ndarray,
                 cfg: KpmConfig = KpmConfig(), k: int | None = None) -> KpmResult:
    """Iterative K-Power-Means over weighted points, best of several restarts.

    Each restart runs K-Means++ style seeding then alternates assignment
    and power-weighted centroid means until assignments stop changing.  An
    update that would raise the monitored cost (the power-weighted mean is
    not a strict descent step for the linear-distance cost) is rolled back
    and the restart stops there, so each recorded history is non-increasing.
    Deterministic given the seed; restart streams are spawned from it.
    """
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    powers = np.asarray(powers, dtype=np.float64).ravel()
    if len(coords) == 0:
        raise ValueError("no points to cluster")
    if len(coords) != len(powers):
        raise ValueError("coords and powers length mismatch")
    k = cfg.k if k is None else k
    if k is None:
        raise ValueError("k is required (pass explicitly or set in config)")
    if k > len(coords):
        raise ValueError(f"k={k} exceeds the number of points {len(coords)}")
    best: KpmResult | None = None
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts):
        rng = np.random.default_rng(child)
        cents = kmeans_pp_init(coords, powers, k, rng)
        labels = kpm_assign(coords, powers, cents)
        cost = kpm_cost(coords, powers, cents, labels)
        history = [cost]
        for _ in range(cfg.max_iters):
            new_cents = _update_centroids(coords, powers, labels, k, cents)
            new_labels = kpm_assign(coords, powers, new_cents)
            new_cost = kpm_cost(coords, powers, new_cents, new_labels)
            if new_cost > cost:
                break
            converged = np.array_equal(new_labels, labels)
            labels, cents, cost = new_labels, new_cents, new_cost
            history.append(cost)
            if converged:
                break
        if best is None or cost < best.cost:
            best = KpmResult(labels, cents, cost, tuple(history))
    return best


def _pixel_points(f: PasMap):
    az = f.grid.az_angles()
    el = f.grid.el_angles()
    cc, rr = np.meshgrid(az, el)
    coords = np.stack([cc.ravel(), rr.ravel()], axis=1)
    return coords, f.data.ravel()


def kpm_standard_pas(f: PasMap, cfg: KpmConfig = KpmConfig(),
                     k: int | None = None) -> LabelMap:
    """Standard KPM over every PAS pixel; all pixels get a positive label."""
    coords, powers = _pixel_points(f)
    res = kpm_standard(coords, powers, cfg, k)
    return LabelMap(f.grid, (res.labels + 1).reshape(f.grid.shape))


def kpm_modified(f: PasMap, cfg: KpmConfig = KpmConfig(),
                 wcfg: WatershedConfig | None = None) -> ModifiedKpmResult:
    """Maxima-seeded single-pass variant with background removal.

    Despeckles like the watershed pipeline, pins one centroid on each
    regional-maxima component (power-weighted component center), removes
    pixels below the power threshold, and assigns the rest in one pass.
    No iteration and no random initialization; deterministic throughout.
    """
    if not (f.data > 0).any():
        raise ValueError("cannot cluster an all-zero map")
    wcfg = wcfg or WatershedConfig()
    sm = despeckle_smooth(f, wcfg.morph)
    if not (sm.data > 0).any():
        raise ValueError("map is degenerate after despeckling")
    fg = foreground_markers(sm, wcfg)
    m = fg.n_clusters
    cents = np.empty((m, 2))
    az = f.grid.az_angles()
    el = f.grid.el_angles()
    cc, rr = np.meshgrid(az, el)
    for j in range(1, m + 1):
        sel = fg.labels == j
        w = sm.data[sel]
        if w.sum() <= 0:
            w = np.ones(int(sel.sum()))
        cents[j - 1, 0] = (cc[sel] * w).sum() / w.sum()
        cents[j - 1, 1] = (rr[sel] * w).sum() / w.sum()
    p_thre = power_threshold(otsu_background(sm), cfg.mu_snr_db, cfg.sigma_snr_db)
    keep = sm.data.ravel() >= p_thre
    if not keep.any():
        raise ValueError("every pixel falls below the background threshold")
    coords, powers = _pixel_points(sm)
    labels = np.zeros(len(coords), dtype=np.int32)
    labels[keep] = kpm_assign(coords[keep], powers[keep], cents) + 1
    labels = labels.reshape(f.grid.shape)
    # drop centroids that won no pixel so labels stay contiguous
    present = np.unique(labels[labels > 0])
    if present.size != m:
        remap = np.zeros(m + 1, dtype=np.int32)
        remap[present] = np.arange(1, present.size + 1, dtype=np.int32)
        labels = remap[labels]
        cents = cents[present - 1]
    return ModifiedKpmResult(LabelMap(f.grid, labels), cents)
