"""Flooding watershed segmentation and the marker-controlled PAS pipeline.

``flood_watershed`` is the general transform: basins grow from regional
minima while sweeping quantized levels bottom-up, and pixels where two
basins meet become watershed lines (label 0).  ``cluster_pas`` chains the
full marker-controlled pipeline: despeckle/smooth, automatic foreground
markers from the regional power maxima, background seeds from the
equidistant curves and the thresholded dark region, then marker flooding
of the inverted dB image.  The number of clusters is discovered from the
data, never supplied.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels
from .grid import (BinaryMask, LabelMap, LevelMap, PasMap, db_image,
                   quantize_uniform)
from .morphology import MorphConfig, despeckle_smooth, regional_maxima
from .threshold import otsu_split_db

__all__ = [
    "WatershedConfig",
    "MarkerSet",
    "flood_watershed",
    "marker_flood_watershed",
    "foreground_markers",
    "background_markers",
    "dark_background_region",
    "cluster_pas",
]

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class WatershedConfig:
    """Quantization depth and morphology knobs for the watershed pipeline.

    ``filter_markers`` drops candidate foreground maxima whose peak falls
    below the Otsu foreground/background split; without it, residual noise
    fluctuation in the dark background spawns spurious markers.
    """

    n_levels: int = 255
    connectivity: int = 8
    morph: MorphConfig = field(default_factory=MorphConfig)
    filter_markers: bool = True

    def __post_init__(self):
        if self.n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        if self.connectivity != 8:
            raise ValueError("only 8-connectivity is supported")


@dataclass(frozen=True)
class MarkerSet:
    """Labeled foreground basins plus the background curves bounding them."""

    foreground: LabelMap
    background: BinaryMask

    def __post_init__(self):
        if self.foreground.n_clusters < 1:
            raise ValueError("marker set needs at least one foreground component")
        if self.foreground.grid.shape != self.background.grid.shape:
            raise ValueError("marker grids differ")
        if np.any((self.foreground.labels > 0) & self.background.bits):
            raise ValueError("foreground and background markers overlap")


def _sweep(levels: LevelMap, seeds: np.ndarray, create_minima: bool):
    nrows, ncols = levels.levels.shape
    lab, ws, n = _kernels.flood_sweep(
        np.ascontiguousarray(levels.levels.ravel()),
        np.ascontiguousarray(seeds.ravel().astype(np.int32)),
        create_minima, nrows, ncols,
    )
    return lab.reshape(nrows, ncols), ws.reshape(nrows, ncols).astype(bool), int(n)


def flood_watershed(f: LevelMap, cfg: WatershedConfig = WatershedConfig()) -> LabelMap:
    """Watershed of a quantized map: one labeled basin per regional minimum.

    Labels are numbered in order of basin discovery (level, then row-major
    position); watershed-line pixels are 0.
    """
    seeds = np.zeros(f.levels.shape, dtype=np.int32)
    lab, _, _ = _sweep(f, seeds, True)
    return LabelMap(f.grid, lab)


def marker_flood_watershed(grad: LevelMap, markers: MarkerSet,
                           cfg: WatershedConfig = WatershedConfig()) -> LabelMap:
    """Flood a gradient landscape with the marker set in control.

    Foreground components flood under their own labels; the background
    curves flood a competing background label; valleys containing no
    marker still flood as anonymous dual regions, so every foreground
    basin stops where it first meets the terrain rising around it.  At the
    end only the foreground labels survive: background, anonymous regions,
    watershed lines and never-reached pixels all map to 0, and the cluster
    count equals the number of foreground components.
    """
    fg = markers.foreground.labels
    m = markers.foreground.n_clusters
    seeds = fg.astype(np.int32).copy()
    seeds[markers.background.bits] = m + 1
    lab, _, _ = _sweep(grad, seeds, True)
    lab[lab > m] = 0
    return LabelMap(grad.grid, lab)


def foreground_markers(f_smoothed: PasMap,
                       cfg: WatershedConfig = WatershedConfig()) -> LabelMap:
    """Regional power maxima of the despeckled PAS, one label per component.

    The tolerance is ``epsilon_levels`` quantization levels of the map's dB
    range.  With ``filter_markers``, components peaking below the Otsu
    split are discarded (background fluctuation); the component holding the
    global maximum always survives.  The component count M is automatic.
    """
    db = db_image(f_smoothed.data)
    rng_db = float(db.max() - db.min())
    if rng_db == 0.0:
        return LabelMap(f_smoothed.grid, np.ones(db.shape, dtype=np.int32))
    delta = cfg.morph.epsilon_levels * rng_db / cfg.morph.n_levels
    rm = regional_maxima(db, delta)
    comp, n = ndimage.label(rm, structure=_EIGHT)
    if n == 0:
        raise ValueError("no regional maxima found")
    if cfg.filter_markers and n > 1:
        peaks = ndimage.maximum(db, labels=comp, index=np.arange(1, n + 1))
        split = otsu_split_db(db)
        keep = peaks >= split
        top = comp[np.unravel_index(np.argmax(db), db.shape)]
        if top > 0:
            keep[top - 1] = True
        remap = np.zeros(n + 1, dtype=np.int32)
        remap[1:][keep] = np.arange(1, int(keep.sum()) + 1, dtype=np.int32)
        comp = remap[comp]
    return LabelMap(f_smoothed.grid, comp.astype(np.int32))


def background_markers(f_smoothed: PasMap, fg: LabelMap,
                       cfg: WatershedConfig = WatershedConfig()) -> BinaryMask:
    """Curves equidistant between the foreground components.

    Watershed lines of the Euclidean distance field of the foreground
    support, quantized to the configured depth.  A single component yields
    an empty mask; the curves never touch the foreground support.
    """
    support = fg.labels > 0
    if not support.any():
        raise ValueError("foreground markers are empty")
    dist = ndimage.distance_transform_edt(~support)
    levels = LevelMap(fg.grid, quantize_uniform(dist, cfg.n_levels), cfg.n_levels)
    seeds = np.zeros(support.shape, dtype=np.int32)
    lab, _, _ = _sweep(levels, seeds, True)
    return BinaryMask(fg.grid, lab == 0)


def dark_background_region(f_smoothed: PasMap, fg: LabelMap,
                           standoff_db: float = 4.0) -> np.ndarray:
    """Pixels safely below the Otsu foreground/background split.

    The mask keeps a ``standoff_db`` guard band under the split, so the
    seeds stand off every blob skirt by a distance that scales with the
    blob's own slope; a one-pixel erosion removes salt and foreground
    components are carved out.  Used as additional background seeding for
    the marker flood.
    """
    db = db_image(f_smoothed.data)
    dark = db < otsu_split_db(db) - standoff_db
    dark = ndimage.binary_erosion(dark, structure=_EIGHT)
    dark[fg.labels > 0] = False
    return dark


def cluster_pas(f: PasMap, cfg: WatershedConfig = WatershedConfig()) -> LabelMap:
    """Marker-controlled watershed clustering of a PAS map, end to end.

    Despeckle and smooth, extract foreground maxima markers, build the
    background seeds (equidistant curves plus the thresholded dark
    region), then flood the inverted dB image from the markers: every blob
    fills from its own peak and seals where it meets the background flood
    climbing out of the noise floor, which pins cluster boundaries to the
    foreground/background split contour.  Positive labels are clusters, 0
    is background/watershed; the cluster count emerges from the marker
    extraction.
    """
    if not (f.data > 0).any():
        raise ValueError("cannot cluster an all-zero map")
    sm = despeckle_smooth(f, cfg.morph)
    if not (sm.data > 0).any():
        raise ValueError("map is degenerate after despeckling")
    fg = foreground_markers(sm, cfg)
    bg = background_markers(sm, fg, cfg)
    bg_bits = bg.bits | dark_background_region(sm, fg)
    grad = -db_image(sm.data)
    glv = LevelMap(f.grid, quantize_uniform(grad, cfg.n_levels), cfg.n_levels)
    markers = MarkerSet(fg, BinaryMask(f.grid, bg_bits))
    return marker_flood_watershed(glv, markers, cfg)
