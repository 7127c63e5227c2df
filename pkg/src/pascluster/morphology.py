"""Grayscale morphology kernel: dilation/erosion algebra, reconstruction,
regional maxima, the morphological Laplacian, and the two composite
smoothing stages used ahead of clustering.

All primitives take and return plain 2D float arrays; the border policy is
replicate-edge everywhere.  Since every operator here is built from max
and min only (plus the value offsets of non-flat elements), they commute
with monotone value transforms: running them on linear power with
multiplicative tolerances is identical to running them in dB with additive
tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels
from .grid import SQUARE3, PasMap, StructuringElement, db_image, pad_replicate

__all__ = [
    "MorphConfig",
    "dilate",
    "erode",
    "opening",
    "closing",
    "average_filter",
    "geodesic_dilate_step",
    "reconstruct",
    "regional_maxima",
    "laplacian",
    "despeckle_smooth",
    "enhance_contrast",
]


@dataclass(frozen=True)
class MorphConfig:
    """Knobs shared by the smoothing and marker-extraction stages.

    ``epsilon_levels`` is the power tolerance expressed in quantization
    levels: one level equals the processed map's value range divided by
    ``n_levels``.
    """

    se: StructuringElement = field(default_factory=lambda: SQUARE3)
    avg_window: int = 3
    epsilon_levels: float = 1.0
    n_levels: int = 255

    def __post_init__(self):
        if self.avg_window < 1 or self.avg_window % 2 == 0:
            raise ValueError("avg_window must be odd and >= 1")
        if self.epsilon_levels < 1:
            raise ValueError("epsilon_levels must be >= 1")
        if self.n_levels < 1:
            raise ValueError("n_levels must be >= 1")


def _as_float(f: np.ndarray) -> np.ndarray:
    arr = np.asarray(f, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2D array")
    return arr


def dilate(f: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """sup over set cells d of f(x - d) + height(d); neighborhood max when flat."""
    f = _as_float(f)
    ry, rx = se.center
    padded = pad_replicate(f, ry, rx)
    h, w = f.shape
    out = np.full_like(f, -np.inf)
    for dy, dx, hv in se.offsets():
        win = padded[ry - dy : ry - dy + h, rx - dx : rx - dx + w]
        np.maximum(out, win + hv if hv != 0.0 else win, out=out)
    return out


def erode(f: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """inf over set cells d of f(x + d) - height(d); neighborhood min when flat."""
    f = _as_float(f)
    ry, rx = se.center
    padded = pad_replicate(f, ry, rx)
    h, w = f.shape
    out = np.full_like(f, np.inf)
    for dy, dx, hv in se.offsets():
        win = padded[ry + dy : ry + dy + h, rx + dx : rx + dx + w]
        np.minimum(out, win - hv if hv != 0.0 else win, out=out)
    return out


def opening(f: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """Erosion then dilation; removes bright structures smaller than the element."""
    return dilate(erode(f, se), se)


def closing(f: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """Dilation then erosion; fills dark gaps smaller than the element."""
    return erode(dilate(f, se), se)


def average_filter(f: np.ndarray, window: int) -> np.ndarray:
    """Arithmetic mean over a window x window neighborhood, replicate borders."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    return ndimage.uniform_filter(_as_float(f), size=window, mode="nearest")


def _check_under(marker: np.ndarray, mask: np.ndarray):
    if marker.shape != mask.shape:
        raise ValueError("marker and mask shapes differ")
    if np.any(marker > mask):
        raise ValueError("marker must lie under the mask pointwise")


def geodesic_dilate_step(marker: np.ndarray, mask: np.ndarray,
                         se: StructuringElement = SQUARE3) -> np.ndarray:
    """One elementary geodesic dilation: min(dilate(marker, se), mask)."""
    marker = _as_float(marker)
    mask = _as_float(mask)
    _check_under(marker, mask)
    return np.minimum(dilate(marker, se), mask)


def reconstruct(marker: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Grayscale reconstruction: fixed point of the 8-connected geodesic dilation.

    Equivalent to iterating :func:`geodesic_dilate_step` with the default
    3x3 element until nothing changes, computed by downhill priority
    propagation instead.
    """
    marker = _as_float(marker)
    mask = _as_float(mask)
    _check_under(marker, mask)
    h, w = mask.shape
    out = _kernels.reconstruct_core(marker.ravel(), mask.ravel(), h, w)
    return out.reshape(h, w)


def regional_maxima(f: np.ndarray, delta: float) -> np.ndarray:
    """Plateaus not dominated by any neighbor reachable within ``delta``.

    Boolean mask of the support of f - reconstruct(f - delta, f).  ``delta``
    is in the value units of ``f`` (the caller converts quantization levels
    to value units).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    f = _as_float(f)
    return (f - reconstruct(f - delta, f)) > 0


def laplacian(f: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """Morphological Laplacian: external minus internal gradient = dilate + erode - 2f."""
    f = _as_float(f)
    return dilate(f, se) + erode(f, se) - 2.0 * f


def _level_delta(values: np.ndarray, cfg: MorphConfig) -> float:
    rng = float(values.max() - values.min())
    return cfg.epsilon_levels * rng / cfg.n_levels


def despeckle_smooth(f: PasMap, cfg: MorphConfig = MorphConfig()) -> PasMap:
    """Speckle removal and noise smoothing applied ahead of clustering.

    open -> close with the configured element (kills isolated single-pixel
    spikes), reconstruction from the map lowered by the epsilon tolerance
    (flattens residual sub-tolerance peaks), then average filtering.  The
    tolerance is one quantization level of the map's dB range, applied
    multiplicatively in the linear domain.
    """
    oc = closing(opening(f.data, cfg.se), cfg.se)
    pos = oc[oc > 0]
    if pos.size and pos.max() > pos.min():
        delta_db = _level_delta(db_image(oc), cfg)
        oc = reconstruct(oc * 10.0 ** (-delta_db / 10.0), oc)
    out = average_filter(oc, cfg.avg_window)
    # mean of non-negative values; clip float dust so PasMap stays valid
    return PasMap(f.grid, np.maximum(out, 0.0))


def enhance_contrast(grad: np.ndarray, cfg: MorphConfig = MorphConfig()) -> np.ndarray:
    """Sharpen valley edges of a signed gradient field before flooding.

    Closing, reconstruction from the field lowered by the epsilon
    tolerance, then average filtering.
    """
    grad = _as_float(grad)
    c = closing(grad, cfg.se)
    delta = _level_delta(c, cfg)
    if delta > 0:
        c = reconstruct(c - delta, c)
    return average_filter(c, cfg.avg_window)
