"""Background power estimation and thresholding for cluster/background splits.

The millimeter-wave PAS is sparse: most pixels belong to the dark
background, so its dB histogram is dominated by the noise-floor mode.
Otsu's criterion locates the foreground/background split; the background
power is the modal bin of the sub-split population.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PasMap, db_image, from_db

__all__ = [
    "ThresholdParams",
    "otsu_split_db",
    "otsu_background",
    "power_threshold",
]

N_BINS = 256


@dataclass(frozen=True)
class ThresholdParams:
    """Inputs and result of the background-removal threshold rule."""

    p_back: float
    mu_snr_db: float
    sigma_snr_db: float
    p_thre: float

    def __post_init__(self):
        if self.p_back <= 0 or self.p_thre <= 0:
            raise ValueError("background and threshold powers must be positive")


def otsu_split_db(db_values: np.ndarray, n_bins: int = N_BINS) -> float:
    """Between-class-variance-maximizing split of a dB histogram.

    Returns the dB value of the split boundary: values strictly below it
    form the background class.  A constant input returns that constant.
    """
    vals = np.asarray(db_values, dtype=np.float64).ravel()
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        return lo
    hist, edges = np.histogram(vals, bins=n_bins, range=(lo, hi))
    hist = hist.astype(np.float64)
    total = hist.sum()
    centers = 0.5 * (edges[:-1] + edges[1:])
    w0 = np.cumsum(hist)
    mu0_sum = np.cumsum(hist * centers)
    mu_total = mu0_sum[-1]
    # candidate split after bin t: background = bins [0..t], foreground = rest
    w0c = w0[:-1]
    w1c = total - w0c
    valid = (w0c > 0) & (w1c > 0)
    bcv = np.zeros(n_bins - 1)
    mu0 = np.where(w0c > 0, mu0_sum[:-1] / np.where(w0c > 0, w0c, 1.0), 0.0)
    mu1 = np.where(w1c > 0, (mu_total - mu0_sum[:-1]) / np.where(w1c > 0, w1c, 1.0), 0.0)
    bcv[valid] = w0c[valid] * w1c[valid] * (mu0[valid] - mu1[valid]) ** 2
    t = int(np.argmax(bcv))
    return float(edges[t + 1])


def otsu_background(f: PasMap) -> float:
    """Background power: modal dB bin of the sub-Otsu-split population, in linear units."""
    db = db_image(f.data).ravel()
    lo, hi = float(db.min()), float(db.max())
    if hi == lo:
        return float(from_db(lo))
    split = otsu_split_db(db)
    hist, edges = np.histogram(db, bins=N_BINS, range=(lo, hi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    below = centers < split
    if not below.any():
        below[0] = True
    sub = np.where(below, hist, -1)
    mode_bin = int(np.argmax(sub))
    return float(from_db(centers[mode_bin]))


def power_threshold(p_back: float, mu_snr_db: float, sigma_snr_db: float) -> float:
    """Background-removal threshold from the spatial SNR statistics.

    With A = 10^(mu/10) and B = 10^((mu - 3*sigma)/10):
    threshold = A(B+1) / (B(A+1)) * p_back.
    """
    if p_back <= 0:
        raise ValueError("background power must be positive")
    a = 10.0 ** (mu_snr_db / 10.0)
    b = 10.0 ** ((mu_snr_db - 3.0 * sigma_snr_db) / 10.0)
    return float(a * (b + 1.0) / (b * (a + 1.0)) * p_back)
