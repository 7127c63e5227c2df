"""Angular grid, map containers and value scaling shared by every stage.

A PAS map is a dense image over a rectangular (azimuth, elevation) grid:
rows are elevation, columns are azimuth, values are linear received power.
All containers are frozen dataclasses holding read-only numpy arrays, so
they can be shared freely between threads; every operation in the package
returns new arrays instead of mutating.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AngularGrid",
    "PasMap",
    "BinaryMask",
    "LabelMap",
    "LevelMap",
    "StructuringElement",
    "to_db",
    "from_db",
    "db_image",
    "quantize_uniform",
    "quantize",
    "pad_replicate",
    "grid_for_shape",
]

_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AngularGrid:
    """Uniform scan grid: azimuth within [-180, 180], elevation within [-90, 90]."""

    az_start: float
    az_step: float
    n_az: int
    el_start: float
    el_step: float
    n_el: int

    def __post_init__(self):
        if self.n_az < 1 or self.n_el < 1:
            raise ValueError("grid needs at least one sample per axis")
        if self.az_step <= 0 or self.el_step <= 0:
            raise ValueError("angular steps must be positive")
        az_end = self.az_start + (self.n_az - 1) * self.az_step
        el_end = self.el_start + (self.n_el - 1) * self.el_step
        if self.az_start < -180.0 - _TOL or az_end > 180.0 + _TOL:
            raise ValueError(f"azimuth range [{self.az_start}, {az_end}] exceeds [-180, 180]")
        if self.el_start < -90.0 - _TOL or el_end > 90.0 + _TOL:
            raise ValueError(f"elevation range [{self.el_start}, {el_end}] exceeds [-90, 90]")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_el, self.n_az)

    @property
    def az_stop(self) -> float:
        return self.az_start + (self.n_az - 1) * self.az_step

    @property
    def el_stop(self) -> float:
        return self.el_start + (self.n_el - 1) * self.el_step

    def az_angles(self) -> np.ndarray:
        return self.az_start + np.arange(self.n_az) * self.az_step

    def el_angles(self) -> np.ndarray:
        return self.el_start + np.arange(self.n_el) * self.el_step


def grid_for_shape(shape: tuple[int, int]) -> AngularGrid:
    """Convenience 1-degree grid for bare arrays (tests, ad-hoc maps)."""
    n_el, n_az = shape
    if n_az > 361 or n_el > 181:
        raise ValueError("shape too large for a 1-degree grid")
    return AngularGrid(
        az_start=-((n_az - 1) / 2.0), az_step=1.0, n_az=n_az,
        el_start=-((n_el - 1) / 2.0), el_step=1.0, n_el=n_el,
    )


def _check_shape(grid: AngularGrid, arr: np.ndarray, what: str):
    if arr.ndim != 2 or arr.shape != grid.shape:
        raise ValueError(f"{what} shape {arr.shape} does not match grid {grid.shape}")


@dataclass(frozen=True)
class PasMap:
    """Linear received power sampled over an :class:`AngularGrid`.

    ``data[i, j]`` is the power seen at elevation row ``i``, azimuth column
    ``j``.  Values must be finite and non-negative.
    """

    grid: AngularGrid
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        _check_shape(self.grid, data, "PAS data")
        if not np.all(np.isfinite(data)):
            raise ValueError("PAS data contains non-finite values")
        if np.any(data < 0):
            raise ValueError("PAS data contains negative power")
        object.__setattr__(self, "data", _readonly(data))

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape


@dataclass(frozen=True)
class BinaryMask:
    grid: AngularGrid
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        _check_shape(self.grid, bits, "mask bits")
        object.__setattr__(self, "bits", _readonly(bits))


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel cluster assignment; 0 marks background or watershed lines.

    Positive labels must be the contiguous range ``1..n_clusters``.
    """

    grid: AngularGrid
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValueError("labels must be integers")
        _check_shape(self.grid, labels, "labels")
        if labels.min(initial=0) < 0:
            raise ValueError("labels must be non-negative")
        present = np.unique(labels[labels > 0])
        if present.size and not np.array_equal(present, np.arange(1, present.size + 1)):
            raise ValueError("positive labels must be contiguous 1..n_clusters")
        labels = labels.astype(np.int32, copy=False)
        object.__setattr__(self, "labels", _readonly(labels))

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max(initial=0))


@dataclass(frozen=True)
class LevelMap:
    """Integer quantization of a map; values lie in ``[0, n_levels]``."""

    grid: AngularGrid
    levels: np.ndarray
    n_levels: int

    def __post_init__(self):
        if self.n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        levels = np.asarray(self.levels)
        if not np.issubdtype(levels.dtype, np.integer):
            raise ValueError("levels must be integers")
        _check_shape(self.grid, levels, "levels")
        if levels.min(initial=0) < 0 or levels.max(initial=0) > self.n_levels:
            raise ValueError(f"levels must lie in [0, {self.n_levels}]")
        object.__setattr__(self, "levels", _readonly(levels.astype(np.int32, copy=False)))


@dataclass(frozen=True)
class StructuringElement:
    """Small neighborhood mask slid over the image by morphological operators.

    ``mask`` has odd side lengths and its center cell (the origin) must be
    set.  ``values`` optionally carries per-cell heights for non-flat
    operators; ``None`` means flat (all heights zero).
    """

    mask: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] % 2 == 0 or mask.shape[1] % 2 == 0:
            raise ValueError("structuring element must be 2D with odd side lengths")
        if not mask.any():
            raise ValueError("structuring element must have at least one cell set")
        cy, cx = mask.shape[0] // 2, mask.shape[1] // 2
        if not mask[cy, cx]:
            raise ValueError("structuring element origin (center cell) must be set")
        object.__setattr__(self, "mask", _readonly(mask))
        if self.values is not None:
            values = np.asarray(self.values, dtype=np.float64)
            if values.shape != mask.shape:
                raise ValueError("values shape must match mask shape")
            object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def square(cls, n: int = 3) -> "StructuringElement":
        return cls(np.ones((n, n), dtype=bool))

    @property
    def center(self) -> tuple[int, int]:
        return (self.mask.shape[0] // 2, self.mask.shape[1] // 2)

    def reflect(self) -> "StructuringElement":
        """Point reflection through the origin (180-degree rotation)."""
        vals = None if self.values is None else self.values[::-1, ::-1]
        return StructuringElement(self.mask[::-1, ::-1], vals)

    def offsets(self) -> list[tuple[int, int, float]]:
        """Set cells as (dy, dx, height) relative to the origin."""
        cy, cx = self.center
        out = []
        for y, x in np.argwhere(self.mask):
            h = 0.0 if self.values is None else float(self.values[y, x])
            out.append((int(y) - cy, int(x) - cx, h))
        return out


SQUARE3 = StructuringElement.square(3)


def to_db(p):
    """Linear power to decibels; rejects non-positive input."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr <= 0):
        raise ValueError("power must be strictly positive for dB conversion")
    out = 10.0 * np.log10(arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def from_db(db):
    arr = np.asarray(db, dtype=np.float64)
    out = np.power(10.0, arr / 10.0)
    return float(out) if np.isscalar(db) or arr.ndim == 0 else out


def db_image(data: np.ndarray) -> np.ndarray:
    """dB view of a power map with exact zeros floored to the minimum positive value.

    Raises when no positive pixel exists (the dB scale would be undefined).
    """
    data = np.asarray(data, dtype=np.float64)
    pos = data[data > 0]
    if pos.size == 0:
        raise ValueError("map has no positive pixel, dB image undefined")
    floor = pos.min()
    return 10.0 * np.log10(np.maximum(data, floor))


def quantize_uniform(values: np.ndarray, n_levels: int) -> np.ndarray:
    """Uniformly quantize values to integer levels in ``[0, n_levels]``.

    ``floor(n_levels * (v - min) / (max - min))`` clamped to the range; a
    constant input maps to all zeros.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    values = np.asarray(values, dtype=np.float64)
    lo = values.min()
    hi = values.max()
    # a span within float dust of the magnitude is a constant map, not signal
    if hi - lo <= max(abs(lo), abs(hi)) * 1e-12:
        return np.zeros(values.shape, dtype=np.int32)
    lv = np.floor(n_levels * (values - lo) / (hi - lo))
    return np.clip(lv, 0, n_levels).astype(np.int32)


def quantize(f: PasMap, n_levels: int) -> LevelMap:
    """Quantize a PAS to levels, uniform in dB (maps are processed in dB)."""
    return LevelMap(f.grid, quantize_uniform(db_image(f.data), n_levels), n_levels)


def pad_replicate(arr: np.ndarray, ry: int, rx: int) -> np.ndarray:
    """Replicate-edge padding used as the border policy for all neighborhood ops."""
    if ry == 0 and rx == 0:
        return np.asarray(arr)
    return np.pad(arr, ((ry, ry), (rx, rx)), mode="edge")
