"""File formats: JSON PAS/label/truth documents, the benchmark CSV, and
plain PGM rendering.

All documents are versioned JSON with flat row-major data arrays
(elevation rows outer, azimuth columns inner).  Floats are serialized with
shortest-round-trip decimals, so write-then-read reproduces every value
exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channel import AntennaModel, ChannelCluster, ChannelRealization, NoiseSpec, Ray
from .grid import AngularGrid, LabelMap, PasMap, db_image
from .metrics import BenchReport

__all__ = [
    "PasIoError",
    "read_pas",
    "write_pas",
    "read_labels",
    "write_labels",
    "read_truth",
    "write_truth",
    "write_report_csv",
    "render_pgm",
]

PAS_UNIT = "linear_power"
FORMAT_VERSION = 1
REPORT_HEADER = ("method,beamwidth_deg,seed,count_ratio,power_concentration,"
                 "split_power_ratio,runtime_s")


class PasIoError(ValueError):
    """Malformed document: missing keys, wrong lengths, bad values."""


def _require(doc: dict, key: str, path):
    if key not in doc:
        raise PasIoError(f"{path}: missing key '{key}'")
    return doc[key]


def _load(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise PasIoError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, dict):
        raise PasIoError(f"{path}: top-level value must be an object")
    version = _require(doc, "format_version", path)
    if version != FORMAT_VERSION:
        raise PasIoError(f"{path}: unsupported format_version {version}")
    return doc


def _grid_header(grid: AngularGrid) -> dict:
    return {
        "az_start_deg": grid.az_start, "az_step_deg": grid.az_step, "n_az": grid.n_az,
        "el_start_deg": grid.el_start, "el_step_deg": grid.el_step, "n_el": grid.n_el,
    }


def _read_grid(doc: dict, path) -> AngularGrid:
    try:
        return AngularGrid(
            az_start=float(_require(doc, "az_start_deg", path)),
            az_step=float(_require(doc, "az_step_deg", path)),
            n_az=int(_require(doc, "n_az", path)),
            el_start=float(_require(doc, "el_start_deg", path)),
            el_step=float(_require(doc, "el_step_deg", path)),
            n_el=int(_require(doc, "n_el", path)),
        )
    except ValueError as e:
        raise PasIoError(f"{path}: bad grid header ({e})") from e


def _read_flat(doc: dict, key: str, grid: AngularGrid, path) -> np.ndarray:
    data = _require(doc, key, path)
    expected = grid.n_az * grid.n_el
    if not isinstance(data, list) or len(data) != expected:
        found = len(data) if isinstance(data, list) else type(data).__name__
        raise PasIoError(f"{path}: '{key}' must hold {expected} values, found {found}")
    return np.asarray(data).reshape(grid.n_el, grid.n_az)


def write_pas(f: PasMap, path):
    doc = {"format_version": FORMAT_VERSION, **_grid_header(f.grid),
           "unit": PAS_UNIT, "data": [float(v) for v in f.data.ravel()]}
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def read_pas(path) -> PasMap:
    doc = _load(path)
    unit = _require(doc, "unit", path)
    if unit != PAS_UNIT:
        raise PasIoError(f"{path}: unit must be '{PAS_UNIT}', found '{unit}'")
    grid = _read_grid(doc, path)
    data = _read_flat(doc, "data", grid, path).astype(np.float64)
    try:
        return PasMap(grid, data)
    except ValueError as e:
        raise PasIoError(f"{path}: bad data ({e})") from e


def write_labels(lab: LabelMap, path):
    doc = {"format_version": FORMAT_VERSION, **_grid_header(lab.grid),
           "n_clusters": lab.n_clusters,
           "labels": [int(v) for v in lab.labels.ravel()]}
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def read_labels(path) -> LabelMap:
    doc = _load(path)
    grid = _read_grid(doc, path)
    labels = _read_flat(doc, "labels", grid, path).astype(np.int32)
    try:
        out = LabelMap(grid, labels)
    except ValueError as e:
        raise PasIoError(f"{path}: bad labels ({e})") from e
    declared = _require(doc, "n_clusters", path)
    if declared != out.n_clusters:
        raise PasIoError(f"{path}: n_clusters={declared} but labels hold {out.n_clusters}")
    return out


def write_truth(ch: ChannelRealization, ant: AntennaModel, noise: NoiseSpec, path):
    doc = {
        "format_version": FORMAT_VERSION,
        "antenna": {"beamwidth_deg": ant.beamwidth_deg, "max_gain_db": ant.max_gain_db},
        "noise": {"snr_db": noise.snr_db, "n_speckles": noise.n_speckles},
        "clusters": [
            {"mean_az": c.mean_az, "mean_el": c.mean_el,
             "rays": [{"az": r.az, "el": r.el, "power": r.power} for r in c.rays]}
            for c in ch.clusters
        ],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def read_truth(path) -> tuple[ChannelRealization, AntennaModel, NoiseSpec]:
    doc = _load(path)
    ant_doc = _require(doc, "antenna", path)
    noise_doc = _require(doc, "noise", path)
    clusters = []
    for c in _require(doc, "clusters", path):
        rays = tuple(Ray(float(r["az"]), float(r["el"]), float(r["power"]))
                     for r in _require(c, "rays", path))
        clusters.append(ChannelCluster(float(c["mean_az"]), float(c["mean_el"]), rays))
    try:
        ch = ChannelRealization(tuple(clusters))
        ant = AntennaModel(float(_require(ant_doc, "beamwidth_deg", path)),
                           float(_require(ant_doc, "max_gain_db", path)))
        noise = NoiseSpec(float(_require(noise_doc, "snr_db", path)),
                          int(_require(noise_doc, "n_speckles", path)))
    except ValueError as e:
        raise PasIoError(f"{path}: bad truth document ({e})") from e
    return ch, ant, noise


def write_report_csv(report: BenchReport, path):
    lines = [REPORT_HEADER]
    for r in report.rows:
        m = r.metrics
        lines.append(f"{r.method},{r.beamwidth_deg!r},{r.seed},{m.count_ratio!r},"
                     f"{m.power_concentration!r},{m.split_power_ratio!r},"
                     f"{m.runtime_seconds!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_pgm(obj: PasMap | LabelMap, path):
    """8-bit plain PGM: PAS maps dB-scaled onto 0..255, labels spread over 1..255."""
    if isinstance(obj, PasMap):
        db = db_image(obj.data) if (obj.data > 0).any() else np.zeros(obj.data.shape)
        lo, hi = db.min(), db.max()
        pix = (np.zeros(db.shape) if hi == lo
               else np.round(255.0 * (db - lo) / (hi - lo)))
    elif isinstance(obj, LabelMap):
        m = obj.n_clusters
        pix = np.zeros(obj.labels.shape)
        if m:
            pix[obj.labels > 0] = np.round(obj.labels[obj.labels > 0] * 255.0 / m)
    else:
        raise TypeError("render_pgm takes a PasMap or a LabelMap")
    pix = pix.astype(int)
    rows = "\n".join(" ".join(str(v) for v in row) for row in pix)
    h, w = pix.shape
    Path(path).write_text(f"P2\n{w} {h}\n255\n{rows}\n", encoding="utf-8")
