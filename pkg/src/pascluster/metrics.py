"""Comparison criteria and the batch benchmark harness.

Four per-run criteria: cluster count ratio against the generated truth,
power concentration of the labeled area, the split-cluster power ratio
(how much ground-truth cluster power stays inside a single estimated
label), and the wall-clock runtime of the clustering call.  The harness
sweeps beamwidths and seeded realizations and emits one row per
(method, beamwidth, realization).
"""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from .channel import (AntennaModel, ChannelParams, ChannelRealization,
                      NoiseSpec, add_noise_speckles, cluster_fields,
                      generate_channel)
from .grid import AngularGrid, LabelMap, PasMap
from .kpm import KpmConfig, kpm_modified, kpm_standard_pas
from .morphology import despeckle_smooth
from .threshold import otsu_background, power_threshold
from .watershed import WatershedConfig, cluster_pas, foreground_markers

__all__ = [
    "ClusterMetrics",
    "BenchRow",
    "BenchReport",
    "DEFAULT_BENCH_GRID",
    "cluster_count_ratio",
    "power_concentration",
    "split_power_ratio",
    "run_benchmark",
]

DEFAULT_BENCH_GRID = AngularGrid(az_start=-90.0, az_step=1.0, n_az=181,
                                 el_start=-45.0, el_step=1.0, n_el=91)

PRESERVED_FRACTION = 0.9


@dataclass(frozen=True)
class ClusterMetrics:
    count_ratio: float
    power_concentration: float
    split_power_ratio: float
    runtime_seconds: float

    def __post_init__(self):
        if self.power_concentration < 0 or self.runtime_seconds < 0:
            raise ValueError("metrics must be non-negative")
        if not (0.0 <= self.split_power_ratio <= 1.0):
            raise ValueError("split power ratio must lie in [0, 1]")


@dataclass(frozen=True)
class BenchRow:
    method: str
    beamwidth_deg: float
    seed: int
    metrics: ClusterMetrics


@dataclass
class BenchReport:
    rows: list[BenchRow]

    def cells(self) -> list[tuple[str, float]]:
        seen = []
        for r in self.rows:
            key = (r.method, r.beamwidth_deg)
            if key not in seen:
                seen.append(key)
        return seen

    def column(self, method: str, beamwidth_deg: float, name: str) -> list[float]:
        return [getattr(r.metrics, name) for r in self.rows
                if r.method == method and r.beamwidth_deg == beamwidth_deg]

    def mean(self, method: str, beamwidth_deg: float, name: str) -> float:
        return statistics.fmean(self.column(method, beamwidth_deg, name))

    def median(self, method: str, beamwidth_deg: float, name: str) -> float:
        return statistics.median(self.column(method, beamwidth_deg, name))

    def aggregates(self) -> dict[tuple[str, float], dict[str, float]]:
        """Per-(method, beamwidth) means of every metric column."""
        names = ("count_ratio", "power_concentration", "split_power_ratio",
                 "runtime_seconds")
        return {key: {n: self.mean(key[0], key[1], n) for n in names}
                for key in self.cells()}


def cluster_count_ratio(est: LabelMap, truth: ChannelRealization | int) -> float:
    """Estimated over generated cluster count."""
    n_true = truth if isinstance(truth, int) else truth.n_clusters
    if n_true < 1:
        raise ValueError("truth must contain at least one cluster")
    return est.n_clusters / n_true


def power_concentration(f: PasMap, est: LabelMap) -> float:
    """Mean power over positively labeled pixels over mean power overall.

    Exactly 1.0 whenever the labels tile the whole grid.  Compute it on the
    despeckled map so speckle pixels do not skew either mean.
    """
    inside = est.labels > 0
    if not inside.any():
        raise ValueError("no positively labeled pixels")
    return float(f.data[inside].mean() / f.data.mean())


def split_power_ratio(truth_fields: list[np.ndarray], est: LabelMap,
                      p_thre: float) -> float:
    """Fraction of ground-truth cluster power kept in unsplit clusters.

    A ground-truth cluster's support is its own noise-free field above the
    background threshold; the cluster counts as preserved when one single
    estimated label holds at least 90% of that support power.  Returns
    preserved power over total support power (1.0 when nothing is
    illuminated).
    """
    if not truth_fields:
        raise ValueError("truth must contain at least one cluster")
    labels = est.labels
    total = 0.0
    preserved = 0.0
    for field in truth_fields:
        support = field >= p_thre
        s_power = float(field[support].sum())
        if s_power <= 0.0:
            continue
        total += s_power
        best = 0.0
        for lab in range(1, est.n_clusters + 1):
            inside = float(field[support & (labels == lab)].sum())
            if inside > best:
                best = inside
        if best >= PRESERVED_FRACTION * s_power:
            preserved += s_power
    if total == 0.0:
        return 1.0
    return preserved / total


def _row_seed(master: int, bw_index: int, realization: int, salt: int) -> int:
    ss = np.random.SeedSequence((master, bw_index, realization, salt))
    return int(ss.generate_state(1)[0])


def run_benchmark(beamwidths=(5.0, 15.0, 25.0), n_realizations: int = 100,
                  methods=("watershed", "kpm", "mkpm"), seed: int = 0,
                  grid: AngularGrid = DEFAULT_BENCH_GRID,
                  channel: ChannelParams | None = None,
                  noise: NoiseSpec = NoiseSpec(),
                  wcfg: WatershedConfig = WatershedConfig(),
                  kcfg: KpmConfig = KpmConfig(),
                  timing_reps: int = 3) -> BenchReport:
    """Sweep (beamwidth, realization, method) and collect all four metrics.

    Per realization: generate a channel, synthesize the clean PAS, add
    noise and speckles, then run every method on the same noisy map.  Each
    clustering call is timed as the median of ``timing_reps`` repetitions
    of the call alone (generation, despeckling for metrics and I/O are
    excluded).  Runtimes aside, the report is deterministic in the seed.
    """
    if n_realizations < 1:
        raise ValueError("need at least one realization")
    channel = channel or ChannelParams(
        az_range=(grid.az_start, grid.az_stop), el_range=(grid.el_start, grid.el_stop))
    rows: list[BenchRow] = []
    for bi, bw in enumerate(beamwidths):
        ant = AntennaModel(beamwidth_deg=bw)
        for i in range(n_realizations):
            ch_seed = _row_seed(seed, bi, i, 0)
            ch = generate_channel(replace(channel, seed=ch_seed))
            fields = cluster_fields(ch, ant, grid)
            clean = PasMap(grid, np.sum(fields, axis=0))
            noisy = add_noise_speckles(clean, noise, _row_seed(seed, bi, i, 1))
            sm = despeckle_smooth(noisy, wcfg.morph)
            p_thre = power_threshold(otsu_background(sm),
                                     kcfg.mu_snr_db, kcfg.sigma_snr_db)
            auto_k = foreground_markers(sm, wcfg).n_clusters
            kpm_seed = _row_seed(seed, bi, i, 2)
            for method in methods:
                call = _method_call(method, noisy, wcfg, kcfg, auto_k, kpm_seed)
                times = []
                for _ in range(timing_reps):
                    t0 = time.perf_counter()
                    est = call()
                    times.append(time.perf_counter() - t0)
                metrics = ClusterMetrics(
                    count_ratio=cluster_count_ratio(est, ch),
                    power_concentration=power_concentration(sm, est),
                    split_power_ratio=split_power_ratio(fields, est, p_thre),
                    runtime_seconds=statistics.median(times),
                )
                rows.append(BenchRow(method, float(bw), ch_seed, metrics))
    return BenchReport(rows)


def _method_call(method: str, noisy: PasMap, wcfg: WatershedConfig,
                 kcfg: KpmConfig, auto_k: int, kpm_seed: int):
    if method == "watershed":
        return lambda: cluster_pas(noisy, wcfg)
    if method == "kpm":
        cfg = replace(kcfg, seed=kpm_seed, k=kcfg.k or auto_k)
        return lambda: kpm_standard_pas(noisy, cfg)
    if method == "mkpm":
        return lambda: kpm_modified(noisy, kcfg, wcfg).labels
    raise ValueError(f"unknown method {method!r}")
