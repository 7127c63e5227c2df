"""Command-line front door: generate, cluster, metrics, bench, render.

Exit status: 0 on success, 1 on usage errors, 2 on data errors (malformed
or inconsistent files).
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .channel import (AntennaModel, ChannelParams, NoiseSpec,
                      add_noise_speckles, cluster_fields, generate_channel,
                      synthesize_pas)
from .kpm import KpmConfig, kpm_modified, kpm_standard_pas
from .metrics import (DEFAULT_BENCH_GRID, cluster_count_ratio,
                      power_concentration, run_benchmark, split_power_ratio)
from .morphology import despeckle_smooth
from .threshold import otsu_background, power_threshold
from .watershed import cluster_pas, foreground_markers

USAGE_ERROR = 1
DATA_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract wants 1
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pascluster",
                description="Cluster 2D power angular spectrum maps.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="synthesize a noisy PAS map")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--beamwidth", type=float, default=10.0)
    g.add_argument("--snr", type=float, default=20.0)
    g.add_argument("--speckles", type=int, default=100)
    g.add_argument("--out", required=True)
    g.add_argument("--truth", help="also write the ground-truth document here")
    g.add_argument("--clean", help="also write the noise-free PAS here")

    c = sub.add_parser("cluster", help="cluster a PAS file into a label file")
    c.add_argument("--method", required=True, choices=["watershed", "kpm", "mkpm"])
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--k", type=int)
    c.add_argument("--seed", type=int, default=0)

    m = sub.add_parser("metrics", help="score a label file against ground truth")
    m.add_argument("--pas", required=True)
    m.add_argument("--labels", required=True)
    m.add_argument("--truth", required=True)
    m.add_argument("--out", required=True)

    b = sub.add_parser("bench", help="run the benchmark sweep")
    b.add_argument("--realizations", type=int, default=100)
    b.add_argument("--beamwidths", default="5,15,25",
                   help="comma-separated degrees")
    b.add_argument("--methods", default="watershed,kpm,mkpm")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--report", required=True)

    r = sub.add_parser("render", help="render a PAS or label file to plain PGM")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--out", required=True)
    return p


def _cmd_generate(args) -> int:
    grid = DEFAULT_BENCH_GRID
    params = ChannelParams(seed=args.seed,
                           az_range=(grid.az_start, grid.az_stop),
                           el_range=(grid.el_start, grid.el_stop))
    ant = AntennaModel(beamwidth_deg=args.beamwidth)
    noise = NoiseSpec(snr_db=args.snr, n_speckles=args.speckles)
    ch = generate_channel(params)
    clean = synthesize_pas(ch, ant, grid)
    noisy = add_noise_speckles(clean, noise, args.seed + 1)
    io.write_pas(noisy, args.out)
    if args.clean:
        io.write_pas(clean, args.clean)
    if args.truth:
        io.write_truth(ch, ant, noise, args.truth)
    return 0


def _cmd_cluster(args) -> int:
    f = io.read_pas(args.infile)
    if args.method == "watershed":
        labels = cluster_pas(f)
    elif args.method == "mkpm":
        labels = kpm_modified(f, KpmConfig(seed=args.seed)).labels
    else:
        k = args.k
        if k is None:
            k = foreground_markers(despeckle_smooth(f)).n_clusters
        labels = kpm_standard_pas(f, KpmConfig(k=k, seed=args.seed))
    io.write_labels(labels, args.out)
    return 0


def _cmd_metrics(args) -> int:
    f = io.read_pas(args.pas)
    labels = io.read_labels(args.labels)
    ch, ant, _ = io.read_truth(args.truth)
    if labels.grid.shape != f.grid.shape:
        raise io.PasIoError("label and PAS grids differ")
    kcfg = KpmConfig()
    sm = despeckle_smooth(f)
    p_thre = power_threshold(otsu_background(sm), kcfg.mu_snr_db, kcfg.sigma_snr_db)
    fields = cluster_fields(ch, ant, f.grid)
    lines = [
        "count_ratio,power_concentration,split_power_ratio",
        f"{cluster_count_ratio(labels, ch)!r},"
        f"{power_concentration(sm, labels)!r},"
        f"{split_power_ratio(fields, labels, p_thre)!r}",
    ]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_bench(args) -> int:
    beamwidths = [float(b) for b in args.beamwidths.split(",") if b]
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m not in ("watershed", "kpm", "mkpm"):
            raise _UsageError(f"unknown method {m!r}")
    report = run_benchmark(beamwidths=beamwidths,
                           n_realizations=args.realizations,
                           methods=methods, seed=args.seed)
    io.write_report_csv(report, args.report)
    return 0


def _cmd_render(args) -> int:
    import json
    with open(args.infile, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict) and "labels" in doc:
        io.render_pgm(io.read_labels(args.infile), args.out)
    else:
        io.render_pgm(io.read_pas(args.infile), args.out)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "cluster": _cmd_cluster,
    "metrics": _cmd_metrics,
    "bench": _cmd_bench,
    "render": _cmd_render,
}


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
