"""Command-line entry point wiring the modules into reproducible batch runs.

Every subcommand writes its outputs plus a ``run_manifest.json`` capturing
the effective configuration, so any run can be reproduced exactly from its
manifest.  Failures exit nonzero with a machine-readable JSON error on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import date
from pathlib import Path

from . import evaluate, infer, netstats, networks, synth, ties
from .journeys import Thresholds, discover_cojourneys, write_events_jsonl
from .records import parse_sfpg_file, profile_dataset, write_sfpg_file


def _parse_interval_table(text: str) -> dict[int, int]:
    table = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        size, _, days = part.partition("=")
        try:
            table[int(size)] = int(days)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bad interval entry {part!r}; expected SIZE=DAYS"
            ) from None
    if not table:
        raise argparse.ArgumentTypeError("empty interval table")
    return table


def _parse_tau_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        if sep:
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(lo)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tau range {text!r}; expected A..B or N") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty tau range {text!r}")
    return values


def _add_threshold_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-size", type=int, default=10, help="large-group size cutoff")
    p.add_argument("--t-overlap", type=float, default=0.7, help="group-overlap cutoff")
    p.add_argument("--t-interval-lpg", type=int, default=15, help="large-group staleness days")
    p.add_argument(
        "--t-interval-spg",
        type=_parse_interval_table,
        default=None,
        metavar="2=22,3=21,...",
        help="small-group staleness days by size",
    )


def _thresholds(args) -> Thresholds:
    kwargs = dict(
        t_size=args.t_size,
        t_overlap=args.t_overlap,
        t_interval_lpg=args.t_interval_lpg,
    )
    if args.t_interval_spg is not None:
        kwargs["t_interval_spg"] = args.t_interval_spg
    return Thresholds(**kwargs)


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, config: dict) -> None:
    manifest = {
        "command": command,
        "config": config,
        "package": "cotravel",
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(out / "run_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True, default=str)


def _config_dict(args, keys) -> dict:
    config = {}
    for key in keys:
        value = getattr(args, key)
        if isinstance(value, dict):
            value = {str(k): v for k, v in value.items()}
        config[key] = value
    return config


def cmd_synth(args) -> int:
    out = _out_dir(args)
    cfg = synth.GenConfig(seed=args.seed)
    for name in ("population", "n_cliques", "n_tour_groups", "window_days", "noise_rate"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    dataset, truth = synth.generate(cfg)
    dataset, truth = synth.inject_noise(dataset, truth, cfg)
    data_path = out / f"dataset.{args.format}"
    write_sfpg_file(dataset, data_path, format=args.format)
    synth.write_truth_labels(truth, out / "truth_labels.csv")
    synth.write_truth_manifest(truth, out / "truth_manifest.json")
    cfg_dict = {
        k: (v.isoformat() if isinstance(v, date) else v) for k, v in vars(cfg).items()
    }
    _write_manifest(out, "synth", {"format": args.format, "gen": cfg_dict})
    print(f"wrote {len(dataset.records)} records to {data_path}")
    return 0


def cmd_profile(args) -> int:
    out = _out_dir(args)
    dataset = parse_sfpg_file(args.input, format=args.format)
    profile = profile_dataset(dataset, size_split=args.t_size)
    with open(out / "profile.json", "w") as fh:
        json.dump(profile.to_dict(), fh, indent=1, sort_keys=True)
    netstats.write_histogram_csv(profile.pnr_size_hist, out / "pnr_size_hist.csv")
    netstats.write_histogram_csv(profile.sfpg_size_hist, out / "sfpg_size_hist.csv")
    _write_manifest(out, "profile", _config_dict(args, ["input", "format", "t_size"]))
    print(
        f"{profile.n_pnrs} bookings, {profile.n_records} segments, "
        f"single-passenger fraction {profile.single_passenger_fraction:.4f}"
    )
    return 0


def cmd_infer(args) -> int:
    out = _out_dir(args)
    th = _thresholds(args)
    dataset = parse_sfpg_file(args.input, format=args.format)
    u, v, sfpg, pnr, jny = infer.infer_tie_arrays(
        dataset,
        th,
        backend=args.backend,
        max_group_size=args.max_group_size,
        shards=args.shards,
        parallel=args.shards > 1,
    )
    infer.write_tie_arrays(out / "ties.csv", u, v, sfpg, pnr, jny)
    if args.events_out:
        write_events_jsonl(discover_cojourneys(dataset, th, args.max_group_size), args.events_out)
    _write_manifest(
        out,
        "infer",
        _config_dict(
            args,
            [
                "input", "format", "backend", "shards", "max_group_size", "events_out",
                "t_size", "t_overlap", "t_interval_lpg", "t_interval_spg",
            ],
        ),
    )
    print(f"wrote {len(u)} ties to {out / 'ties.csv'}")
    return 0


def cmd_build(args) -> int:
    out = _out_dir(args)
    if args.measure == networks.CO_FLIGHT:
        if not args.input:
            raise ValueError("coflight baseline needs --input (a dataset, not ties)")
        dataset = parse_sfpg_file(args.input, format=args.format)
        net = networks.co_flight_baseline(dataset, args.tau[0], args.max_group_size)
    else:
        if not args.ties:
            raise ValueError("tie measures need --ties")
        records = ties.read_tie_file(args.ties)
        net = networks.build_network(records, args.measure, args.tau[0])
    networks.write_edge_file(net, out / "edges.csv")
    _write_manifest(
        out, "build", _config_dict(args, ["input", "ties", "format", "measure", "tau"])
    )
    print(f"{net.node_count} nodes, {net.edge_count} edges -> {out / 'edges.csv'}")
    return 0


def cmd_stats(args) -> int:
    out = _out_dir(args)
    records = ties.read_tie_file(args.ties)
    net = networks.build_network(records, args.measure, args.tau[0])
    reference = networks.build_network(records, args.measure, networks.min_tau(args.measure))
    summary = netstats.summarize_network(net, (reference.node_count, reference.edge_count))
    report = summary.to_dict()
    if net.node_count:
        report["feature_means"] = netstats.node_feature_means(net)
    with open(out / "stats.json", "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    netstats.write_histogram_csv(summary.degree_histogram, out / "degree_hist.csv")
    netstats.write_histogram_csv(
        summary.component_size_histogram, out / "component_size_hist.csv"
    )
    _write_manifest(out, "stats", _config_dict(args, ["ties", "measure", "tau"]))
    print(f"stats for {args.measure} tau={args.tau[0]} -> {out / 'stats.json'}")
    return 0


def cmd_sweep(args) -> int:
    out = _out_dir(args)
    records = ties.read_tie_file(args.ties)
    summary_fn = None
    if args.full:
        def summary_fn(net):
            entry = netstats.summarize_network(net).to_dict()
            if net.node_count:
                entry["feature_means"] = netstats.node_feature_means(net)
            return entry
    result = networks.sweep(records, args.measure, args.tau, summary_fn)
    for entry in result:
        entry["measure"] = args.measure
    with open(out / "sweep.json", "w") as fh:
        json.dump(result, fh, indent=1, sort_keys=True)
    _write_manifest(out, "sweep", _config_dict(args, ["ties", "measure", "tau", "full"]))
    print(f"{len(result)} thresholds -> {out / 'sweep.json'}")
    return 0


def cmd_calibrate(args) -> int:
    out = _out_dir(args)
    dataset = parse_sfpg_file(args.input, format=args.format)
    overlap = netstats.calibrate_overlap(dataset, t_size=args.t_size)
    duration = netstats.calibrate_duration(dataset, t_size=args.t_size)
    with open(out / "calibration.json", "w") as fh:
        json.dump(
            {"overlap": overlap.to_dict(), "duration": duration.to_dict()},
            fh,
            indent=1,
            sort_keys=True,
        )
    netstats.write_histogram_csv(overlap.histogram, out / "overlap_hist.csv")
    _write_manifest(out, "calibrate", _config_dict(args, ["input", "format", "t_size"]))
    print(
        f"{overlap.n_qualifying_pnrs} qualifying bookings; "
        f"overlap>0.7 fraction {overlap.fraction_above_07:.4f}"
    )
    return 0


def cmd_evaluate(args) -> int:
    out = _out_dir(args)
    th = _thresholds(args)
    dataset = parse_sfpg_file(args.input, format=args.format)
    labels = synth.read_truth_labels(args.truth)
    truth = synth.GroundTruth(
        cliques=[], acquaintance_edges=set(), tour_groups=[], expected_labels=labels
    )
    report = evaluate.compare_measures(dataset, truth, th, max_tau=args.max_tau, backend=args.backend)
    with open(out / "evaluation.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
    evaluate.write_curves_csv(report, out / "curves.csv")
    _write_manifest(
        out,
        "evaluate",
        _config_dict(
            args,
            [
                "input", "truth", "format", "backend", "max_tau",
                "t_size", "t_overlap", "t_interval_lpg", "t_interval_spg",
            ],
        ),
    )
    active = report.per_class["active"]
    print(
        f"active precision {active['precision']:.4f}, recall {active['recall']:.4f} "
        f"over {report.n_pairs} pairs"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotravel",
        description="Infer co-travel networks from flight booking records.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=None)
    p.add_argument("--n-cliques", dest="n_cliques", type=int, default=None)
    p.add_argument("--n-tour-groups", dest="n_tour_groups", type=int, default=None)
    p.add_argument("--window-days", dest="window_days", type=int, default=None)
    p.add_argument("--noise-rate", dest="noise_rate", type=float, default=None)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("profile", help="group-size and itinerary statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--t-size", type=int, default=10)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("infer", help="records in, labeled ties out")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--backend", choices=["auto", "kernel", "python"], default="auto")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--max-group-size", type=int, default=500)
    p.add_argument("--events-out", default=None, help="also dump journey events as JSONL")
    _add_threshold_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("build", help="materialize one threshold network")
    p.add_argument("--ties", default=None)
    p.add_argument("--input", default=None, help="dataset file (coflight baseline only)")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--measure", choices=list(networks.MEASURES), required=True)
    p.add_argument("--tau", type=_parse_tau_range, required=True, help="single threshold")
    p.add_argument("--max-group-size", type=int, default=500)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stats", help="full statistics of one threshold network")
    p.add_argument("--ties", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--measure", choices=list(networks.TIE_MEASURES), required=True)
    p.add_argument("--tau", type=_parse_tau_range, required=True, help="single threshold")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="size summaries over a threshold range")
    p.add_argument("--ties", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--measure", choices=list(networks.TIE_MEASURES), required=True)
    p.add_argument("--tau", type=_parse_tau_range, required=True)
    p.add_argument("--full", action="store_true", help="attach component and degree stats")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", help="overlap and duration analytics")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--t-size", type=int, default=10)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", help="score inference against ground truth")
    p.add_argument("--input", required=True)
    p.add_argument("--truth", required=True, help="truth_labels.csv from synth")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--backend", choices=["auto", "kernel", "python"], default="auto")
    p.add_argument("--max-tau", type=int, default=15)
    _add_threshold_flags(p)
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
