"""Command-line interface.

Subcommands: ``ingest``, ``fit``, ``rank``, ``score``, ``plot``. Every
command writes exactly one ``manifest.json`` into its output directory and
is fully reproducible: identical inputs and flags give byte-identical
outputs (the manifest's wall-time field aside).

Exit codes: 0 success, 2 input or configuration error, 3 numerical
divergence of a chain.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .data import (
    ColumnSpec,
    EthnicityMapping,
    SchemeKind,
    balance,
    default_mapping,
    filter_force,
    parse_records,
    read_dataset_csv,
    write_dataset_csv,
)
from .errors import DataError, DivergenceError, DomainError, LatentBiasError
from .inference import (
    PosteriorSummary,
    read_trace_csv,
    run_gibbs,
    write_trace_csv,
)
from .likelihood import predictive_score
from .manifest import build_manifest, write_manifest
from .model import ModelConfig, PriorKind, StopRecord
from .plotting import render_trace_svg
from .ranking import matches_from_dataset, trueskill_gibbs, write_ranking_csv
from .seeds import DOMAIN_BALANCE, DOMAIN_FIT, DOMAIN_RANK, derive_rng, seed_sequence

LONDON_MET_FORCE = "Metropolitan Police"
PRESETS = ("national", "augmented", "charges", "london-met")


def _load_mapping(path: str | None) -> EthnicityMapping:
    if path is None:
        return default_mapping()
    return EthnicityMapping.from_json(Path(path).read_text(encoding="utf-8"))


def _chain_seed(root_seed: int, chain: int) -> int:
    return int(seed_sequence(root_seed, DOMAIN_FIT, chain).generate_state(1)[0])


def cmd_ingest(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    mapping = _load_mapping(args.mapping)
    scheme = mapping.scheme(SchemeKind.from_string(args.scheme))
    with open(args.input, newline="", encoding="utf-8") as fh:
        records, report = parse_records(fh, mapping, scheme, ColumnSpec())
    dataset_path = out_dir / "dataset.csv"
    with open(dataset_path, "w", encoding="utf-8") as fh:
        write_dataset_csv(records, mapping.groups(), fh)
    report_path = out_dir / "report.txt"
    report_path.write_text(report.to_text(), encoding="utf-8")
    inputs = {"raw": args.input}
    if args.mapping:
        inputs["mapping"] = args.mapping
    doc = build_manifest(
        command="ingest",
        config={"scheme": args.scheme, "mapping": args.mapping or "default"},
        inputs=inputs,
        outputs={"dataset": dataset_path, "report": report_path},
        wall_time_s=time.perf_counter() - t0,
        extra={"rows_kept": report.rows_kept, "rows_dropped": report.rows_dropped},
    )
    write_manifest(doc, out_dir / "manifest.json")
    sys.stdout.write(report.to_text())
    return 0


def _load_fit_dataset(args):
    """Dataset and groups for ``fit``/``rank``, honouring ``--preset``."""
    if args.preset is None:
        with open(args.input, newline="", encoding="utf-8") as fh:
            records, groups = read_dataset_csv(fh)
        return records, groups
    if args.preset not in PRESETS:
        raise DomainError(f"unknown preset {args.preset!r} (choose from {', '.join(PRESETS)})")
    mapping = _load_mapping(args.mapping)
    scheme_kind = (
        SchemeKind.LENIENT_SEVERE if args.preset == "charges" else SchemeKind.GUILTY_NOT_GUILTY
    )
    with open(args.input, newline="", encoding="utf-8") as fh:
        records, _report = parse_records(fh, mapping, mapping.scheme(scheme_kind), ColumnSpec())
    if args.preset == "augmented":
        records = balance(records, 1000, derive_rng(args.seed, DOMAIN_BALANCE))
    elif args.preset == "london-met":
        records = filter_force(records, LONDON_MET_FORCE)
    return records, mapping.groups()


def cmd_fit(args) -> int:
    if args.chains < 1:
        raise DomainError(f"--chains must be >= 1, got {args.chains}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    records, groups = _load_fit_dataset(args)
    prior = PriorKind.from_string(args.prior)
    anchoring = None if args.anchoring is None else args.anchoring == "on"
    outputs = {}
    summary = None
    divergence = None
    trace_names = []
    for chain in range(args.chains):
        config = ModelConfig(
            seed=_chain_seed(args.seed, chain),
            alpha=args.alpha,
            gamma=args.gamma,
            prior=prior,
            sweeps=args.sweeps,
            burn_in=args.burn_in,
            anchoring=anchoring,
        )
        name = "trace.csv" if args.chains == 1 else f"trace_chain{chain}.csv"
        trace_path = out_dir / name
        trace_names.append(name)
        try:
            chain_summary, trace = run_gibbs(records, config, groups=groups)
        except DivergenceError as exc:
            if exc.trace is not None and exc.trace.sweeps > 0:
                with open(trace_path, "w", encoding="utf-8") as fh:
                    write_trace_csv(exc.trace, fh)
                outputs[f"trace_{chain}"] = trace_path
            divergence = {"chain": chain, "sweep": exc.sweep, "message": str(exc)}
            sys.stderr.write(f"fit: chain {chain} diverged at sweep {exc.sweep}\n")
            break
        with open(trace_path, "w", encoding="utf-8") as fh:
            write_trace_csv(trace, fh)
        outputs[f"trace_{chain}"] = trace_path
        if chain == 0:
            summary = chain_summary
    if summary is not None and divergence is None:
        summary_csv = out_dir / "summary.csv"
        with open(summary_csv, "w", encoding="utf-8") as fh:
            summary.to_csv(fh)
        (out_dir / "summary.json").write_text(summary.to_json() + "\n", encoding="utf-8")
        outputs["summary_csv"] = summary_csv
        outputs["summary_json"] = out_dir / "summary.json"
    config_snapshot = {
        "prior": args.prior,
        "sweeps": args.sweeps,
        "burn_in": args.burn_in,
        "seed": args.seed,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "anchoring": args.anchoring or "default",
        "chains": args.chains,
        "preset": args.preset,
        "traces": trace_names,
    }
    inputs = {"dataset": args.input}
    if args.preset is not None and args.mapping:
        inputs["mapping"] = args.mapping
    doc = build_manifest(
        command="fit",
        config=config_snapshot,
        inputs=inputs,
        outputs=outputs,
        wall_time_s=time.perf_counter() - t0,
        extra={"divergence": divergence} if divergence else None,
    )
    write_manifest(doc, out_dir / "manifest.json")
    if divergence is not None:
        return 3
    for idx in summary.ranked_indices():
        sys.stdout.write(
            f"{int(summary.rank[idx])}  {summary.labels[idx]:<12} "
            f"mean={summary.bias_mean[idx]:+.5f}  var={summary.bias_variance[idx]:.5f}\n"
        )
    return 0


def cmd_rank(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    with open(args.input, newline="", encoding="utf-8") as fh:
        records, groups = read_dataset_csv(fh)
    if not records:
        raise DomainError("dataset is empty")
    players, matches = matches_from_dataset(records, groups)
    skills = trueskill_gibbs(
        matches,
        players,
        iterations=args.iterations,
        seed=int(seed_sequence(args.seed, DOMAIN_RANK, 0).generate_state(1)[0]),
        anchor_common=args.anchor_common,
    )
    ranking_path = out_dir / "ranking.csv"
    with open(ranking_path, "w", encoding="utf-8") as fh:
        write_ranking_csv(skills, fh)
    doc = build_manifest(
        command="rank",
        config={
            "iterations": args.iterations,
            "seed": args.seed,
            "anchor_common": args.anchor_common,
        },
        inputs={"dataset": args.input},
        outputs={"ranking": ranking_path},
        wall_time_s=time.perf_counter() - t0,
    )
    write_manifest(doc, out_dir / "manifest.json")
    sys.stdout.write(ranking_path.read_text(encoding="utf-8"))
    return 0


def cmd_score(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    summary = PosteriorSummary.from_json(Path(args.summary).read_text(encoding="utf-8"))
    with open(args.test, newline="", encoding="utf-8") as fh:
        records, groups = read_dataset_csv(fh)
    # align the test file's group ids with the summary's label order
    remap = {}
    for g in groups:
        if g.label not in summary.labels:
            raise DomainError(
                f"test dataset group {g.label!r} is unknown to the summary "
                f"(labels: {summary.labels})"
            )
        remap[g.id] = summary.labels.index(g.label)
    records = [
        StopRecord(group=remap[rec.group], stopped=rec.stopped,
                   outcome=rec.outcome, force=rec.force)
        for rec in records
    ]
    score = predictive_score(summary, records, args.alpha, args.gamma, method=args.method)
    line = f"{100.0 * score:.1f}\n"
    (out_dir / "score.txt").write_text(line, encoding="utf-8")
    doc = build_manifest(
        command="score",
        config={"alpha": args.alpha, "gamma": args.gamma, "method": args.method},
        inputs={"summary": args.summary, "test": args.test},
        outputs={"score": out_dir / "score.txt"},
        wall_time_s=time.perf_counter() - t0,
        extra={"score_percent": round(100.0 * score, 4)},
    )
    write_manifest(doc, out_dir / "manifest.json")
    sys.stdout.write(line)
    return 0


def cmd_plot(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    with open(args.trace, encoding="utf-8") as fh:
        trace = read_trace_csv(fh)
    svg = render_trace_svg(trace)
    plot_path = out_dir / "plot.svg"
    plot_path.write_text(svg, encoding="utf-8")
    doc = build_manifest(
        command="plot",
        config={},
        inputs={"trace": args.trace},
        outputs={"plot": plot_path},
        wall_time_s=time.perf_counter() - t0,
    )
    write_manifest(doc, out_dir / "manifest.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentbias",
        description="Latent group-bias inference for stop-and-search records.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="raw CSV -> canonical dataset + report")
    p.add_argument("--input", required=True)
    p.add_argument("--mapping", default=None, help="mapping JSON (default: shipped mapping)")
    p.add_argument("--scheme", default="guilty", choices=["guilty", "charges"])
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="run the Gibbs sampler")
    p.add_argument("--input", required=True, help="canonical dataset CSV (raw CSV with --preset)")
    p.add_argument("--mapping", default=None)
    p.add_argument("--preset", default=None, choices=list(PRESETS))
    p.add_argument("--prior", default="dependent", choices=[k.value for k in PriorKind])
    p.add_argument("--sweeps", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--anchoring", default=None, choices=["on", "off"])
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rank", help="skill-ranking baseline")
    p.add_argument("--input", required=True)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--anchor-common", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("score", help="score a fitted summary on held-out records")
    p.add_argument("--summary", required=True, help="summary.json from fit")
    p.add_argument("--test", required=True, help="canonical test dataset CSV")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--method", default="accuracy", choices=["accuracy", "likelihood"])
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("plot", help="render a trace CSV as SVG")
    p.add_argument("--trace", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (DomainError, DataError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except LatentBiasError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
