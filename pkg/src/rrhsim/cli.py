"""Command-line interface.

Subcommands: grow one realization, tabulate oracle predictions, enumerate
exact small-size distributions, run Monte Carlo ensembles, compare a
report against the predictions, and benchmark the kernel backends.

Every file the CLI writes gets a sibling ``<name>.manifest.json`` with the
full command line, configuration, seed, tool version, and output digests,
sufficient to reproduce the file exactly.  Exit codes: 0 success, 1 a
statistical verdict failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .backend import BACKEND
from .benchmark import format_benchmark, run_benchmark
from .rng import DEFAULT_SEED

EXIT_OK = 0
EXIT_STAT_FAIL = 1
EXIT_USAGE = 2


def _parse_prob(text: str, name: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{name} must be a rational like 1/2 or 0.25")
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{name} must lie in [0, 1]")
    return value


def _fr(x) -> str:
    """Rational as p/q text (CSV cells are locale independent by design)."""
    return str(x) if isinstance(x, Fraction) else repr(x)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(primary: Path, argv: list[str], seed, outputs: list[Path],
                    extra: dict | None = None):
    manifest = {
        "tool": "rrhsim",
        "version": __version__,
        "command": ["rrhsim"] + argv,
        "seed": seed,
        "backend": BACKEND,
        "created_utc": _now(),
        "outputs": [{"path": str(p), "sha256": _sha256(p)} for p in outputs],
    }
    if extra:
        manifest.update(extra)
    path = primary.with_name(primary.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _emit(text: str, out: str | None, argv: list[str], seed) -> list[Path]:
    """Write text to ``out`` (with manifest) or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return []
    path = Path(out)
    path.write_text(text, encoding="utf-8")
    _write_manifest(path, argv, seed, [path])
    return [path]


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows_to_json(meta: dict, header: list[str], rows: list[list]) -> str:
    return json.dumps(
        {**meta, "columns": header, "rows": rows}, indent=2, default=str
    ) + "\n"


def _format_table(args, meta, header, rows) -> str:
    if args.format == "json":
        return _rows_to_json(meta, header, rows)
    return _rows_to_csv(header, rows)


# ---------------------------------------------------------------------------
# grow

def _config_from_args(parser, args):
    from .growth import ModelConfig

    try:
        return ModelConfig(
            model=args.model,
            target_n=args.n,
            seed=args.seed,
            r=getattr(args, "r", None),
            mu=getattr(args, "mu", None),
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_grow(parser, args, argv) -> int:
    from .growth import grow

    config = _config_from_args(parser, args)
    state = grow(config, replica=args.replica)
    doc = {
        "config": config.to_json_dict(),
        "replica": args.replica,
        **state.to_json_dict(expanded=args.expanded),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out, argv, config.seed)
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle tables

def cmd_oracle(parser, args, argv) -> int:
    from . import oracle

    t = args.table
    meta = {"table": t}
    try:
        if t == "p1":
            _need(parser, args, "n")
            dist = oracle.p1_distribution(args.n)
            header = ["n1", "probability", "probability_float"]
            rows = [[x, _fr(p), float(p)] for x, p in dist.items()]
            meta["n"] = args.n
        elif t == "rank2":
            _need(parser, args, "n")
            dist = oracle.rank2_distribution(args.n)
            header = ["r2", "probability", "probability_float"]
            rows = [[x, _fr(p), float(p)] for x, p in dist.items()]
            meta["n"] = args.n
        elif t == "nk-mean":
            _need(parser, args, "n")
            kmax = args.kmax or min(args.n, 20)
            header = ["k", "mean", "mean_float"]
            rows = [[k, _fr(oracle.nk_mean(k, args.n)),
                     float(oracle.nk_mean(k, args.n))]
                    for k in range(1, kmax + 1)]
            meta.update(n=args.n, kmax=kmax)
        elif t == "rank-mean":
            _need(parser, args, "n")
            kmax = args.kmax or min(args.n, 10)
            header = ["k", "mean", "mean_float"]
            rows = []
            exact_ok = args.n <= 500
            for k in range(1, kmax + 1):
                if exact_ok:
                    v = oracle.rank_mean(k, args.n)
                    rows.append([k, _fr(v), float(v)])
                else:
                    v = oracle.rank_mean_float(k, args.n)
                    rows.append([k, repr(v), v])
            meta.update(n=args.n, kmax=kmax, exact=exact_ok)
        elif t == "vertex-degree":
            _need(parser, args, "n", "m")
            dist = oracle.vertex_degree_distribution(args.m, args.n)
            header = ["d", "probability", "probability_float"]
            rows = [[x, _fr(p), float(p)] for x, p in dist.items()]
            meta.update(n=args.n, m=args.m)
        elif t == "leaves":
            _need(parser, args, "n")
            header = ["k", "probability", "probability_float"]
            if args.n <= 600:
                dist = oracle.leaves_distribution(args.n)
                rows = [[x, _fr(p), float(p)] for x, p in dist.items() if p != 0]
            else:
                probs = oracle.leaves_distribution_floats(args.n)
                rows = [[k, repr(float(p)), float(p)]
                        for k, p in enumerate(probs) if p > 1e-15]
            meta["n"] = args.n
        elif t == "redirect-n1":
            _need(parser, args, "n", "r")
            v = oracle.redirect_n1_mean(args.n, args.r)
            header = ["n", "mean_n1", "mean_n1_float"]
            rows = [[args.n, _fr(v), float(v)]]
            meta.update(n=args.n, r=str(args.r))
        elif t == "redirect-nk":
            _need(parser, args, "r")
            kmax = args.kmax or 20
            header = ["k", "fraction", "fraction_float"]
            rows = [[k, _fr(oracle.redirect_nk_fraction(k, args.r)),
                     float(oracle.redirect_nk_fraction(k, args.r))]
                    for k in range(1, kmax + 1)]
            meta.update(r=str(args.r), kmax=kmax)
        elif t == "redirect-rank2":
            _need(parser, args, "n", "r")
            v = oracle.redirect_rank2_mean(args.n, args.r)
            header = ["n", "mean_r2", "mean_r2_float"]
            rows = [[args.n, _fr(v), float(v)]]
            meta.update(n=args.n, r=str(args.r))
        elif t == "redirect-rank-mean":
            _need(parser, args, "n", "r")
            if args.n > 2000:
                parser.error("exact redirect rank means are capped at n=2000")
            kmax = args.kmax or min(args.n, 10)
            header = ["k", "mean", "mean_float"]
            rows = [[k, _fr(oracle.redirect_rank_mean(k, args.n, args.r)),
                     float(oracle.redirect_rank_mean(k, args.n, args.r))]
                    for k in range(1, kmax + 1)]
            meta.update(n=args.n, r=str(args.r), kmax=kmax)
        elif t == "cumulants":
            _need(parser, args, "n")
            pmax = args.kmax or min(args.n - 1, 16)
            header = ["p", "cumulant", "cumulant_float"]
            rows = [[p, _fr(oracle.n1_cumulant(p, args.n)),
                     float(oracle.n1_cumulant(p, args.n))]
                    for p in range(1, pmax + 1)]
            meta.update(n=args.n, pmax=pmax)
        elif t == "constants":
            header = ["name", "value", "value_float", "validity"]
            rows = [[c.name, _fr(c.value), float(c.value), c.validity]
                    for c in oracle.oracle_constants()]
        else:
            parser.error(f"unknown table {t!r}")
    except oracle.OutOfValidityError as exc:
        print(f"error: out of validity range: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(_format_table(args, meta, header, rows), args.out, argv, None)
    return EXIT_OK


def _need(parser, args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            parser.error(f"--{name} is required for this table")


# ---------------------------------------------------------------------------
# enumerate

def cmd_enumerate(parser, args, argv) -> int:
    from .enumeration import exact_statistic_distribution

    stat = args.statistic.replace("-", "_")
    kwargs = {}
    if stat in ("degree_count", "rank_count"):
        _need(parser, args, "k")
        kwargs["k"] = args.k
    if stat == "vertex_degree":
        _need(parser, args, "m")
        kwargs["m"] = args.m
    try:
        dist = exact_statistic_distribution(
            args.model, args.n, stat, r=getattr(args, "r", None),
            mu=getattr(args, "mu", None), **kwargs
        )
    except (ValueError, TypeError) as exc:
        parser.error(str(exc))
    meta = {"model": args.model, "n": args.n, "statistic": args.statistic}
    if getattr(args, "r", None) is not None:
        meta["r"] = str(args.r)
    if getattr(args, "mu", None) is not None:
        meta["mu"] = str(args.mu)
    if stat == "joint_n123":
        header = ["n1", "n2", "n3", "probability", "probability_float"]
        rows = [[*key, _fr(w), float(w)] for key, w in sorted(dist.items())]
    elif stat == "leader":
        header = ["leader", "tie", "probability", "probability_float"]
        rows = [[vid, tie, _fr(w), float(w)] for (vid, tie), w in sorted(dist.items())]
    else:
        header = ["value", "probability", "probability_float"]
        rows = [[x, _fr(p), float(p)] for x, p in dist.items() if p != 0]
    _emit(_format_table(args, meta, header, rows), args.out, argv, None)
    return EXIT_OK


# ---------------------------------------------------------------------------
# ensemble / compare

def cmd_ensemble(parser, args, argv) -> int:
    from .edgetree import Histogram
    from .ensemble import run_ensemble

    config = _config_from_args(parser, args)
    try:
        report = run_ensemble(config, args.replicas, m_track=args.m_track,
                              threads=args.threads, batch_size=args.batch_size)
    except ValueError as exc:
        parser.error(str(exc))
    out = Path(args.out)
    out.write_text(report.canonical_json() + "\n", encoding="utf-8")
    outputs = [out]
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, hist in (("degree", report.deg_hist),
                           ("rank", report.rank_hist),
                           ("leaves", report.leaves_hist),
                           ("vm_degree", report.vm_deg_hist)):
            p = d / f"{name}.csv"
            p.write_text(Histogram(hist).to_csv(), encoding="utf-8")
            outputs.append(p)
    _write_manifest(out, argv, config.seed, outputs, {
        "config": config.to_json_dict(),
        "replicas": args.replicas,
        "wall_time_s": report.wall_time,
    })
    print(f"wrote {out} ({report.replicas} replicas, "
          f"{report.wall_time:.2f}s, backend={report.backend})")
    return EXIT_OK


def cmd_compare(parser, args, argv) -> int:
    from .ensemble import EnsembleReport, TolerancePolicy, compare

    try:
        doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
        report = EnsembleReport.from_json_dict(doc)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    policy = TolerancePolicy(z_max=args.z_max, alpha=args.alpha,
                             min_expected=args.min_expected)
    try:
        result = compare(report, policy)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for line in result.lines():
        print(line)
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(result.to_json_dict(), indent=2) + "\n",
                       encoding="utf-8")
        _write_manifest(out, argv, report.config.seed, [out])
    print(f"overall: {'PASS' if result.passed else 'FAIL'}")
    return EXIT_OK if result.passed else EXIT_STAT_FAIL


def cmd_leaders(parser, args, argv) -> int:
    from .ensemble import leader_persistence
    from .oracle import quickest_leader_prob

    try:
        rep = leader_persistence(args.m, args.n_max, args.trajectories,
                                 seed=args.seed, threads=args.threads)
    except ValueError as exc:
        parser.error(str(exc))
    target = quickest_leader_prob(args.m)
    print(f"quickest-route persistence of vertex {args.m} "
          f"(infinite-horizon value {target} = {float(target):.6g})")
    for c, est in zip(rep.checkpoints, rep.estimates):
        print(f"  held through N={c:>8}: {est:.6f}")
    print(f"estimate at horizon {args.n_max}: {rep.estimate:.6f} "
          f"+- {rep.standard_error:.6f} (finite-horizon, biased high; "
          f"monotone across checkpoints: {rep.monotone})")
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(rep.to_json_dict(), indent=2) + "\n",
                       encoding="utf-8")
        _write_manifest(out, argv, args.seed, [out])
    return EXIT_OK


def cmd_bench(parser, args, argv) -> int:
    bench = run_benchmark(n=args.n, replicas=args.replicas, seed=args.seed)
    print(format_benchmark(bench))
    if bench["identical"] is False:
        print("error: backends disagree", file=sys.stderr)
        return EXIT_STAT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rrhsim",
        description="Random recursive hypergraphs: growth simulation, exact "
                    "predictions, enumeration, and Monte Carlo validation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"rrhsim {__version__} (backend: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p, with_seed=True):
        p.add_argument("--model", required=True,
                       choices=["rrh", "redirect", "duplicate", "choice-smaller"])
        p.add_argument("--n", type=int, required=True,
                       help="target size (vertices; edges for duplicate)")
        p.add_argument("--r", type=lambda s: _parse_prob(s, "r"),
                       help="redirection probability (model=redirect only)")
        p.add_argument("--mu", type=lambda s: _parse_prob(s, "mu"),
                       help="duplication probability (model=duplicate only)")
        if with_seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                           help=f"64-bit seed (default {DEFAULT_SEED})")

    p = sub.add_parser("grow", help="grow one realization and write it as JSON")
    add_model_flags(p)
    p.add_argument("--replica", type=int, default=0, help="stream index")
    p.add_argument("--expanded", action="store_true",
                   help="also list every edge's member vertices")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_grow)

    p = sub.add_parser("oracle", help="tabulate closed-form predictions")
    p.add_argument("--table", required=True,
                   choices=["p1", "rank2", "nk-mean", "rank-mean",
                            "vertex-degree", "leaves", "redirect-n1",
                            "redirect-nk", "redirect-rank2",
                            "redirect-rank-mean", "cumulants", "constants"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=lambda s: _parse_prob(s, "r"))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("enumerate",
                       help="exact distribution of a statistic at small n")
    add_model_flags(p, with_seed=False)
    p.add_argument("--statistic", required=True,
                   choices=["degree-count", "rank-count", "joint-n123",
                            "leaves", "vertex-degree", "leader", "n-vertices"])
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("ensemble", help="run a Monte Carlo ensemble")
    add_model_flags(p)
    p.add_argument("--replicas", type=int, required=True)
    p.add_argument("--m-track", type=int, default=2,
                   help="vertex whose degree is tracked (default 2)")
    p.add_argument("--threads", type=int,
                   help="worker threads (default: RRHSIM_THREADS or all cores)")
    p.add_argument("--batch-size", type=int, default=8192)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--csv-dir", help="also write histogram CSVs here")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("compare",
                       help="verdicts of a report against the predictions")
    p.add_argument("--report", required=True, help="ensemble report JSON")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--z-max", type=float, default=4.0)
    p.add_argument("--min-expected", type=float, default=5.0)
    p.add_argument("--out", help="write the comparison JSON here")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("leaders",
                       help="finite-horizon leader-persistence estimates")
    p.add_argument("--m", type=int, default=2, help="tracked vertex (>= 2)")
    p.add_argument("--n-max", type=int, required=True, help="horizon size")
    p.add_argument("--trajectories", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="write the estimates JSON here")
    p.set_defaults(func=cmd_leaders)

    p = sub.add_parser("bench", help="benchmark compiled vs fallback kernels")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--replicas", type=int, default=2000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(parser, args, argv)


if __name__ == "__main__":
    sys.exit(main())
