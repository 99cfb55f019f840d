"""Command-line front end: ``gstsparse {expect,sparsify,eval,compare,oracle,timing}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import statistics
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, metrics, oracle, solver
from .expectations import compute_all, default_threads
from .graph import GraphFormatError, format_edgelist, from_edges, load_graph

log = logging.getLogger("gstsparse")

METHODS = ("gst", "ld", "ljs", "re")


class CliError(Exception):
    pass


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _threads(args) -> int:
    return args.threads if getattr(args, "threads", None) else default_threads()


def _config_from_args(args) -> solver.GstConfig:
    return solver.GstConfig(S=args.s, T=args.t, properties=args.props, normalized=not args.unnormalized,
                            seed=args.seed, max_rounds=args.max_rounds, edge_order=args.order)


def _config_dict(cfg: solver.GstConfig) -> dict:
    return {"S": cfg.S, "T": cfg.T, "properties": sorted(cfg.properties), "normalized": cfg.normalized,
            "seed": cfg.seed, "max_rounds": cfg.max_rounds, "edge_order": cfg.edge_order}


# ---------------------------------------------------------------- expect

def cmd_expect(args) -> int:
    g = load_graph(args.graph)
    ex = compute_all(g, args.s, threads=_threads(args))
    text = _csv_text(["node", "exp_deg", "exp_tri", "exp_wedge", "cap_deg", "cap_tri", "cap_wedge"],
                     ([u, repr(a), repr(b), repr(c), d, e, f] for u, a, b, c, d, e, f in ex.rows()))
    if args.output:
        _atomic_write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- sparsify

def _keep_count(g, args) -> int:
    if args.match:
        return load_graph(args.match).edge_count
    if args.ratio is not None:
        return baselines.keep_count_from_ratio(g, args.ratio)
    raise CliError("baselines need --ratio or --match")


def cmd_sparsify(args) -> int:
    g = load_graph(args.graph)
    out = Path(args.out_dir)
    prefix = args.prefix or args.method
    report = {"method": args.method, "input": str(args.graph), "edges_in": g.edge_count,
              "nodes": g.node_count}
    if args.method == "gst":
        cfg = _config_from_args(args)
        res = solver.run(g, cfg, threads=_threads(args))
        mask = res.included
        report.update(config=_config_dict(cfg), label=cfg.label, status=res.status, rounds=res.rounds,
                      flips=res.flips, final_distance=res.final_distance,
                      initial_distance=res.trace.total_distance[0],
                      stage1_seconds=res.stage1_seconds, stage2_seconds=res.stage2_seconds)
        _atomic_write(out / f"{prefix}.trace.csv",
                      _csv_text(["round", "total_distance", "flips", "cumulative_seconds"],
                                ([r, repr(d), f, repr(s)] for r, d, f, s in res.trace.rows())))
        if res.status == "max_rounds":
            log.warning("stopped at the round cap (%d) before convergence", cfg.max_rounds)
    else:
        k = _keep_count(g, args)
        t0 = time.perf_counter()
        mask = baselines.sample(args.method, g, k, seed=args.seed)
        report.update(keep_count=k, seed=args.seed, seconds=time.perf_counter() - t0)
    report["edges_out"] = int(mask.sum())
    report["edge_ratio"] = float(mask.sum()) / g.edge_count if g.edge_count else 0.0
    _atomic_write(out / f"{prefix}.edges", format_edgelist(g, mask))
    _atomic_write(out / f"{prefix}.report.json", _json_text(report))
    log.info("%s: kept %d of %d edges", args.method, report["edges_out"], g.edge_count)
    return 0


# ---------------------------------------------------------------- eval

def _pair(a, b, n, cast):
    if a and b:
        return metrics.read_node_values(a, n, cast), metrics.read_node_values(b, n, cast)
    if a or b:
        raise CliError("both original and sparse files are needed for a mesoscopic query")
    return None


def _evaluate_files(args):
    g = load_graph(args.original)
    h = load_graph(args.sparse)
    if h.node_count > g.node_count:
        raise CliError("sparse graph has more nodes than the original")
    if h.node_count < g.node_count:
        h = from_edges(h.edges, h.p, node_count=g.node_count)
    parts = _pair(args.partition_original, args.partition_sparse, g.node_count, int)
    scores = _pair(args.scores_original, args.scores_sparse, g.node_count, float)
    if parts is None:
        log.warning("no partition files: community-ari skipped")
    if scores is None:
        log.warning("no score files: betweenness-spearman skipped")
    return metrics.evaluate(g, h, args.method, args.s, partitions=parts, scores=scores)


def cmd_eval(args) -> int:
    text = _evaluate_files(args).to_json() + "\n"
    if args.output:
        _atomic_write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- compare

def _load_reports(paths) -> list:
    reports = []
    for p in paths:
        text = Path(p).read_text()
        if p.endswith(".jsonl"):
            reports.extend(metrics.QueryReport.from_json(line) for line in text.splitlines() if line.strip())
        else:
            data = json.loads(text)
            items = data if isinstance(data, list) else [data]
            reports.extend(metrics.QueryReport.from_json(json.dumps(d)) for d in items)
    return reports


def _write_rankings(out: Path, reports: list) -> dict:
    table = metrics.average_reports(reports)
    ranks = metrics.rankings(table, metrics.QUERIES)
    _atomic_write(out / "rankings.csv", _csv_text(["method", "S", "query", "rank"],
                                                  ([m, S, q, r] for m, S, q, r in ranks.rows())))
    _atomic_write(out / "mean_ranking.csv",
                  _csv_text(["method", "mean_rank", "cells"],
                            ([m, ranks.mean[m], len(ranks.distribution[m])] for m in ranks.mean)))
    summary = {
        "mean_ranking": ranks.mean,
        "ranking_distribution": ranks.distribution,
        "cells": [[S, q] for S, q in ranks.cells],
        "similarity": {m: {f"{S}|{q}": v for (S, q), v in sorted(cells.items())}
                       for m, cells in table.items()},
    }
    _atomic_write(out / "summary.json", _json_text(summary))
    return summary


def _one_repetition(g, S, rep, args, cfg_base, out: Path):
    seed = args.seed + rep
    cfg = solver.GstConfig(S=S, T=cfg_base.T, properties=cfg_base.properties,
                           normalized=cfg_base.normalized, seed=seed,
                           max_rounds=cfg_base.max_rounds, edge_order=cfg_base.edge_order)
    res = solver.run(g, cfg, threads=1)
    k = int(res.included.sum())
    masks = {"gst": res.included}
    for m in args.methods:
        if m != "gst":
            masks[m] = baselines.sample(m, g, k, seed=seed)
    reports = []
    for m, mask in masks.items():
        if m not in args.methods:
            continue
        rep_ = metrics.evaluate(g, g.subgraph(mask), m, S, queries=args.queries)
        rep_.extra["rep"] = rep
        reports.append(rep_)
        if args.save_graphs:
            _atomic_write(out / "graphs" / f"{m}_S{S}_rep{rep}.edges", format_edgelist(g, mask))
    return reports


def cmd_compare(args) -> int:
    out = Path(args.out_dir)
    if args.reports:
        reports = _load_reports(args.reports)
        if not reports:
            raise CliError("no reports found")
        summary = _write_rankings(out, reports)
        log.info("mean ranking: %s", summary["mean_ranking"])
        return 0

    if not args.graph:
        raise CliError("compare needs --graph or --reports")
    if args.reps < 1:
        raise CliError("--reps must be at least 1")
    for m in args.methods:
        if m not in METHODS:
            raise CliError(f"unknown method {m!r}")
    if "gst" not in args.methods:
        raise CliError("compare matches baseline edge counts to GST; include gst in --methods")
    queries = args.queries or [q for q in metrics.QUERIES if q not in metrics.MESOSCOPIC]
    skipped = [q for q in queries if q in metrics.MESOSCOPIC]
    if skipped:
        log.warning("mesoscopic queries %s need external partition/score files; skipped", skipped)
        queries = [q for q in queries if q not in metrics.MESOSCOPIC]
    args.queries = queries

    g = load_graph(args.graph)
    cfg_base = _config_from_args(argparse.Namespace(**{**vars(args), "s": args.s_grid[0]}))
    jobs = [(S, rep) for S in args.s_grid for rep in range(args.reps)]
    threads = _threads(args)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            batches = list(pool.map(lambda j: _one_repetition(g, j[0], j[1], args, cfg_base, out), jobs))
    else:
        batches = [_one_repetition(g, S, rep, args, cfg_base, out) for S, rep in jobs]
    reports = [r for batch in batches for r in batch]

    _atomic_write(out / "reports.jsonl", "".join(json.dumps(
        {"method": r.method, "S": r.S, "similarity": r.similarity, "edge_ratio": r.edge_ratio,
         "extra": r.extra}, sort_keys=True) + "\n" for r in reports))
    _write_rankings(out, reports)
    manifest = {"input": str(args.graph), "methods": list(args.methods), "s_grid": list(args.s_grid),
                "reps": args.reps, "seeds": [args.seed + i for i in range(args.reps)],
                "config": _config_dict(cfg_base) | {"S": None}, "queries": queries,
                "artifacts": ["reports.jsonl", "rankings.csv", "mean_ranking.csv", "summary.json"]}
    _atomic_write(out / "manifest.json", _json_text(manifest))
    return 0


# ---------------------------------------------------------------- oracle

def cmd_oracle(args) -> int:
    g = load_graph(args.graph)
    cfg = _config_from_args(argparse.Namespace(**{**vars(args), "t": 0.0}))
    ex = compute_all(g, cfg.S)
    worst, checked, skipped = 0.0, 0, 0
    fast = {"degree": ex.exp_deg, "triangle": ex.exp_tri, "wedge": ex.exp_wedge}
    for u in range(g.node_count):
        for name, arr in fast.items():
            try:
                ref = oracle.enumerate_worlds_expectation(g, ex.ps, u, name)
            except oracle.BudgetExceeded:
                skipped += 1
                continue
            worst = max(worst, abs(ref - arr[u]))
            checked += 1
    res = solver.run(g, cfg, expectations=ex)
    result = {"expectations": {"checked": checked, "skipped": skipped, "max_abs_error": worst},
              "gst": {"final_distance": res.final_distance, "rounds": res.rounds,
                      "edges_out": int(res.included.sum()),
                      "nash": oracle.nash_check(g, res.included, cfg, ex)}}
    try:
        opt, mask = oracle.exhaustive_optimum(g, cfg, ex)
        result["optimum"] = {"distance": opt, "edges": np.flatnonzero(mask).tolist(),
                             "gst_attains": bool(res.final_distance <= opt + oracle.TIE_TOL)}
    except oracle.BudgetExceeded as exc:
        result["optimum"] = {"skipped": str(exc)}
    sys.stdout.write(_json_text(result))
    ok = worst <= 1e-9 and result["gst"]["nash"]
    return 0 if ok else 1


# ---------------------------------------------------------------- timing

def _mean_std(xs):
    return {"mean": statistics.fmean(xs), "std": statistics.stdev(xs) if len(xs) > 1 else 0.0}


def cmd_timing(args) -> int:
    g = load_graph(args.graph)
    if args.reps < 1:
        raise CliError("--reps must be at least 1")
    cfg = _config_from_args(args)
    threads = _threads(args)
    s1, s2, ratios = [], [], []
    for rep in range(args.reps):
        res = solver.run(g, solver.GstConfig(**{**_config_dict(cfg), "seed": args.seed + rep}),
                         threads=threads)
        s1.append(res.stage1_seconds)
        s2.append(res.stage2_seconds)
        ratios.append(res.edge_ratio)
    result = {"label": cfg.label, "reps": args.reps, "threads": threads,
              "stage1_seconds": _mean_std(s1), "stage2_seconds": _mean_std(s2),
              "edge_ratio": _mean_std(ratios)}
    if args.baselines:
        k = baselines.keep_count_from_ratio(g, statistics.fmean(ratios))
        for m in ("ld", "ljs", "re"):
            ts = []
            for rep in range(args.reps):
                t0 = time.perf_counter()
                baselines.sample(m, g, k, seed=args.seed + rep)
                ts.append(time.perf_counter() - t0)
            result[f"{m}_seconds"] = _mean_std(ts)
    sys.stdout.write(_json_text(result))
    return 0


# ---------------------------------------------------------------- parser

def _floats(text: str) -> list:
    return [float(x) for x in text.split(",") if x]


def _gst_flags(p, s_required=True):
    if s_required:
        p.add_argument("--s", type=float, required=True, help="scaling factor in [0, 1]")
    p.add_argument("--t", type=float, default=0.01, help="tolerance (default 0.01)")
    p.add_argument("--props", choices=sorted(solver.PROPERTY_SETS), default="23w")
    p.add_argument("--unnormalized", action="store_true", help="drop the 1/cap normalization")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=1000)
    p.add_argument("--order", choices=("by-id", "shuffle"), default="by-id")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gstsparse", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default $GSTSPARSE_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expect", help="per-node scaled expectations as CSV")
    p.add_argument("graph")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("sparsify", help="sample a sparse subgraph")
    p.add_argument("graph")
    p.add_argument("--method", choices=METHODS, default="gst")
    p.add_argument("--s", type=float, default=0.5)
    _gst_flags(p, s_required=False)
    p.add_argument("--ratio", type=float, help="kept-edge ratio for baselines")
    p.add_argument("--match", help="edge list whose edge count baselines should match")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--prefix")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("eval", help="compare a sparse graph with the original")
    p.add_argument("--original", required=True)
    p.add_argument("--sparse", required=True)
    p.add_argument("--method", default="unknown")
    p.add_argument("--s", type=float, default=float("nan"))
    p.add_argument("--partition-original")
    p.add_argument("--partition-sparse")
    p.add_argument("--scores-original")
    p.add_argument("--scores-sparse")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="repeated-run comparison and rank aggregation")
    p.add_argument("--graph")
    p.add_argument("--reports", nargs="+", help="aggregate existing QueryReport JSON/JSONL files")
    p.add_argument("--s-grid", type=_floats, default=[0.2, 0.5, 0.9])
    p.add_argument("--methods", type=lambda s: s.split(","), default=list(METHODS))
    p.add_argument("--queries", type=lambda s: s.split(","), default=None)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--save-graphs", action="store_true")
    _gst_flags(p, s_required=False)
    p.add_argument("--out-dir", default="compare-out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="brute-force validation on a tiny graph")
    p.add_argument("graph")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--props", choices=sorted(solver.PROPERTY_SETS), default="23w")
    p.add_argument("--unnormalized", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=1000)
    p.add_argument("--order", choices=("by-id", "shuffle"), default="by-id")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("timing", help="stage-wise running times over repeated runs")
    p.add_argument("graph")
    _gst_flags(p)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--baselines", action="store_true", help="also time LD, LJS and RE")
    p.set_defaults(func=cmd_timing)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, GraphFormatError, ValueError, OSError) as exc:
        print(f"gstsparse: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
