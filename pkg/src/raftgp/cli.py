"""Command-line driver: ``raftgp generate|partition|evaluate|bench``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 internal error.
Wall-clock fields (``*_seconds``) are the only nondeterministic output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .graph import (
    DegenerateInputError,
    GraphFormatError,
    Partition,
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
)
from .metrics import evaluate
from .pipeline import VARIANTS, RunConfig, run
from .sbm_gen import (
    DEFAULT_DEGREE_PROFILE,
    BenchmarkSpec,
    InfeasibleSpecError,
    build_benchmark_params,
    expected_edge_counts,
    sample_sbm,
)

log = logging.getLogger("raftgp")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4
METRIC_KEYS = ("accuracy", "ari", "precision", "recall", "f1", "modularity")
TIMING_KEYS = ("feat_seconds", "emb_seconds", "model_seconds", "total_seconds")


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if len(dims) < 2 or min(dims) < 1:
        raise argparse.ArgumentTypeError("need at least two positive widths, e.g. 256,128,64")
    return dims


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_json(path: Path, obj) -> None:
    path.write_text(_dump(obj), encoding="utf-8")


def _profile(args):
    if args.min_degree is None and args.max_degree is None:
        return None
    lo, hi = DEFAULT_DEGREE_PROFILE
    return (lo if args.min_degree is None else args.min_degree, hi if args.max_degree is None else args.max_degree)


def _spec_from_args(args, seed: int) -> BenchmarkSpec:
    return BenchmarkSpec(
        num_nodes=args.nodes,
        seed=seed,
        within_between_ratio=args.ratio,
        size_heterogeneity=args.heterogeneity,
        target_num_blocks=args.blocks,
        degree_profile=_profile(args),
    )


def _run_config(args, seed: int) -> RunConfig:
    return RunConfig(
        variant=args.variant,
        features=args.features,
        layer_dims=args.layer_dims,
        epsilon=args.epsilon,
        seed=seed,
    )


def generate_dataset(spec: BenchmarkSpec):
    params = build_benchmark_params(spec)
    g = sample_sbm(params, spec.seed)
    return params, g


def cmd_generate(args) -> int:
    spec = _spec_from_args(args, args.seed)
    params, g = generate_dataset(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_edge_list(g, out / "graph.txt")
    save_partition(Partition.from_labels(params.assignment), out / "truth.txt")
    within, between = expected_edge_counts(params)
    _write_json(out / "params.json", {
        "spec": spec.to_dict(),
        "expected_within_edges": within,
        "expected_between_edges": between,
        "num_edges": g.num_edges,
        "params": params.to_dict(),
    })
    log.info("wrote %d nodes, %d edges, %d blocks to %s", g.num_nodes, g.num_edges, params.num_blocks, out)
    return EXIT_OK


def cmd_partition(args) -> int:
    g = load_edge_list(args.graph)
    cfg = _run_config(args, args.seed)
    result = run(g, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_partition(result.partition, out / "partition.txt")
    report = {
        "variant": cfg.variant,
        "features": cfg.features,
        "layer_dims": list(cfg.dims_for(g.num_nodes)),
        "seed": cfg.seed,
        "num_nodes": g.num_nodes,
        "num_edges": g.num_edges,
        "num_blocks_pred": result.partition.num_blocks,
        "timings": result.timings,
    }
    if args.truth:
        truth = load_partition(args.truth)
        report["metrics"] = evaluate(result.partition, truth, g, result.timings["total_seconds"])
    _write_json(out / "report.json", report)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pred = load_partition(args.pred)
    truth = load_partition(args.truth)
    g = load_edge_list(args.graph) if args.graph else None
    if g is not None and g.num_nodes != pred.num_nodes:
        raise ValueError(f"graph has {g.num_nodes} nodes but partition has {pred.num_nodes}")
    sys.stdout.write(_dump(evaluate(pred, truth, g)))
    return EXIT_OK


def _bench_one(spec: BenchmarkSpec, cfg: RunConfig) -> dict:
    row = {"seed": spec.seed}
    try:
        params, g = generate_dataset(spec)
        result = run(g, cfg)
        truth = Partition.from_labels(params.assignment)
        row.update(
            status="ok",
            num_nodes=g.num_nodes,
            num_edges=g.num_edges,
            metrics=evaluate(result.partition, truth, g, result.timings["total_seconds"]),
            timings=result.timings,
        )
    except Exception as exc:  # recorded per seed; the aggregate covers successes
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return row


def _threads() -> int:
    raw = os.environ.get("RAFTGP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def bench(args) -> dict:
    seeds = [args.seed + i for i in range(args.seeds)]
    jobs = [(_spec_from_args(args, s), _run_config(args, s)) for s in seeds]
    workers = min(_threads(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, *zip(*jobs)))
    else:
        rows = [_bench_one(spec, cfg) for spec, cfg in jobs]
    ok = [r for r in rows if r["status"] == "ok"]
    mean = None
    if ok:
        mean = {
            "metrics": {k: float(np.mean([r["metrics"][k] for r in ok])) for k in METRIC_KEYS},
            "num_blocks_pred": float(np.mean([r["metrics"]["num_blocks_pred"] for r in ok])),
            "timings": {k: float(np.mean([r["timings"][k] for r in ok])) for k in TIMING_KEYS},
        }
    first_cfg = jobs[0][1]
    return {
        "variant": first_cfg.variant,
        "features": first_cfg.features,
        "num_nodes": args.nodes,
        "seeds": seeds,
        "runs": rows,
        "num_ok": len(ok),
        "num_failed": len(rows) - len(ok),
        "mean": mean,
    }


def format_table(report: dict) -> str:
    head = ("seed", "status", "acc", "ari", "f1", "K", "feat_s", "emb_s", "model_s", "total_s")
    lines = [head]
    for r in report["runs"]:
        if r["status"] != "ok":
            lines.append((str(r["seed"]), "error") + ("-",) * (len(head) - 2))
            continue
        m, t = r["metrics"], r["timings"]
        lines.append((
            str(r["seed"]), "ok", f"{m['accuracy']:.4f}", f"{m['ari']:.4f}", f"{m['f1']:.4f}",
            str(m["num_blocks_pred"]), *(f"{t[k]:.3f}" for k in TIMING_KEYS),
        ))
    if report["mean"]:
        m, t = report["mean"]["metrics"], report["mean"]["timings"]
        lines.append((
            "mean", f"{report['num_ok']}/{len(report['runs'])}", f"{m['accuracy']:.4f}", f"{m['ari']:.4f}",
            f"{m['f1']:.4f}", f"{report['mean']['num_blocks_pred']:.1f}", *(f"{t[k]:.3f}" for k in TIMING_KEYS),
        ))
    widths = [max(len(row[i]) for row in lines) for i in range(len(head))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in lines) + "\n"


def cmd_bench(args) -> int:
    report = bench(args)
    if args.json:
        _write_json(Path(args.json), report)
    sys.stdout.write(format_table(report))
    for r in report["runs"]:
        if r["status"] != "ok":
            log.error("seed %s failed: %s", r["seed"], r["error"])
    return EXIT_OK if report["num_ok"] else EXIT_DATA


def _add_spec_flags(p):
    p.add_argument("--nodes", type=int, required=True, help="number of nodes N")
    p.add_argument("--seed", type=int, default=0, help="global seed (first seed for bench)")
    p.add_argument("--ratio", type=float, default=2.5, help="expected within/between edge ratio")
    p.add_argument("--heterogeneity", type=float, default=3.0, help="max/min block size ratio")
    p.add_argument("--blocks", type=int, default=None, help="block count (default: by N)")
    p.add_argument("--min-degree", type=float, default=None, help="target degree range (default 21..95, shrunk for small N)")
    p.add_argument("--max-degree", type=float, default=None)


def _add_run_flags(p):
    p.add_argument("--variant", choices=VARIANTS, default="raftgp-c")
    p.add_argument("--features", choices=("c", "m"), default=None,
                   help="statistic for ablations: c = normalized adjacency, m = reduced modularity")
    p.add_argument("--layer-dims", type=_dims, default=None, help="e.g. 256,128,64 (default: by N)")
    p.add_argument("--epsilon", type=int, default=5, help="minimum split-side size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="raftgp", description="Random fast graph partitioning.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a benchmark SBM graph")
    _add_spec_flags(p)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("partition", help="partition a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--truth", default=None, help="optional ground truth to score against")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")
    _add_run_flags(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("evaluate", help="score a partition against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--graph", default=None, help="graph file, for modularity")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="generate and partition several seeds")
    _add_spec_flags(p)
    _add_run_flags(p)
    p.add_argument("--seeds", type=int, default=5, help="number of seeds")
    p.add_argument("--json", default=None, help="write the full report here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seeds", 1) < 1:
        parser.error("--seeds must be >= 1")
    variant, features = getattr(args, "variant", None), getattr(args, "features", None)
    if features and variant in ("raftgp-c", "raftgp-m") and variant[-1] != features:
        parser.error(f"--variant {variant} always uses --features {variant[-1]}")
    try:
        return args.func(args)
    except (OSError, GraphFormatError, DegenerateInputError, InfeasibleSpecError, ValueError) as exc:
        print(f"raftgp: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # invariant violations and bugs
        log.exception("internal error")
        print(f"raftgp: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
