"""Command-line entry point: generate instances, fit trees, evaluate them, run the benchmark.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .core import (
    AxisCut,
    Clustering,
    ExclusError,
    Leaf,
    Split,
    StructuralError,
    ThresholdTree,
    evaluate,
    induce_clustering,
    price_ratio,
)
from .dp_trees import build_combined_tree
from .ex_greedy import fit_ex_greedy
from .imm import fit_imm
from .instances import (
    BUNDLED,
    KCenterLBParams,
    bundled_path,
    format_number,
    gen_blobs,
    gen_kcenter_lb,
    gen_spacing_lb,
    load_csv,
    write_csv,
)
from .kcenter import fit_ex_kcenter
from .maxspacing import fit_ex_single_link, single_linkage_opt
from .reference import ReferenceConfig, kcenters_reference, kmeans_reference, kmedians_reference

log = logging.getLogger("exclus")

REPORT_HEADER = "dataset,n,d,k,algo,seed,ref_cost,exp_cost,ratio,ms"


# -- tree serialization -------------------------------------------------------


def _num(v: float) -> str:
    return format_number(v)


def _emit(node) -> str:
    if isinstance(node, Leaf):
        rep = ", ".join(_num(v) for v in node.representative)
        return f'{{"cluster": {int(node.cluster)}, "representative": [{rep}]}}'
    return (
        f'{{"dim": {int(node.cut.dim)}, "threshold": {_num(node.cut.threshold)}, '
        f'"left": {_emit(node.left)}, "right": {_emit(node.right)}}}'
    )


def tree_to_json(tree: ThresholdTree) -> str:
    """Compact JSON with floats at 17 significant digits (round-trips exactly)."""
    return _emit(tree.root) + "\n"


def _parse_node(obj):
    if not isinstance(obj, dict):
        raise StructuralError("tree node must be a JSON object")
    if "cluster" in obj:
        return Leaf(int(obj["cluster"]), np.asarray(obj["representative"], dtype=float))
    try:
        cut = AxisCut(int(obj["dim"]), float(obj["threshold"]))
        return Split(cut, _parse_node(obj["left"]), _parse_node(obj["right"]))
    except KeyError as exc:
        raise StructuralError(f"tree node missing field {exc}") from None


def tree_from_json(text: str) -> ThresholdTree:
    tree = ThresholdTree(_parse_node(json.loads(text)))
    tree.validate()
    return tree


def save_tree(tree: ThresholdTree, path) -> None:
    Path(path).write_text(tree_to_json(tree))


def load_tree(path) -> ThresholdTree:
    return tree_from_json(Path(path).read_text())


def clustering_to_dict(clustering: Clustering, objective: str) -> dict:
    return {
        "objective": objective,
        "k": int(clustering.k),
        "assignment": clustering.assignment.tolist(),
        "representatives": clustering.representatives.tolist(),
    }


def _meta_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def _ref_path(path) -> Path:
    return Path(str(path) + ".ref.json")


# -- algorithms ---------------------------------------------------------------


@dataclass(frozen=True)
class AlgoSpec:
    objective: str
    reference: Callable
    fit: Callable  # (dataset, reference, k) -> ThresholdTree


def _fit_single_link(dataset, reference, k):
    return fit_ex_single_link(dataset, k)[0]


def _single_link_reference(dataset, config):
    return single_linkage_opt(dataset, config.k)


ALGOS = {
    "ex-greedy": AlgoSpec("kmeans", kmeans_reference, lambda ds, ref, k: fit_ex_greedy(ds, ref)),
    "imm": AlgoSpec("kmeans", kmeans_reference, lambda ds, ref, k: fit_imm(ds, ref)),
    "kmedians-tree": AlgoSpec(
        "kmedians", kmedians_reference, lambda ds, ref, k: build_combined_tree(ds, ref, "kmedians")
    ),
    "kmeans-tree": AlgoSpec("kmeans", kmeans_reference, lambda ds, ref, k: build_combined_tree(ds, ref, "kmeans")),
    "ex-kcenter": AlgoSpec("kcenters", kcenters_reference, lambda ds, ref, k: fit_ex_kcenter(ds, ref)),
    "ex-singlelink": AlgoSpec("spacing", _single_link_reference, _fit_single_link),
}


def fit_summary(dataset, algo: str, k: int, seed: int):
    """Run one algorithm end to end; returns ``(tree, summary dict)``."""
    spec = ALGOS[algo]
    ref = spec.reference(dataset, ReferenceConfig(k=k, seed=seed))
    ref_cost = evaluate(dataset, ref, spec.objective).value
    t0 = time.perf_counter()
    tree = spec.fit(dataset, ref, k)
    ms = (time.perf_counter() - t0) * 1000.0
    exp_cost = evaluate(dataset, induce_clustering(tree, dataset), spec.objective).value
    summary = {
        "algo": algo,
        "objective": spec.objective,
        "n": dataset.n,
        "d": dataset.d,
        "k": k,
        "seed": seed,
        "leaves": tree.n_leaves,
        "ref_cost": ref_cost,
        "exp_cost": exp_cost,
        "ratio": price_ratio(exp_cost, ref_cost, spec.objective),
        "ms": ms,
    }
    return tree, summary


# -- benchmark ----------------------------------------------------------------


@dataclass
class BenchRow:
    dataset: str
    n: int
    d: int
    k: int
    algo: str
    seed: int
    ref_cost: float
    exp_cost: float
    ratio: float
    ms: float

    def as_csv(self) -> list[str]:
        out = []
        for f, v in zip(fields(self), astuple(self)):
            if f.name == "ms":
                out.append(f"{v:.3f}")
            elif isinstance(v, float):
                out.append(_num(v))
            else:
                out.append(str(v))
        return out


@dataclass(frozen=True)
class BenchConfig:
    datasets: tuple = tuple(BUNDLED)
    seeds: tuple = tuple(range(1, 11))
    algos: tuple = ("imm", "ex-greedy")
    threads: Optional[int] = None


def _resolve(entry: str):
    """``name`` (bundled) or ``path[:k]``; returns ``(label, path, k)``."""
    if entry in BUNDLED:
        return entry, bundled_path(entry), BUNDLED[entry]
    path, _, k = entry.rpartition(":")
    if path and k.isdigit():
        return Path(path).stem, Path(path), int(k)
    return Path(entry).stem, Path(entry), None


def _bench_job(label, dataset, k, seed, algos):
    ref = kmeans_reference(dataset, ReferenceConfig(k=k, seed=seed))
    ref_cost = evaluate(dataset, ref, "kmeans").value
    rows = []
    for algo in algos:
        t0 = time.perf_counter()
        tree = ALGOS[algo].fit(dataset, ref, k)
        ms = (time.perf_counter() - t0) * 1000.0
        exp_cost = evaluate(dataset, induce_clustering(tree, dataset), "kmeans").value
        rows.append(
            BenchRow(label, dataset.n, dataset.d, k, algo, seed, ref_cost, exp_cost, exp_cost / ref_cost, ms)
        )
    return rows


def _thread_count(requested: Optional[int]) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("EXCLUS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer EXCLUS_THREADS=%r", env)
    return os.cpu_count() or 1


def run_bench(config: BenchConfig = BenchConfig()):
    """Returns ``(rows, skipped)``; rows are ordered by dataset, seed, algorithm."""
    skipped = []
    jobs = []
    for entry in config.datasets:
        label, path, k = _resolve(entry)
        if k is None:
            skipped.append((label, "", "", f"no k given for {entry!r}; use PATH:K"))
            continue
        try:
            dataset = load_csv(path)
        except (OSError, ExclusError) as exc:
            skipped.append((label, "", "", f"{type(exc).__name__}: {exc}"))
            continue
        for seed in config.seeds:
            jobs.append((label, dataset, k, seed))
    # independent jobs; results are collected in submission order
    with ThreadPoolExecutor(max_workers=_thread_count(config.threads)) as pool:
        futures = [pool.submit(_bench_job, *job, config.algos) for job in jobs]
        rows = []
        for job, fut in zip(jobs, futures):
            try:
                rows.extend(fut.result())
            except (ExclusError, ValueError) as exc:
                skipped.append((job[0], "", job[3], f"{type(exc).__name__}: {exc}"))
    return rows, skipped


def summarize(rows: list[BenchRow], algos=("imm", "ex-greedy")) -> list[dict]:
    """Mean ratio per dataset and algorithm, one dict per dataset."""
    out: dict = {}
    for r in rows:
        entry = out.setdefault(r.dataset, {"dataset": r.dataset, "n": r.n, "d": r.d, "k": r.k})
        entry.setdefault(r.algo, []).append(r.ratio)
    table = []
    for entry in out.values():
        for a in algos:
            if a in entry:
                entry[a] = float(np.mean(entry[a]))
        table.append(entry)
    return table


def format_summary(table: list[dict], algos=("imm", "ex-greedy")) -> str:
    head = f"{'dataset':<16}{'n':>7}{'d':>5}{'k':>4}" + "".join(f"{a:>12}" for a in algos)
    lines = [head]
    for e in table:
        cells = "".join(f"{e[a]:>12.4f}" if a in e else f"{'-':>12}" for a in algos)
        lines.append(f"{e['dataset']:<16}{e['n']:>7}{e['d']:>5}{e['k']:>4}" + cells)
    return "\n".join(lines)


def write_report(rows: list[BenchRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_HEADER.split(","))
    for r in rows:
        w.writerow(r.as_csv())


# -- commands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.instance == "kcenter-lb":
        _require(args, "b", "p", "d")
        dataset, ref = gen_kcenter_lb(KCenterLBParams(args.b, args.p, args.d, args.extra))
        objective = "kcenters"
    elif args.instance == "spacing-lb":
        _require(args, "k", "p")
        dataset, ref = gen_spacing_lb(args.k, args.p)
        objective = "spacing"
    else:
        _require(args, "n", "k", "d")
        dataset, ref = gen_blobs(args.n, args.k, args.d, args.separation, args.seed, args.scale)
        objective = "kmeans"
    write_csv(args.out, dataset)
    meta = clustering_to_dict(ref, objective)
    meta["instance"] = args.instance
    _ref_path(args.out).write_text(json.dumps(meta) + "\n")
    print(json.dumps({"out": str(args.out), "n": dataset.n, "d": dataset.d, "k": ref.k}))
    return 0


def cmd_fit(args) -> int:
    dataset = load_csv(args.data)
    tree, summary = fit_summary(dataset, args.algo, args.k, args.seed)
    save_tree(tree, args.out)
    meta = {key: summary[key] for key in ("algo", "objective", "k", "seed")}
    _meta_path(args.out).write_text(json.dumps(meta) + "\n")
    summary["ms"] = round(summary["ms"], 3)
    print(json.dumps(summary))
    return 0


def _sidecar_objective(path) -> Optional[str]:
    for side in (_meta_path(path), _ref_path(path)):
        if side.exists():
            try:
                return json.loads(side.read_text()).get("objective")
            except (json.JSONDecodeError, AttributeError):
                log.warning("unreadable sidecar %s", side)
    return None


def cmd_eval(args) -> int:
    dataset = load_csv(args.data)
    tree = load_tree(args.tree)
    # the tree's own metadata wins; the dataset sidecar is a fallback
    for source in (args.tree, args.data):
        declared = _sidecar_objective(source)
        if declared is None:
            continue
        if declared != args.objective:
            print(
                f"warning: {source} was produced for objective {declared!r}, evaluating {args.objective!r}",
                file=sys.stderr,
            )
        break
    report = evaluate(dataset, induce_clustering(tree, dataset), args.objective)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["objective", args.objective])
    w.writerow(["value", _num(report.value)])
    if report.per_dim is not None:
        w.writerow(["dim", "cost"])
        for i, v in enumerate(report.per_dim):
            w.writerow([i, _num(v)])
    return 0


def cmd_bench(args) -> int:
    config = BenchConfig(
        datasets=tuple(args.datasets) if args.datasets else tuple(BUNDLED),
        seeds=tuple(args.seeds),
        threads=args.threads,
    )
    rows, skipped = run_bench(config)
    table = format_summary(summarize(rows))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_report(rows, fh)
        if skipped:
            side = Path(str(args.out) + ".skipped.csv")
            with open(side, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["dataset", "algo", "seed", "reason"])
                w.writerows(skipped)
            print(f"{len(skipped)} skipped row(s) written to {side}", file=sys.stderr)
        print(table)
    else:
        write_report(rows, sys.stdout)
        print(table, file=sys.stderr)
    for s in skipped:
        print(f"skipped {s[0]}: {s[3]}", file=sys.stderr)
    return 0


def _require(args, *names) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        args._parser.error(f"--instance {args.instance} requires {', '.join(missing)}")


def _seed_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exclus", description="Explainable clustering with threshold trees.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated instance as CSV plus a reference sidecar")
    g.add_argument("--instance", required=True, choices=["kcenter-lb", "spacing-lb", "blobs"])
    g.add_argument("--out", required=True)
    for name in ("b", "p", "d", "k", "n"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--extra", type=int, default=0)
    g.add_argument("--separation", type=float, default=10.0)
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen, _parser=g)

    f = sub.add_parser("fit", help="fit a threshold tree and print a cost summary")
    f.add_argument("--algo", required=True, choices=sorted(ALGOS))
    f.add_argument("--k", required=True, type=int)
    f.add_argument("--data", required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="evaluate a stored tree on a dataset")
    e.add_argument("--tree", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--objective", required=True, choices=["kmeans", "kmedians", "kcenters", "spacing"])
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="IMM vs Ex-Greedy ratio benchmark")
    b.add_argument("datasets", nargs="*", help="bundled name or PATH:K (default: all bundled)")
    b.add_argument("--seeds", type=_seed_list, default=list(range(1, 11)), help="e.g. 1-10 or 1,3,5")
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--out", default=None, help="report CSV (default: stdout)")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ExclusError, ValueError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
