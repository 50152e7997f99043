"""Slack of the per-dimension and combining inequalities on random instances.

Prints the worst LHS/RHS ratio seen for each inequality; a value above 1 is
a violation. With ``--voronoi-free`` the reference assignment is perturbed
so points need not belong to their nearest center.
"""
import argparse
import math

import numpy as np

from exclus.core import Clustering, Dataset, evaluate, induce_clustering
from exclus.dp_trees import (
    build_combined,
    coordinate_cost,
    di_upper_bounds,
    gap_bound,
    mistake_penalty,
    search_tree_ratio,
)
from exclus.reference import ReferenceConfig, kmeans_reference, kmedians_reference

ap = argparse.ArgumentParser()
ap.add_argument("--trials", type=int, default=200)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--voronoi-free", action="store_true")
args = ap.parse_args()

rng = np.random.default_rng(args.seed)
worst: dict = {}


def note(key, lhs, rhs):
    r = lhs / rhs if rhs > 0 else (0.0 if lhs <= 0 else math.inf)
    worst[key] = max(worst.get(key, 0.0), r)


for _ in range(args.trials):
    k = int(rng.integers(2, 12))
    n, d = int(rng.integers(3 * k, 120)), int(rng.integers(1, 5))
    ds = Dataset(rng.normal(size=(n, d)) * rng.uniform(0.5, 5, d))
    cfg = ReferenceConfig(k=k, seed=int(rng.integers(1 << 30)), n_init=2)
    for obj, ref in (("kmedians", kmedians_reference(ds, cfg)), ("kmeans", kmeans_reference(ds, cfg))):
        if args.voronoi_free:
            lab = ref.assignment.copy()
            flip = rng.random(n) < 0.1
            lab[flip] = rng.integers(0, k, flip.sum())
            ref = Clustering(lab, ref.representatives)
        comb = build_combined(ds, ref, obj)
        sq = obj == "kmeans"
        for i, di in enumerate(comb.di_trees):
            if di is None:
                continue
            opt_i = coordinate_cost(ds, ref, i, obj)
            note(f"{obj}: gap sum / 2 <= OPT_i", gap_bound(di.stats, obj) / 2, opt_i)
            note(f"{obj}: UB_i <= 2 log2 k {'* k ' if sq else ''}* gap sum", search_tree_ratio(di, obj), 2 * math.log2(k) * (k if sq else 1))
        pen = mistake_penalty(comb, obj)
        cost = evaluate(ds, induce_clustering(comb.tree, ds), obj).value
        note(f"{obj}: cost <= OPT + penalty", cost, evaluate(ds, ref, obj).value + pen)
        note(f"{obj}: penalty <= d * sum UB_i", pen, d * di_upper_bounds(comb, obj).sum())

for key in sorted(worst):
    print(f"{worst[key]:8.4f}  {key}")
