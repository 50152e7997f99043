"""Spacing on the L-shaped instances: optimum, best tree, and Ex-SingleLink."""
from exclus.core import evaluate
from exclus.instances import gen_spacing_lb
from exclus.maxspacing import fit_ex_single_link, guarantee, single_linkage_spacing
from exclus.oracles import brute_force_tree_opt

print(f"{'k':>3}{'p':>3}{'n':>4}{'opt':>8}{'tree-opt':>10}{'ex':>8}{'opt/(n-k)':>11}")
for k, p in [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 3)]:
    ds, _ = gen_spacing_lb(k, p)
    opt = single_linkage_spacing(ds, k)
    tree_opt = brute_force_tree_opt(ds, k, "spacing")[1] if ds.n <= 12 and k <= 4 else float("nan")
    ex = evaluate(ds, fit_ex_single_link(ds, k)[1], "spacing").value
    print(f"{k:>3}{p:>3}{ds.n:>4}{opt:>8.3f}{tree_opt:>10.3f}{ex:>8.3f}{guarantee(ds, k):>11.3f}")
