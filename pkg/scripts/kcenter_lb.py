"""Ex-kCenter on the digit-permutation instances: cost against the lower and upper bounds."""
import math

from exclus.core import evaluate, induce_clustering
from exclus.instances import KCenterLBParams, gen_kcenter_lb, kcenter_lb_lower_bound
from exclus.kcenter import fit_ex_kcenter

CASES = [(3, 1, 2), (5, 1, 4), (10, 2, 2), (4, 2, 4), (3, 3, 9), (6, 2, 8)]

print(f"{'b':>3}{'p':>3}{'d':>3}{'k':>6}{'lower':>10}{'ex-kcenter':>12}{'upper':>10}")
for b, p, d in CASES:
    params = KCenterLBParams(b, p, d)
    ds, ref = gen_kcenter_lb(params)
    cost = evaluate(ds, induce_clustering(fit_ex_kcenter(ds, ref), ds), "kcenters").value
    upper = 2 * math.sqrt(d) * params.k ** (1 - 1 / d) * evaluate(ds, ref, "kcenters").value
    lower = kcenter_lb_lower_bound(params)
    print(f"{b:>3}{p:>3}{d:>3}{params.k:>6}{lower:>10.3f}{cost:>12.3f}{upper:>10.3f}")
