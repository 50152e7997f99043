"""Exhaustive verifiers for desk-scale instances."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    AxisCut,
    BudgetExceededError,
    Clustering,
    Leaf,
    Split,
    ThresholdTree,
    _check_objective,
    as_points,
    lower_median,
    midpoint,
)
from .dp_trees import CutStats, _squared, _weight


@dataclass(frozen=True)
class SearchBudget:
    max_points: int = 12
    max_k: int = 4
    max_depth: int = 8
    max_nodes_expanded: int = 2_000_000

    def __post_init__(self):
        if min(self.max_points, self.max_k, self.max_depth, self.max_nodes_expanded) <= 0:
            raise ValueError("budget caps must be positive")

    def check(self, n: int, k: int) -> None:
        if n > self.max_points:
            raise BudgetExceededError(f"n={n} exceeds max_points={self.max_points}")
        if k > self.max_k:
            raise BudgetExceededError(f"k={k} exceeds max_k={self.max_k}")
        if k - 1 > self.max_depth:
            raise BudgetExceededError(f"k={k} needs depth beyond max_depth={self.max_depth}")


def _circumcenter(P: np.ndarray):
    """Center of the smallest sphere through all rows of ``P`` within their affine hull."""
    if P.shape[0] == 1:
        return P[0].copy()
    A = P[1:] - P[0]
    G = A @ A.T
    rhs = 0.5 * np.sum(A * A, axis=1)
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        return None
    return P[0] + lam @ A


def _ball_through(R: list, pts: list):
    """Smallest ball with every point of ``R`` on its boundary, as ``(center, radius**2)``."""
    if not R:
        return None, -1.0
    p0 = pts[R[0]]
    if len(R) == 1:
        return p0, 0.0
    if len(R) == 2:
        c = tuple((a + b) / 2 for a, b in zip(p0, pts[R[1]]))
        return c, sum((a - b) ** 2 for a, b in zip(p0, c))
    if len(R) == 3:
        u = [a - b for a, b in zip(pts[R[1]], p0)]
        v = [a - b for a, b in zip(pts[R[2]], p0)]
        uu = sum(a * a for a in u)
        vv = sum(a * a for a in v)
        uv = sum(a * b for a, b in zip(u, v))
        det = uu * vv - uv * uv
        if det > 1e-18 * uu * vv:
            s_ = 0.5 * vv * (uu - uv) / det
            t_ = 0.5 * uu * (vv - uv) / det
            c = tuple(p + s_ * a + t_ * b for p, a, b in zip(p0, u, v))
            return c, max(sum((a - b) ** 2 for a, b in zip(pts[r], c)) for r in R)
    P = np.array([pts[r] for r in R])
    A = P[1:] - P[0]
    lam = np.linalg.lstsq(A @ A.T, 0.5 * np.sum(A * A, axis=1), rcond=None)[0]
    c = P[0] + lam @ A
    return tuple(c.tolist()), float(np.max(np.sum((P - c) ** 2, axis=1)))


def _unit_frame(points):
    raw = np.unique(np.asarray(points, dtype=float), axis=0)
    origin = raw[0]
    scale = float(np.max(np.abs(raw - origin))) or 1.0
    return (raw - origin) / scale, origin, scale


def min_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Smallest enclosing ball (Welzl's recursion, fixed point order); returns ``(center, radius)``."""
    X, origin, scale = _unit_frame(points)
    d = X.shape[1]
    if d == 1:
        lo, hi = float(X.min()), float(X.max())
        return origin + scale * np.array([(lo + hi) / 2]), scale * (hi - lo) / 2
    pts = [tuple(row) for row in X.tolist()]
    tol = 1e-12

    def welzl(n: int, R: list):
        if n == 0 or len(R) == d + 1:
            return _ball_through(R, pts)
        c, r2 = welzl(n - 1, R)
        if r2 >= 0:
            gap = math.sqrt(sum((a - b) ** 2 for a, b in zip(pts[n - 1], c))) - math.sqrt(r2)
            if gap <= tol:
                return c, r2
        return welzl(n - 1, R + [n - 1])

    c = np.array(welzl(len(pts), [])[0])
    r = float(np.sqrt(np.max(np.sum((X - c) ** 2, axis=1))))
    return origin + c * scale, r * scale


def min_enclosing_ball_enum(points) -> tuple[np.ndarray, float]:
    """Same ball by trying every support set of size <= d + 1 (slow cross-check)."""
    X, origin, scale = _unit_frame(points)
    n, d = X.shape
    if n == 1:
        return origin.copy(), 0.0
    best_c, best_r = None, math.inf
    for size in range(2, min(n, d + 1) + 1):
        for combo in itertools.combinations(range(n), size):
            c = _circumcenter(X[list(combo)])
            if c is None:
                continue
            r = float(np.sqrt(np.max(np.sum((X[list(combo)] - c) ** 2, axis=1))))
            if r >= best_r:
                continue
            far = float(np.sqrt(np.max(np.sum((X - c) ** 2, axis=1))))
            if far <= r * (1 + 1e-12) + 1e-15:
                best_c, best_r = c, far
    return origin + best_c * scale, best_r * scale


def _group_cost(X: np.ndarray, objective: str) -> tuple[float, np.ndarray]:
    """Optimal single-group cost and representative."""
    if objective == "kmeans":
        c = X.mean(axis=0)
        return float(np.sum((X - c) ** 2)), c
    if objective == "kmedians":
        c = lower_median(X)
        return float(np.sum(np.abs(X - c))), c
    if objective == "kcenters":
        c, r = min_enclosing_ball(X)
        return r, c
    return 0.0, X.mean(axis=0)


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def brute_force_tree_opt(dataset, k: int, objective: str, budget: SearchBudget = SearchBudget()):
    """Best k-leaf threshold tree with every leaf non-empty.

    Thresholds range over midpoints between consecutive distinct coordinates
    of the points reaching each node. Returns ``(tree, cost)``; for spacing the
    cost is the (maximized) spacing.
    """
    _check_objective(objective)
    X = as_points(dataset)
    n, d = X.shape
    budget.check(n, k)
    if k > n:
        raise ValueError("k exceeds the number of points")
    maximize = objective == "spacing"
    D = np.sqrt(np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=2))
    expanded = [0]

    def combine(a, b):
        if objective in ("kmeans", "kmedians"):
            return a + b
        if objective == "kcenters":
            return max(a, b)
        return min(a, b)

    @lru_cache(maxsize=None)
    def leaf(mask: int):
        return _group_cost(X[_bits(mask)], objective)

    @lru_cache(maxsize=None)
    def cuts(mask: int):
        idx = _bits(mask)
        out = []
        for i in range(d):
            vals = np.unique(X[idx, i])
            for a, b in zip(vals[:-1], vals[1:]):
                t = midpoint(a, b)
                lm = sum(1 << p for p in idx if X[p, i] <= t)
                out.append((AxisCut(i, float(t)), lm, mask & ~lm))
        return out

    @lru_cache(maxsize=None)
    def solve(mask: int, m: int):
        """(value, plan) for splitting ``mask`` into ``m`` non-empty leaves."""
        expanded[0] += 1
        if expanded[0] > budget.max_nodes_expanded:
            raise BudgetExceededError("node expansion budget exhausted")
        if m == 1:
            return (leaf(mask)[0] if not maximize else math.inf), None
        best_val, best_plan = (-math.inf if maximize else math.inf), None
        size = bin(mask).count("1")
        if size < m:
            return best_val, None
        for cut, lm, rm in cuts(mask):
            nl, nr = bin(lm).count("1"), bin(rm).count("1")
            cross = None
            for ml in range(max(1, m - nr), min(nl, m - 1) + 1):
                lv, lp = solve(lm, ml)
                rv, rp = solve(rm, m - ml)
                if (ml > 1 and lp is None) or (m - ml > 1 and rp is None):
                    continue
                val = combine(lv, rv)
                if maximize:
                    if cross is None:
                        li, ri = _bits(lm), _bits(rm)
                        cross = float(D[np.ix_(li, ri)].min())
                    val = min(val, cross)
                    better = val > best_val
                else:
                    better = val < best_val
                if better:
                    best_val, best_plan = val, (cut, lm, ml, rm, m - ml)
        return best_val, best_plan

    value, plan = solve((1 << n) - 1, k)
    if k > 1 and plan is None:
        raise ValueError("no threshold tree realizes k non-empty leaves")
    next_id = [0]

    def build(mask, m):
        if m == 1:
            rep = leaf(mask)[1]
            node = Leaf(next_id[0], np.asarray(rep, dtype=float))
            next_id[0] += 1
            return node
        cut, lm, ml, rm, mr = solve(mask, m)[1]
        return Split(cut, build(lm, ml), build(rm, mr))

    tree = ThresholdTree(build((1 << n) - 1, k))
    if maximize and k == 1:
        value = math.inf
    return tree, float(value)


@lru_cache(maxsize=32)
def set_partitions(n: int, k: int) -> np.ndarray:
    """All partitions of ``range(n)`` into exactly ``k`` non-empty blocks (restricted growth strings)."""
    rows = []
    a = [0] * n

    def rec(i, used):
        if n - i < k - used:
            return
        if i == n:
            if used == k:
                rows.append(list(a))
            return
        for g in range(min(used + 1, k)):
            a[i] = g
            rec(i + 1, max(used, g + 1))

    rec(0, 0)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def brute_force_unrestricted_opt(dataset, k: int, objective: str, budget: SearchBudget = SearchBudget()):
    """Best partition into exactly ``k`` non-empty groups; returns ``(clustering, cost)``."""
    _check_objective(objective)
    X = as_points(dataset)
    n = X.shape[0]
    budget.check(n, k)
    if k > n:
        raise ValueError("k exceeds the number of points")
    parts = set_partitions(n, k)
    if parts.shape[0] > budget.max_nodes_expanded:
        raise BudgetExceededError("too many partitions")
    if objective == "spacing":
        if k == 1:
            return Clustering(np.zeros(n, dtype=np.int64), X.mean(axis=0, keepdims=True)), math.inf
        iu, ju = np.triu_indices(n, 1)
        D = np.sqrt(np.sum((X[iu] - X[ju]) ** 2, axis=1))
        differ = parts[:, iu] != parts[:, ju]
        vals = np.where(differ, D[None, :], np.inf).min(axis=1)
        best = int(np.argmax(vals))
    else:
        weights = 1 << np.arange(n, dtype=np.int64)
        table = {}
        vals = np.zeros(parts.shape[0])
        for g in range(k):
            masks = ((parts == g) * weights).sum(axis=1)
            uniq, inv = np.unique(masks, return_inverse=True)
            cost = np.empty(uniq.shape[0])
            for r, mk in enumerate(uniq):
                mk = int(mk)
                if mk not in table:
                    table[mk] = _group_cost(X[_bits(mk)], objective)
                cost[r] = table[mk][0]
            cost = cost[inv]
            vals = vals + cost if objective != "kcenters" else np.maximum(vals, cost)
        best = int(np.argmin(vals))
    labels = parts[best]
    reps = np.array([_group_cost(X[labels == g], objective)[1] for g in range(k)])
    return Clustering(labels, reps), float(vals[best])


def enumerate_gap_trees(a: int, b: int):
    """Every search tree over gaps ``a .. b-1`` as nested ``(j, left, right)`` tuples."""
    if a == b:
        yield None
        return
    for j in range(a, b):
        for left in enumerate_gap_trees(a, j):
            for right in enumerate_gap_trees(j + 1, b):
                yield (j, left, right)


def enumerate_di_opt(stats: CutStats, objective: str, budget: SearchBudget = SearchBudget(max_k=9)) -> float:
    """Minimum gap-tree cost over all search-tree shapes (Catalan enumeration)."""
    squared = _squared(objective)
    m = stats.m
    if m > 8 or m + 1 > budget.max_k:
        raise BudgetExceededError(f"{m} gaps exceed the enumeration budget")
    v = stats.values
    T = stats.T

    def value(node, a, b):
        if node is None:
            return 0.0
        j, left, right = node
        return T[j] * _weight(v[b] - v[a], squared) + value(left, a, j) + value(right, j + 1, b)

    return float(min(value(t, 0, m) for t in enumerate_gap_trees(0, m)))
