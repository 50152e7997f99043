"""Per-dimension optimal cut trees by dynamic programming, combined into one k-leaf tree.

For each dimension ``i`` the distinct center coordinates ``v_0 < ... < v_m``
define gap cuts ``theta_j`` between ``v_j`` and ``v_{j+1}``. ``T_j`` counts the
points separated from their reference center by ``(i, theta_j)``. A binary
search tree over the gaps costs

    sum_j  T_j * w(v_{hi(j)} - v_{lo(j)})

where ``[lo(j), hi(j)]`` is the block of center groups reaching node ``j``
and ``w`` is the identity (k-medians) or the square (k-means). The combined
tree splits each node along the dimension where its centers spread most,
borrowing the cut of the least common ancestor of those centers in that
dimension's optimal tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    AxisCut,
    Clustering,
    Leaf,
    NoCutError,
    Split,
    ThresholdTree,
    as_points,
    check_distinct_centers,
    midpoint,
)

_LINEAR = {"kmedians": False, "kmeans": True}


def _squared(objective: str) -> bool:
    try:
        return _LINEAR[objective]
    except KeyError:
        raise ValueError(f"objective must be 'kmedians' or 'kmeans', got {objective!r}") from None


def _weight(span: float, squared: bool) -> float:
    return span * span if squared else span


@dataclass
class CutStats:
    dim: int
    values: np.ndarray  # distinct center coordinates, increasing
    group_of: np.ndarray  # center index -> position in ``values``
    thresholds: np.ndarray
    T: np.ndarray

    @property
    def m(self) -> int:
        return self.thresholds.shape[0]

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.values)


def cut_stats(dataset, reference: Clustering, i: int) -> CutStats:
    X = as_points(dataset)
    C = reference.representatives
    values = np.unique(C[:, i])
    group_of = np.searchsorted(values, C[:, i])
    thresholds = np.array([midpoint(a, b) for a, b in zip(values[:-1], values[1:])])
    x = X[:, i]
    c = C[reference.assignment, i]
    lo = np.sort(np.minimum(x, c))
    hi = np.sort(np.maximum(x, c))
    T = np.searchsorted(lo, thresholds, side="right") - np.searchsorted(hi, thresholds, side="right")
    return CutStats(i, values, group_of, thresholds, T.astype(np.int64))


@dataclass
class DiTree:
    """Binary search tree over the gaps of one dimension.

    Node ``j`` cuts at ``thresholds[j]`` and governs center groups
    ``lo[j] .. hi[j]`` (inclusive); ``-1`` marks a missing child.
    """

    stats: CutStats
    root: int
    left: np.ndarray
    right: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    value: float = math.nan
    table: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.stats.dim

    def cut(self, j: int) -> AxisCut:
        return AxisCut(self.stats.dim, float(self.stats.thresholds[j]))

    def parent_map(self) -> dict:
        par = {self.root: -1}
        for j in range(self.stats.m):
            for ch in (self.left[j], self.right[j]):
                if ch >= 0:
                    par[int(ch)] = j
        return par

    def ancestors(self, j: int) -> list[int]:
        """``j`` and all nodes above it."""
        par = self.parent_map()
        out = []
        while j >= 0:
            out.append(j)
            j = par[j]
        return out


def _tree_from_shape(stats: CutStats, root: int, left, right) -> DiTree:
    m = stats.m
    lo = np.zeros(m, dtype=np.int64)
    hi = np.zeros(m, dtype=np.int64)

    def rec(j, a, b):
        lo[j], hi[j] = a, b
        if left[j] >= 0:
            rec(left[j], a, j)
        if right[j] >= 0:
            rec(right[j], j + 1, b)

    rec(root, 0, m)
    return DiTree(stats, root, np.asarray(left), np.asarray(right), lo, hi)


def build_di(stats: CutStats, objective: str) -> DiTree:
    """Optimal search tree over the gaps by the O(m^3) interval DP."""
    squared = _squared(objective)
    m = stats.m
    if m < 1:
        raise NoCutError(f"all centers share coordinate {stats.dim}")
    v = stats.values
    T = stats.T
    opt = np.zeros((m + 1, m + 1))
    arg = np.full((m + 1, m + 1), -1, dtype=np.int64)
    for length in range(1, m + 1):
        for a in range(0, m + 1 - length):
            b = a + length
            w = _weight(v[b] - v[a], squared)
            best, best_j = math.inf, -1
            for j in range(a, b):
                val = T[j] * w + opt[a, j] + opt[j + 1, b]
                if val < best:
                    best, best_j = val, j
            opt[a, b] = best
            arg[a, b] = best_j
    left = np.full(m, -1, dtype=np.int64)
    right = np.full(m, -1, dtype=np.int64)

    def rec(a, b):
        if a == b:
            return -1
        j = int(arg[a, b])
        left[j] = rec(a, j)
        right[j] = rec(j + 1, b)
        return j

    root = rec(0, m)
    tree = _tree_from_shape(stats, root, left, right)
    tree.value = float(opt[0, m])
    tree.table = opt
    return tree


def ub_value(tree: DiTree, stats: CutStats, objective: str) -> float:
    """Upper-bound cost of a gap tree, summed in the same nesting as the DP."""
    squared = _squared(objective)
    v = stats.values
    T = stats.T

    def rec(j):
        if j < 0:
            return 0.0
        w = _weight(v[tree.hi[j]] - v[tree.lo[j]], squared)
        return T[j] * w + rec(tree.left[j]) + rec(tree.right[j])

    return float(rec(tree.root))


def lca_node(di: DiTree, min_pos: int, max_pos: int) -> int:
    """Deepest node whose group range contains ``[min_pos, max_pos]``."""
    if min_pos >= max_pos:
        raise NoCutError("a single center group has no separating cut")
    j = di.root
    while True:
        if max_pos <= j:
            j = int(di.left[j])
        elif min_pos >= j + 1:
            j = int(di.right[j])
        else:
            return j


def lca_cut(di: DiTree, center_subset_range: tuple[int, int]) -> AxisCut:
    return di.cut(lca_node(di, *center_subset_range))


@dataclass
class CombinedNode:
    """Bookkeeping for one internal node of the combined tree."""

    centers: np.ndarray
    points: np.ndarray
    dim: int
    di_node: int
    cut: AxisCut
    mistakes: int
    diam: np.ndarray


@dataclass
class CombinedTree:
    tree: ThresholdTree
    di_trees: list
    nodes: list


def build_combined(dataset, reference: Clustering, objective: str) -> CombinedTree:
    X = as_points(dataset)
    C = np.asarray(reference.representatives, dtype=float)
    labels = np.asarray(reference.assignment)
    check_distinct_centers(C)
    dis = []
    for i in range(X.shape[1]):
        stats = cut_stats(X, reference, i)
        dis.append(build_di(stats, objective) if stats.m >= 1 else None)
    records: list[CombinedNode] = []

    def build(points, centers):
        if centers.size == 1:
            c = int(centers[0])
            return Leaf(c, C[c].copy())
        diam = C[centers].max(axis=0) - C[centers].min(axis=0)
        i = int(np.argmax(diam))
        di = dis[i]
        pos = di.stats.group_of[centers]
        j = lca_node(di, int(pos.min()), int(pos.max()))
        cut = di.cut(j)
        pl = X[points, i] <= cut.threshold
        cl = C[centers, i] <= cut.threshold
        own = np.isin(labels[points], centers)
        sep = own & (pl != (C[labels[points], i] <= cut.threshold))
        records.append(CombinedNode(centers, points, i, j, cut, int(sep.sum()), diam))
        return Split(cut, build(points[pl], centers[cl]), build(points[~pl], centers[~cl]))

    tree = ThresholdTree(build(np.arange(X.shape[0]), np.arange(C.shape[0])))
    return CombinedTree(tree, dis, records)


def build_combined_tree(dataset, reference: Clustering, objective: str) -> ThresholdTree:
    """k-leaf tree for k-medians (``objective='kmedians'``) or k-means (``'kmeans'``)."""
    return build_combined(dataset, reference, objective).tree


# -- bound audits ----------------------------------------------------------


def mistake_penalty(combined: CombinedTree, objective: str) -> float:
    """Sum over internal nodes of mistakes times the L1 (or squared L2) diameter."""
    squared = _squared(objective)
    total = 0.0
    for node in combined.nodes:
        total += node.mistakes * (float(np.sum(node.diam**2)) if squared else float(np.sum(node.diam)))
    return total


def gap_bound(stats: CutStats, objective: str) -> float:
    """``sum_j w(v_{j+1} - v_j) * T_j``."""
    squared = _squared(objective)
    g = stats.gaps
    return float(np.sum((g * g if squared else g) * stats.T))


def coordinate_cost(dataset, reference: Clustering, i: int, objective: str) -> float:
    """Contribution of coordinate ``i`` to the reference cost."""
    X = as_points(dataset)
    diff = X[:, i] - reference.representatives[reference.assignment, i]
    return float(np.sum(diff * diff) if _squared(objective) else np.sum(np.abs(diff)))


def di_upper_bounds(combined: CombinedTree, objective: str) -> np.ndarray:
    return np.array([0.0 if di is None else ub_value(di, di.stats, objective) for di in combined.di_trees])


def search_tree_ratio(di: DiTree, objective: str) -> float:
    """``UB(D_i) / sum_j w(gap_j) T_j``: monitored against ``2 log2 k`` (times k for k-means)."""
    denom = gap_bound(di.stats, objective)
    val = ub_value(di, di.stats, objective)
    if denom == 0:
        return 0.0 if val == 0 else math.inf
    return val / denom


def jensen_holds(di: DiTree) -> bool:
    """``(v_hi - v_lo)^2 <= k * sum of squared gaps`` inside every node's block."""
    k = di.stats.values.shape[0]
    g2 = di.stats.gaps ** 2
    for j in range(di.stats.m):
        lo, hi = di.lo[j], di.hi[j]
        span = di.stats.values[hi] - di.stats.values[lo]
        if span * span > k * float(np.sum(g2[lo:hi])) * (1 + 1e-12):
            return False
    return True


def borrowed_sets_disjoint(combined: CombinedTree) -> bool:
    """Nodes borrowing the same (dimension, gap-tree node) see disjoint point sets."""
    seen: dict = {}
    for node in combined.nodes:
        key = (node.dim, node.di_node)
        pts = set(node.points.tolist())
        for other in seen.get(key, []):
            if pts & other:
                return False
        seen.setdefault(key, []).append(pts)
    return True
