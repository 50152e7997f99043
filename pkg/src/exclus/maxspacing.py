"""Maximum-spacing clustering: exact single linkage and the explainable Ex-SingleLink."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AxisCut,
    Clustering,
    DegenerateInputError,
    Leaf,
    NoCutError,
    Split,
    ThresholdTree,
    as_points,
    midpoint,
    spacing,
)


def pairwise_dists(X: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def labels(self) -> np.ndarray:
        """Component labels numbered by first occurrence."""
        out = np.empty(len(self.parent), dtype=np.int64)
        seen: dict = {}
        for a in range(len(self.parent)):
            out[a] = seen.setdefault(self.find(a), len(seen))
        return out


def euclidean_mst(X: np.ndarray) -> list[tuple[float, int, int]]:
    """Prim's algorithm on the complete graph; edges as (weight, u, v)."""
    n = X.shape[0]
    if n == 1:
        return []
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    link = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    best[:] = np.sqrt(np.sum((X - X[0]) ** 2, axis=1))
    best[0] = np.inf
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        edges.append((float(cand[v]), int(link[v]), v))
        in_tree[v] = True
        dv = np.sqrt(np.sum((X - X[v]) ** 2, axis=1))
        closer = (~in_tree) & (dv < best)
        best[closer] = dv[closer]
        link[closer] = v
    return edges


def single_linkage_opt(dataset, k: int) -> Clustering:
    """Optimal unrestricted max-spacing k-clustering (MST minus its k-1 heaviest edges)."""
    X = as_points(dataset)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n={n}], got {k}")
    edges = sorted(euclidean_mst(X), key=lambda e: (e[0], e[1], e[2]))
    uf = UnionFind(n)
    for w, u, v in edges[: n - k]:
        uf.union(u, v)
    labels = uf.labels()
    reps = np.array([X[labels == g].mean(axis=0) for g in range(k)])
    return Clustering(labels, reps)


def single_linkage_spacing(dataset, k: int) -> float:
    """The (k-1)-th heaviest MST edge, which is the optimal spacing."""
    X = as_points(dataset)
    weights = sorted(e[0] for e in euclidean_mst(X))
    return weights[len(weights) - (k - 1)]


def edge_forest(X: np.ndarray, tau: float) -> np.ndarray:
    """Components of the graph joining points closer than ``tau`` (Kruskal-style unions)."""
    n = X.shape[0]
    D = pairwise_dists(X)
    iu, ju = np.triu_indices(n, 1)
    w = D[iu, ju]
    keep = w < tau
    order = np.argsort(w[keep], kind="stable")
    uf = UnionFind(n)
    for a, b in zip(iu[keep][order], ju[keep][order]):
        uf.union(int(a), int(b))
    return uf.labels()


@dataclass
class SpacingCut:
    cut: AxisCut
    spacing: float
    smaller_side: int


def best_spacing_cut(points) -> SpacingCut:
    """Axis cut of a point set maximizing the smallest cross-side distance.

    Ties prefer the more balanced split, then the lower dimension, then the
    lower threshold.
    """
    X = as_points(points)
    n = X.shape[0]
    if n < 2:
        raise NoCutError("need at least two points")
    D = pairwise_dists(X)
    best = None
    for i in range(X.shape[1]):
        order = np.argsort(X[:, i], kind="stable")
        xs = X[order, i]
        for j in range(n - 1):
            if xs[j] == xs[j + 1]:
                continue
            left = order[: j + 1]
            right = order[j + 1 :]
            small = min(left.size, right.size)
            # the two points adjacent to the cut bound its spacing from above
            upper = D[order[j], order[j + 1]]
            if best is not None and (upper < best.spacing or (upper == best.spacing and small <= best.smaller_side)):
                continue
            sp = float(D[np.ix_(left, right)].min())
            if best is None or sp > best.spacing or (sp == best.spacing and small > best.smaller_side):
                best = SpacingCut(AxisCut(i, float(midpoint(xs[j], xs[j + 1]))), sp, small)
    if best is None:
        raise NoCutError("all points coincide")
    return best


@dataclass
class SingleLinkTrace:
    """Per iteration: the selected cluster (point ids) and the chosen cut."""

    selected: list
    cuts: list


def fit_ex_single_link(dataset, k: int, return_trace: bool = False):
    """Explainable k-clustering with spacing at least OPT / (n - k).

    Returns ``(tree, clustering)`` (plus a :class:`SingleLinkTrace` when asked).
    """
    X = as_points(dataset)
    n = X.shape[0]
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > np.unique(X, axis=0).shape[0]:
        raise DegenerateInputError(f"k={k} exceeds the number of distinct points")
    guide = single_linkage_opt(X, k).assignment
    # leaves in left-to-right order: (point ids, parent split, is-left-child)
    clusters = [np.arange(n)]
    slots: list = [None]
    root: list = [None]
    trace = SingleLinkTrace([], [])
    for _ in range(k - 1):
        pick = next(j for j, pts in enumerate(clusters) if np.unique(guide[pts]).size > 1)
        pts = clusters[pick]
        sc = best_spacing_cut(X[pts])
        mask = X[pts, sc.cut.dim] <= sc.cut.threshold
        node = Split(sc.cut, None, None)
        parent = slots[pick]
        if parent is None:
            root[0] = node
        else:
            split, is_left = parent
            if is_left:
                split.left = node
            else:
                split.right = node
        trace.selected.append(pts)
        trace.cuts.append(sc)
        clusters[pick : pick + 1] = [pts[mask], pts[~mask]]
        slots[pick : pick + 1] = [(node, True), (node, False)]
    labels = np.empty(n, dtype=np.int64)
    reps = np.empty((k, X.shape[1]))
    for g, (pts, slot) in enumerate(zip(clusters, slots)):
        labels[pts] = g
        reps[g] = X[pts].mean(axis=0)
        leaf = Leaf(g, reps[g].copy())
        if slot is None:
            root[0] = leaf
        else:
            split, is_left = slot
            if is_left:
                split.left = leaf
            else:
                split.right = leaf
    tree = ThresholdTree(root[0])
    clustering = Clustering(labels, reps)
    if return_trace:
        return tree, clustering, trace
    return tree, clustering


def guarantee(dataset, k: int) -> float:
    """Lower bound OPT / (n - k) on the spacing Ex-SingleLink attains."""
    X = as_points(dataset)
    n = X.shape[0]
    if n == k:
        return math.inf
    return single_linkage_spacing(X, k) / (n - k)


__all__ = [
    "UnionFind",
    "best_spacing_cut",
    "edge_forest",
    "euclidean_mst",
    "fit_ex_single_link",
    "guarantee",
    "single_linkage_opt",
    "single_linkage_spacing",
    "spacing",
]
