"""Ex-kCenter: clean cuts while they exist, otherwise a grid of identical boxes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    AxisCut,
    Clustering,
    Leaf,
    Split,
    ThresholdTree,
    as_points,
    check_distinct_centers,
)


def center_intervals(X: np.ndarray, C: np.ndarray, labels: np.ndarray, points: np.ndarray, centers: np.ndarray):
    """Per-center [min, max] over the center and its points at the node; shape (s, d) each."""
    lo = C[centers].copy()
    hi = C[centers].copy()
    row = np.full(C.shape[0], -1, dtype=np.int64)
    row[centers] = np.arange(centers.size)
    rows = row[labels[points]]
    np.minimum.at(lo, rows, X[points])
    np.maximum.at(hi, rows, X[points])
    return lo, hi


def find_clean_cut(
    X: np.ndarray, C: np.ndarray, labels: np.ndarray, points: np.ndarray, centers: np.ndarray
) -> Optional[AxisCut]:
    """Widest-margin cut that splits the centers without crossing any center interval."""
    if centers.size < 2:
        return None
    lo, hi = center_intervals(X, C, labels, points, centers)
    best = None  # (margin, dim, theta)
    for i in range(X.shape[1]):
        order = np.argsort(lo[:, i], kind="stable")
        reach = -math.inf
        for rank, r in enumerate(order):
            start = lo[r, i]
            if rank > 0 and start > reach:
                margin = (start - reach) / 2.0
                theta = reach + margin
                if not (reach <= theta < start):
                    theta = reach
                if best is None or margin > best[0]:
                    best = (margin, i, theta)
            reach = max(reach, hi[r, i])
    return None if best is None else AxisCut(best[1], float(best[2]))


def _int_root(s: int, d: int) -> int:
    """floor(s ** (1/d)) computed without floating error."""
    p = int(round(s ** (1.0 / d)))
    while p**d > s:
        p -= 1
    while (p + 1) ** d <= s:
        p += 1
    return max(p, 1)


@dataclass
class GridSpec:
    low: np.ndarray
    high: np.ndarray
    p: int

    @classmethod
    def for_node(cls, X: np.ndarray, C: np.ndarray, points: np.ndarray, centers: np.ndarray) -> "GridSpec":
        pts = np.vstack([X[points], C[centers]])
        return cls(pts.min(axis=0), pts.max(axis=0), _int_root(len(centers), X.shape[1]))

    def cuts(self, i: int) -> np.ndarray:
        if self.p == 1 or self.high[i] <= self.low[i]:
            return np.empty(0)
        t = np.arange(1, self.p)
        cuts = self.low[i] + t * (self.high[i] - self.low[i]) / self.p
        return np.unique(cuts)

    def box_diagonal(self) -> float:
        return float(np.sqrt(np.sum(((self.high - self.low) / self.p) ** 2)))


def grid_tree(spec: GridSpec, X: np.ndarray, points: np.ndarray, next_id: int = 0) -> tuple:
    """Nested balanced cuts realizing the grid; returns ``(node, next_id)``.

    Leaves represent non-empty boxes, with the centroid of their points as the
    representative; empty boxes are pruned.
    """
    d = X.shape[1]
    counter = [next_id]

    def rec(dim: int, cuts: np.ndarray, pts: np.ndarray):
        if pts.size == 0:
            return None
        if cuts.size == 0:
            if dim + 1 < d:
                return rec(dim + 1, spec.cuts(dim + 1), pts)
            leaf = Leaf(counter[0], X[pts].mean(axis=0))
            counter[0] += 1
            return leaf
        mid = cuts.size // 2
        cut = AxisCut(dim, float(cuts[mid]))
        mask = X[pts, dim] <= cut.threshold
        left = rec(dim, cuts[:mid], pts[mask])
        right = rec(dim, cuts[mid + 1 :], pts[~mask])
        if left is None:
            return right
        if right is None:
            return left
        return Split(cut, left, right)

    node = rec(0, spec.cuts(0), points)
    return node, counter[0]


def fit_ex_kcenter(dataset, reference: Clustering) -> ThresholdTree:
    """Ex-kCenter tree; the induced clustering has at most k groups."""
    X = as_points(dataset)
    C = np.asarray(reference.representatives, dtype=float)
    labels = np.asarray(reference.assignment)
    check_distinct_centers(C)
    next_id = [0]

    def build(points: np.ndarray):
        centers = np.unique(labels[points])
        if centers.size == 1:
            c = int(centers[0])
            leaf = Leaf(next_id[0], C[c].copy())
            next_id[0] += 1
            return leaf
        cut = find_clean_cut(X, C, labels, points, centers)
        if cut is not None:
            mask = X[points, cut.dim] <= cut.threshold
            return Split(cut, build(points[mask]), build(points[~mask]))
        spec = GridSpec.for_node(X, C, points, centers)
        node, next_id[0] = grid_tree(spec, X, points, next_id[0])
        return node

    return ThresholdTree(build(np.arange(X.shape[0])))


def grid_leaf_bound(dataset, reference: Clustering) -> float:
    """Largest grid-box diagonal the algorithm can produce at the root, ``sqrt(d) max L_i / p``."""
    X = as_points(dataset)
    C = np.asarray(reference.representatives, dtype=float)
    spec = GridSpec.for_node(X, C, np.arange(X.shape[0]), np.arange(C.shape[0]))
    return math.sqrt(X.shape[1]) * float(np.max(spec.high - spec.low)) / spec.p
