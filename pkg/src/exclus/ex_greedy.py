"""Ex-Greedy: k-leaf threshold trees for k-means via a sorted-list cost scan.

At every node reached by two or more reference centers, the cut minimizing

    sum over sides of  sum_x  min_{c on x's side} ||x - c||^2

is applied. Each dimension is scanned once over the merged, coordinate-sorted
list of the node's points and centers, maintaining for every point the
closest center on its left (``v_left``) and a cursor into its
distance-sorted center list for the closest center on its right
(``v_right``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    AxisCut,
    Clustering,
    InadmissibleCutError,
    Leaf,
    Split,
    ThresholdTree,
    as_points,
    check_distinct_centers,
    midpoint,
)

# every finite double is an integer multiple of 2**-1074
_SCALE = 1 << 1074


def _fixed(v: float) -> int:
    num, den = float(v).as_integer_ratio()
    return num * (_SCALE // den)


def _unfixed(acc: int) -> float:
    return acc / _SCALE


def pair_sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.sum(diff * diff, axis=2)


@dataclass
class NodeState:
    """Points and centers reaching a node, with the scan's sorted structures.

    ``sorted_lists[i]`` holds entry codes sorted by coordinate ``i`` (ties by
    kind, then index): a code ``>= 0`` is a point id, ``-1 - c`` is center
    ``c``. ``nearest[r]`` lists the node's centers by increasing squared
    distance to ``points[r]``.
    """

    X: np.ndarray
    C: np.ndarray
    D: np.ndarray
    points: np.ndarray
    centers: np.ndarray
    sorted_lists: list
    nearest: np.ndarray

    @classmethod
    def root(cls, X: np.ndarray, C: np.ndarray) -> "NodeState":
        n, k = X.shape[0], C.shape[0]
        D = pair_sq_dists(X, C)
        nearest = np.argsort(D, axis=1, kind="stable")
        codes = np.concatenate([np.arange(n), -1 - np.arange(k)])
        kind = np.concatenate([np.zeros(n, dtype=int), np.ones(k, dtype=int)])
        ident = np.concatenate([np.arange(n), np.arange(k)])
        lists = []
        for i in range(X.shape[1]):
            coord = np.concatenate([X[:, i], C[:, i]])
            order = np.lexsort((ident, kind, coord))
            lists.append(codes[order])
        return cls(X, C, D, np.arange(n), np.arange(k), lists, nearest)

    def coords(self, i: int, codes: np.ndarray) -> np.ndarray:
        out = np.empty(codes.shape[0])
        pts = codes >= 0
        out[pts] = self.X[codes[pts], i]
        out[~pts] = self.C[-1 - codes[~pts], i]
        return out

    def child(self, cut: AxisCut, left: bool) -> "NodeState":
        pmask = (self.X[self.points, cut.dim] <= cut.threshold) == left
        cmask = (self.C[self.centers, cut.dim] <= cut.threshold) == left
        points = self.points[pmask]
        centers = self.centers[cmask]
        keep_p = np.zeros(self.X.shape[0], dtype=bool)
        keep_p[points] = True
        keep_c = np.zeros(self.C.shape[0], dtype=bool)
        keep_c[centers] = True
        lists = []
        for sl in self.sorted_lists:
            pts = sl >= 0
            keep = np.where(pts, keep_p[np.where(pts, sl, 0)], keep_c[np.where(pts, 0, -1 - sl)])
            lists.append(sl[keep])
        rows = self.nearest[pmask]
        nearest = rows[keep_c[rows]].reshape(rows.shape[0], centers.shape[0])
        return NodeState(self.X, self.C, self.D, points, centers, lists, nearest)


@dataclass
class ScanCounters:
    case1_steps: int = 0
    case2_left_checks: int = 0
    case2_right_advances: int = 0

    @property
    def case2_work(self) -> int:
        return self.case2_left_checks + self.case2_right_advances


@dataclass
class ScanResult:
    cut: Optional[AxisCut]
    cost: float
    counters: ScanCounters = field(default_factory=ScanCounters)


def scan_dimension(state: NodeState, i: int) -> ScanResult:
    """Minimum-cost admissible prefix cut of ``sorted_lists[i]``.

    Returns ``cut=None`` and ``cost=inf`` when no prefix leaves a center on
    both sides with distinct boundary coordinates.
    """
    D = state.D
    sl = state.sorted_lists[i]
    coord = state.coords(i, sl)
    n_u = state.points.shape[0]
    s_u = state.centers.shape[0]
    k = state.C.shape[0]
    nearest = state.nearest
    counters = ScanCounters()

    row_of = np.full(state.X.shape[0], -1, dtype=np.int64)
    row_of[state.points] = np.arange(n_u)
    in_left = np.zeros(k, dtype=bool)
    n_left_centers = 0

    on_left = np.zeros(n_u, dtype=bool)
    v_left = np.full(n_u, -1, dtype=np.int64)
    v_right = np.zeros(n_u, dtype=np.int64)
    contrib = [0] * n_u
    acc = 0
    pts = state.points
    for r in range(n_u):
        c = nearest[r, 0]
        contrib[r] = _fixed(D[pts[r], c])
        acc += contrib[r]

    best_cost = math.inf
    best_theta = None
    N = sl.shape[0]
    for j in range(N):
        e = int(sl[j])
        if e >= 0:
            # a point moves from right to left
            r = int(row_of[e])
            counters.case1_steps += 1
            on_left[r] = True
            acc -= contrib[r]
            contrib[r] = 0
            row = nearest[r]
            for pos in range(s_u):
                counters.case1_steps += 1
                c = row[pos]
                if in_left[c]:
                    v_left[r] = c
                    contrib[r] = _fixed(D[e, c])
                    acc += contrib[r]
                    break
        else:
            c = -1 - e
            in_left[c] = True
            n_left_centers += 1
            left_rows = np.flatnonzero(on_left)
            counters.case2_left_checks += left_rows.size
            if left_rows.size:
                dc = D[pts[left_rows], c]
                cur = v_left[left_rows]
                dcur = np.where(cur >= 0, D[pts[left_rows], np.maximum(cur, 0)], np.inf)
                for r in left_rows[dc < dcur]:
                    v_left[r] = c
                    acc -= contrib[r]
                    contrib[r] = _fixed(D[pts[r], c])
                    acc += contrib[r]
            right_rows = np.flatnonzero(~on_left)
            if right_rows.size:
                valid = v_right[right_rows] < s_u
                cand = right_rows[valid]
                hit = cand[nearest[cand, v_right[cand]] == c]
                for r in hit:
                    pos = v_right[r]
                    row = nearest[r]
                    while pos < s_u and in_left[row[pos]]:
                        pos += 1
                        counters.case2_right_advances += 1
                    v_right[r] = pos
                    acc -= contrib[r]
                    contrib[r] = _fixed(D[pts[r], row[pos]]) if pos < s_u else 0
                    acc += contrib[r]
        if (
            j + 1 < N
            and 0 < n_left_centers < s_u
            and coord[j] < coord[j + 1]
        ):
            cost = _unfixed(acc)
            if cost < best_cost:
                best_cost = cost
                best_theta = midpoint(coord[j], coord[j + 1])
    cut = None if best_theta is None else AxisCut(i, float(best_theta))
    return ScanResult(cut, best_cost, counters)


def naive_cut_cost(state: NodeState, cut: AxisCut) -> float:
    """Two-sided nearest-center SSED of ``cut`` evaluated by a direct double loop."""
    cl = state.C[state.centers, cut.dim] <= cut.threshold
    left_c = state.centers[cl]
    right_c = state.centers[~cl]
    if left_c.size == 0 or right_c.size == 0:
        raise InadmissibleCutError(f"cut {cut} leaves a side without centers")
    terms = []
    for p in state.points:
        side = left_c if state.X[p, cut.dim] <= cut.threshold else right_c
        terms.append(min(state.D[p, c] for c in side))
    return math.fsum(terms)


def naive_best_cut(state: NodeState) -> tuple[Optional[AxisCut], float]:
    """Reference search: every admissible prefix of every dimension, cost by :func:`naive_cut_cost`."""
    best = (None, math.inf)
    for i, sl in enumerate(state.sorted_lists):
        coord = state.coords(i, sl)
        is_center = sl < 0
        n_left = np.cumsum(is_center)
        s_u = int(is_center.sum())
        for j in range(sl.shape[0] - 1):
            if 0 < n_left[j] < s_u and coord[j] < coord[j + 1]:
                cut = AxisCut(i, float(midpoint(coord[j], coord[j + 1])))
                cost = naive_cut_cost(state, cut)
                if cost < best[1]:
                    best = (cut, cost)
    return best


def best_cut(state: NodeState) -> tuple[AxisCut, float, list[ScanCounters]]:
    best: tuple = (None, math.inf)
    counters = []
    for i in range(state.X.shape[1]):
        res = scan_dimension(state, i)
        counters.append(res.counters)
        if res.cut is not None and res.cost < best[1]:
            best = (res.cut, res.cost)
    if best[0] is None:
        raise InadmissibleCutError("no admissible cut; are reference centers distinct?")
    return best[0], best[1], counters


def fit_ex_greedy(dataset, reference: Clustering, naive: bool = False) -> ThresholdTree:
    """Build the Ex-Greedy tree guided by the reference representatives.

    Leaf ``c`` carries reference center ``c`` as its representative. With
    ``naive=True`` every split is chosen by :func:`naive_best_cut` instead of
    the incremental scan.
    """
    X = as_points(dataset)
    C = np.asarray(reference.representatives, dtype=float)
    check_distinct_centers(C)

    def build(state: NodeState):
        if state.centers.shape[0] == 1:
            c = int(state.centers[0])
            return Leaf(c, C[c].copy())
        if naive:
            cut, _ = naive_best_cut(state)
        else:
            cut, _, _ = best_cut(state)
        return Split(cut, build(state.child(cut, True)), build(state.child(cut, False)))

    return ThresholdTree(build(NodeState.root(X, C)))


def trace_cuts(tree: ThresholdTree) -> list[tuple[int, float]]:
    """Preorder list of (dim, threshold) pairs."""
    return [(s.cut.dim, s.cut.threshold) for s in tree.splits()]
