"""Domain types, objective functions and tree-induced clusterings."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

import numpy as np

log = logging.getLogger(__name__)

OBJECTIVES = ("kmeans", "kmedians", "kcenters", "spacing")


class ExclusError(Exception):
    """Base class for errors raised by this package."""


class StructuralError(ExclusError, ValueError):
    """Shapes or indices of the inputs do not fit together."""


class DegenerateInputError(ExclusError, ValueError):
    """The input is well-formed but cannot support the requested clustering."""


class UndefinedSpacingError(ExclusError, ValueError):
    pass


class InadmissibleCutError(ExclusError, ValueError):
    """A cut leaves one side without any reference center."""


class NoCutError(ExclusError, ValueError):
    pass


class BudgetExceededError(ExclusError, RuntimeError):
    pass


def _check_objective(objective: str) -> str:
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    return objective


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable n x d matrix of finite coordinates."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise StructuralError(f"expected a non-empty n x d matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise StructuralError("dataset contains non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def subset(self, idx) -> "Dataset":
        return Dataset(self.points[idx])


def as_points(data: Union[Dataset, np.ndarray, Sequence]) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.points
    return Dataset(data).points


@dataclass(frozen=True)
class AxisCut:
    """Routes a point left when ``x[dim] <= threshold``, right otherwise."""

    dim: int
    threshold: float

    def __post_init__(self):
        if self.dim < 0:
            raise StructuralError(f"negative cut dimension {self.dim}")
        if not math.isfinite(self.threshold):
            raise StructuralError("cut threshold must be finite")

    def goes_left(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[..., self.dim] <= self.threshold


@dataclass(eq=False)
class Leaf:
    cluster: int
    representative: np.ndarray

    def __post_init__(self):
        self.representative = np.asarray(self.representative, dtype=float)


@dataclass(eq=False)
class Split:
    cut: AxisCut
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


@dataclass(eq=False)
class ThresholdTree:
    """Binary tree of axis cuts whose leaves carry a cluster id and a representative."""

    root: Node

    def leaves(self) -> list[Leaf]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return out

    def splits(self) -> Iterator[Split]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Split):
                yield node
                stack.append(node.right)
                stack.append(node.left)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves())

    def depth(self) -> int:
        def rec(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(rec(node.left), rec(node.right))

        return rec(self.root)

    def route(self, points) -> np.ndarray:
        """Cluster id of the leaf each point falls into (ties go left)."""
        X = np.asarray(as_points(points))
        out = np.empty(X.shape[0], dtype=np.int64)
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if isinstance(node, Leaf):
                out[idx] = node.cluster
                continue
            mask = X[idx, node.cut.dim] <= node.cut.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
        return out

    def validate(self, d: Optional[int] = None) -> None:
        """Check leaf ids form a bijection with [0, k) and every region narrows."""
        ids = sorted(leaf.cluster for leaf in self.leaves())
        if ids != list(range(len(ids))):
            raise StructuralError(f"leaf cluster ids {ids} are not a bijection with [0, {len(ids)})")

        def rec(node, lo, hi):
            if isinstance(node, Leaf):
                if d is not None and node.representative.shape != (d,):
                    raise StructuralError("leaf representative has wrong dimension")
                return
            i, t = node.cut.dim, node.cut.threshold
            if d is not None and i >= d:
                raise StructuralError(f"cut dimension {i} out of range for d={d}")
            if not (lo.get(i, -math.inf) <= t < hi.get(i, math.inf)):
                raise StructuralError(f"cut ({i}, {t}) does not narrow its region")
            rec(node.left, lo, {**hi, i: min(hi.get(i, math.inf), t)})
            rec(node.right, {**lo, i: max(lo.get(i, -math.inf), t)}, hi)

        rec(self.root, {}, {})


@dataclass(eq=False)
class Clustering:
    """Per-point group index plus one representative per group."""

    assignment: np.ndarray
    representatives: np.ndarray

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        reps = np.asarray(self.representatives, dtype=float)
        if reps.ndim == 1:
            reps = reps.reshape(1, -1)
        self.representatives = reps
        if self.assignment.ndim != 1:
            raise StructuralError("assignment must be one-dimensional")
        if self.assignment.size and (self.assignment.min() < 0 or self.assignment.max() >= len(reps)):
            raise StructuralError("assignment refers to a missing representative")

    @property
    def k(self) -> int:
        return self.representatives.shape[0]

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def empty_groups(self) -> np.ndarray:
        return np.flatnonzero(self.sizes() == 0)

    def assigned_representatives(self) -> np.ndarray:
        """Row ``j`` holds the representative of point ``j``'s group."""
        return self.representatives[self.assignment]


@dataclass
class CostReport:
    objective: str
    value: float
    per_dim: Optional[np.ndarray] = field(default=None)

    def __float__(self) -> float:
        return float(self.value)


def _check_pair(X: np.ndarray, clustering: Clustering) -> None:
    if clustering.n != X.shape[0]:
        raise StructuralError(f"assignment covers {clustering.n} points, dataset has {X.shape[0]}")
    if clustering.representatives.shape[1] != X.shape[1]:
        raise StructuralError(
            f"representatives have dimension {clustering.representatives.shape[1]}, points have {X.shape[1]}"
        )
    if not np.all(np.isfinite(clustering.representatives)):
        raise StructuralError("representatives must be finite")


def cost_kmeans(dataset, clustering: Clustering) -> CostReport:
    """Sum of squared Euclidean distances to the group representatives."""
    X = as_points(dataset)
    _check_pair(X, clustering)
    diff = X - clustering.assigned_representatives()
    per_dim = np.sum(diff * diff, axis=0)
    return CostReport("kmeans", float(np.sum(per_dim)), per_dim)


def cost_kmedians(dataset, clustering: Clustering) -> CostReport:
    """Sum of L1 distances to the group representatives."""
    X = as_points(dataset)
    _check_pair(X, clustering)
    per_dim = np.sum(np.abs(X - clustering.assigned_representatives()), axis=0)
    return CostReport("kmedians", float(np.sum(per_dim)), per_dim)


def cost_kcenters(dataset, clustering: Clustering) -> CostReport:
    """Largest Euclidean distance from a point to its representative."""
    X = as_points(dataset)
    _check_pair(X, clustering)
    diff = X - clustering.assigned_representatives()
    return CostReport("kcenters", float(np.sqrt(np.max(np.sum(diff * diff, axis=1)))))


def spacing(dataset, clustering: Clustering, block: int = 1024) -> CostReport:
    """Smallest Euclidean distance between two points in different groups."""
    X = as_points(dataset)
    _check_pair(X, clustering)
    labels = clustering.assignment
    if np.unique(labels).size < 2:
        raise UndefinedSpacingError("spacing needs at least two non-empty groups")
    best = math.inf
    for start in range(0, X.shape[0], block):
        rows = slice(start, start + block)
        diff = X[rows, None, :] - X[None, :, :]
        d2 = np.sum(diff * diff, axis=2)
        cross = labels[rows, None] != labels[None, :]
        if cross.any():
            best = min(best, float(np.min(d2[cross])))
    return CostReport("spacing", math.sqrt(best))


COST_FUNCTIONS = {
    "kmeans": cost_kmeans,
    "kmedians": cost_kmedians,
    "kcenters": cost_kcenters,
    "spacing": spacing,
}


def evaluate(dataset, clustering: Clustering, objective: str) -> CostReport:
    return COST_FUNCTIONS[_check_objective(objective)](dataset, clustering)


def induce_clustering(tree: ThresholdTree, dataset) -> Clustering:
    """Clustering of ``dataset`` induced by ``tree``.

    Leaves that receive no point are dropped and the remaining cluster ids
    are compacted in increasing order of the original leaf id.
    """
    X = as_points(dataset)
    leaf_ids = tree.route(X)
    leaves = sorted(tree.leaves(), key=lambda lf: lf.cluster)
    used = np.unique(leaf_ids)
    if used.size < len(leaves):
        log.debug("pruned %d empty leaves", len(leaves) - used.size)
    remap = {int(c): j for j, c in enumerate(used)}
    by_id = {lf.cluster: lf for lf in leaves}
    reps = np.array([by_id[int(c)].representative for c in used], dtype=float).reshape(len(used), X.shape[1])
    assignment = np.fromiter((remap[int(c)] for c in leaf_ids), dtype=np.int64, count=len(leaf_ids))
    return Clustering(assignment, reps)


def centroid_representatives(dataset, clustering: Clustering) -> Clustering:
    """Replace every non-empty group's representative by its centroid."""
    X = as_points(dataset)
    reps = clustering.representatives.copy()
    for g in range(clustering.k):
        mask = clustering.assignment == g
        if mask.any():
            reps[g] = X[mask].mean(axis=0)
    return Clustering(clustering.assignment.copy(), reps)


def lower_median(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Coordinate-wise median; for even counts the lower middle element."""
    v = np.sort(np.asarray(values, dtype=float), axis=axis)
    m = v.shape[axis]
    return np.take(v, (m - 1) // 2, axis=axis)


def median_representatives(dataset, clustering: Clustering) -> Clustering:
    X = as_points(dataset)
    reps = clustering.representatives.copy()
    for g in range(clustering.k):
        mask = clustering.assignment == g
        if mask.any():
            reps[g] = lower_median(X[mask])
    return Clustering(clustering.assignment.copy(), reps)


def reoptimize(dataset, clustering: Clustering, objective: str) -> Clustering:
    """Optional post-pass: objective-optimal representatives for fixed groups."""
    if objective == "kmeans":
        return centroid_representatives(dataset, clustering)
    if objective == "kmedians":
        return median_representatives(dataset, clustering)
    if objective == "kcenters":
        from .oracles import min_enclosing_ball

        X = as_points(dataset)
        reps = clustering.representatives.copy()
        for g in range(clustering.k):
            mask = clustering.assignment == g
            if mask.any():
                reps[g] = min_enclosing_ball(X[mask])[0]
        return Clustering(clustering.assignment.copy(), reps)
    _check_objective(objective)
    return clustering


def price_ratio(explainable_cost: float, unrestricted_cost: float, objective: str) -> float:
    """Explainable over unrestricted cost; inverted for spacing (a maximization)."""
    _check_objective(objective)
    if objective == "spacing":
        num, den = unrestricted_cost, explainable_cost
    else:
        num, den = explainable_cost, unrestricted_cost
    if den == 0:
        return math.inf
    return num / den


def midpoint(a: float, b: float) -> float:
    """A threshold t with a <= t < b for a < b (the plain midpoint when representable)."""
    t = a + (b - a) / 2.0
    if not (a <= t < b):
        t = a
    return t


def check_distinct_centers(centers: np.ndarray) -> None:
    uniq = np.unique(centers, axis=0)
    if uniq.shape[0] != centers.shape[0]:
        raise DegenerateInputError("reference representatives must be pairwise distinct")
