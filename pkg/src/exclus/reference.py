"""Unrestricted reference clusterings fed to the explainable algorithms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Clustering,
    DegenerateInputError,
    as_points,
    cost_kmeans,
    cost_kmedians,
    lower_median,
)


@dataclass(frozen=True)
class ReferenceConfig:
    k: int
    seed: int = 0
    max_iters: int = 300
    tol: float = 1e-4
    n_init: int = 10

    def validate(self, n: int) -> None:
        if not 1 <= self.k <= n:
            raise ValueError(f"k must lie in [1, n={n}], got {self.k}")
        if self.max_iters < 1 or self.n_init < 1:
            raise ValueError("max_iters and n_init must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


def _n_distinct(X: np.ndarray) -> int:
    return np.unique(X, axis=0).shape[0]


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.sum(diff * diff, axis=2)


def _l1_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(X[:, None, :] - C[None, :, :]), axis=2)


def kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++ seeding (2 + ln k candidates per step)."""
    n = X.shape[0]
    trials = 2 + int(np.log(k))
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sq_dists(X, centers[:1])[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            # every point already coincides with a center; pick an unused distinct point
            used = {tuple(r) for r in centers[:c]}
            centers[c] = next(x for x in X if tuple(x) not in used)
            closest = np.minimum(closest, _sq_dists(X, centers[c : c + 1])[:, 0])
            continue
        cand = np.searchsorted(np.cumsum(closest), rng.random(trials) * total)
        cand = np.minimum(cand, n - 1)
        cand_d = np.minimum(closest[None, :], _sq_dists(X, X[cand]).T)
        best = int(np.argmin(cand_d.sum(axis=1)))
        centers[c] = X[cand[best]]
        closest = cand_d[best]
    return centers


def _repair_empty(X, labels, centers, dist):
    """Reseed each empty group with the point farthest from its current representative."""
    k = centers.shape[0]
    for _ in range(k):
        sizes = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(sizes == 0)
        if empty.size == 0:
            return labels
        own = dist[np.arange(X.shape[0]), labels]
        own = np.where(sizes[labels] > 1, own, -np.inf)
        far = int(np.argmax(own))
        g = int(empty[0])
        centers[g] = X[far]
        labels = labels.copy()
        labels[far] = g
    return labels


def _lloyd(X, centers, max_iters, tol, dist_fn, update_fn, cost_fn):
    labels = None
    prev = np.inf
    centers = centers.copy()
    for _ in range(max_iters):
        dist = dist_fn(X, centers)
        new = np.argmin(dist, axis=1)
        new = _repair_empty(X, new, centers, dist)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = update_fn(X, labels, centers.shape[0])
        cost = cost_fn(X, labels, centers)
        if prev < np.inf and prev - cost <= tol * prev:
            # final assignment step against the current representatives
            dist = dist_fn(X, centers)
            final = np.argmin(dist, axis=1)
            if np.bincount(final, minlength=centers.shape[0]).min() > 0:
                labels = final
                break
        prev = cost
    return labels, centers


def _centroids(X, labels, k):
    return np.array([X[labels == g].mean(axis=0) for g in range(k)])


def _medians(X, labels, k):
    return np.array([lower_median(X[labels == g]) for g in range(k)])


def _sse(X, labels, centers):
    diff = X - centers[labels]
    return float(np.sum(diff * diff))


def _l1(X, labels, centers):
    return float(np.sum(np.abs(X - centers[labels])))


def kmeans_reference(dataset, config: ReferenceConfig) -> Clustering:
    """Best of ``n_init`` k-means++ seeded Lloyd runs; deterministic per seed."""
    X = as_points(dataset)
    config.validate(X.shape[0])
    if config.k > _n_distinct(X):
        raise DegenerateInputError(f"k={config.k} exceeds the number of distinct points")
    rng = np.random.default_rng(config.seed)
    best = None
    for _ in range(config.n_init):
        init = kmeans_plusplus(X, config.k, rng)
        labels, centers = _lloyd(X, init, config.max_iters, config.tol, _sq_dists, _centroids, _sse)
        cost = _sse(X, labels, centers)
        if best is None or cost < best[0]:
            best = (cost, labels, centers)
    return Clustering(best[1], best[2])


def kmedians_reference(dataset, config: ReferenceConfig) -> Clustering:
    """Lloyd-style alternation under L1 with coordinate-wise lower medians.

    Warm-started from :func:`kmeans_reference`, so its L1 cost never exceeds
    the L1 cost of that k-means clustering.
    """
    X = as_points(dataset)
    start = kmeans_reference(X, config)
    labels, centers = _lloyd(
        X,
        _medians(X, start.assignment, config.k),
        config.max_iters,
        config.tol,
        _l1_dists,
        _medians,
        _l1,
    )
    return Clustering(labels, centers)


def kcenters_reference(dataset, config: ReferenceConfig) -> Clustering:
    """Farthest-first traversal from point 0 (the classical 2-approximation)."""
    X = as_points(dataset)
    config.validate(X.shape[0])
    if config.k > _n_distinct(X):
        raise DegenerateInputError(f"k={config.k} exceeds the number of distinct points")
    chosen = [0]
    closest = _sq_dists(X, X[:1])[:, 0]
    for _ in range(1, config.k):
        nxt = int(np.argmax(closest))
        chosen.append(nxt)
        closest = np.minimum(closest, _sq_dists(X, X[nxt : nxt + 1])[:, 0])
    centers = X[chosen].copy()
    labels = np.argmin(_sq_dists(X, centers), axis=1)
    return Clustering(labels, centers)


def reference_cost(dataset, clustering: Clustering, objective: str) -> float:
    if objective == "kmeans":
        return cost_kmeans(dataset, clustering).value
    if objective == "kmedians":
        return cost_kmedians(dataset, clustering).value
    from .core import evaluate

    return evaluate(dataset, clustering, objective).value
