"""IMM baseline: at each node, the cut separating the fewest points from their centers."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .core import (
    AxisCut,
    Clustering,
    DegenerateInputError,
    Leaf,
    Split,
    ThresholdTree,
    as_points,
    check_distinct_centers,
    midpoint,
)


def candidate_thresholds(
    point_coords: np.ndarray, center_coords: np.ndarray, center_gaps_only: bool = False
) -> np.ndarray:
    """Thresholds lying strictly inside the span of the node's centers.

    Always includes the midpoint of every gap between consecutive distinct
    center coordinates; unless ``center_gaps_only``, also every midpoint
    between consecutive distinct values inside a center gap.
    """
    cvals = np.unique(center_coords)
    if cvals.size < 2:
        return np.empty(0)
    gaps = np.array([midpoint(a, b) for a, b in zip(cvals[:-1], cvals[1:])])
    if center_gaps_only:
        return gaps
    lo, hi = cvals[0], cvals[-1]
    inner = point_coords[(point_coords > lo) & (point_coords < hi)]
    vals = np.unique(np.concatenate([cvals, inner]))
    mids = np.array([midpoint(a, b) for a, b in zip(vals[:-1], vals[1:])])
    return np.unique(np.concatenate([gaps, mids]))


def mistake_counts(point_coords: np.ndarray, own_center_coords: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Points whose side of each threshold differs from their center's side.

    A point is separated by ``t`` exactly when ``min(x, c) <= t < max(x, c)``.
    """
    lo = np.sort(np.minimum(point_coords, own_center_coords))
    hi = np.sort(np.maximum(point_coords, own_center_coords))
    return np.searchsorted(lo, thresholds, side="right") - np.searchsorted(hi, thresholds, side="right")


def best_imm_cut(
    X: np.ndarray,
    C: np.ndarray,
    labels: np.ndarray,
    points: np.ndarray,
    centers: np.ndarray,
    center_gaps_only: bool = False,
) -> tuple[Optional[AxisCut], int]:
    """Fewest-mistakes cut at a node; ties by dimension, then threshold."""
    counted = points[np.isin(labels[points], centers)]
    best: tuple = (None, np.iinfo(np.int64).max)
    for i in range(X.shape[1]):
        th = candidate_thresholds(X[points, i], C[centers, i], center_gaps_only)
        if th.size == 0:
            continue
        m = mistake_counts(X[counted, i], C[labels[counted], i], th)
        j = int(np.argmin(m))
        if m[j] < best[1]:
            best = (AxisCut(i, float(th[j])), int(m[j]))
    return best


def fit_imm(dataset, reference: Clustering, center_gaps_only: bool = False) -> ThresholdTree:
    X = as_points(dataset)
    C = np.asarray(reference.representatives, dtype=float)
    labels = np.asarray(reference.assignment)
    check_distinct_centers(C)

    def build(points: np.ndarray, centers: np.ndarray):
        if centers.size == 1:
            c = int(centers[0])
            return Leaf(c, C[c].copy())
        cut, _ = best_imm_cut(X, C, labels, points, centers, center_gaps_only)
        if cut is None:
            raise DegenerateInputError("no cut separates the node's centers")
        pl = X[points, cut.dim] <= cut.threshold
        cl = C[centers, cut.dim] <= cut.threshold
        return Split(cut, build(points[pl], centers[cl]), build(points[~pl], centers[~cl]))

    return ThresholdTree(build(np.arange(X.shape[0]), np.arange(C.shape[0])))
