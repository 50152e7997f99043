import numpy as np
import pytest

from exclus.core import Clustering, DegenerateInputError, evaluate, induce_clustering
from exclus.imm import best_imm_cut, candidate_thresholds, fit_imm, mistake_counts
from exclus.instances import gen_blobs

from helpers import random_instance, voronoi_reference


def brute_mistakes(x, c, t):
    return int(np.sum((x <= t) != (c <= t)))


def test_mistake_counts_match_direct_count():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 5, 40).astype(float)
    c = rng.integers(0, 5, 40).astype(float)
    th = np.array([-1.0, 0.5, 1.0, 2.5, 4.0, 7.0])
    assert list(mistake_counts(x, c, th)) == [brute_mistakes(x, c, t) for t in th]


def test_candidates_stay_inside_center_span():
    th = candidate_thresholds(np.array([-5.0, 1.0, 2.0, 3.0, 9.0]), np.array([0.0, 4.0]))
    assert th.min() >= 0.0 and th.max() < 4.0
    assert 2.0 in th  # center gap midpoint
    assert list(candidate_thresholds(np.array([1.0]), np.array([0.0, 4.0]), center_gaps_only=True)) == [2.0]


def test_separable_reference_ratio_one():
    ds, ref = gen_blobs(90, 3, 2, separation=40.0, seed=2)
    C = np.array([ds.points[ref.assignment == g].mean(axis=0) for g in range(3)])
    ref = voronoi_reference(ds.points, C)
    tree = fit_imm(ds, ref)
    cost = evaluate(ds, induce_clustering(tree, ds), "kmeans").value
    assert cost == pytest.approx(evaluate(ds, ref, "kmeans").value, rel=1e-12)


def test_only_differing_dimension_is_cut():
    C = np.array([[1.0, 2.0, 3.0, 0.0], [1.0, 2.0, 3.0, 8.0]])
    X = np.vstack([C, C + 0.1])
    tree = fit_imm(X, voronoi_reference(X, C))
    assert tree.root.cut.dim == 3 and tree.root.cut.threshold == 4.0


def test_cut_is_minimum_over_all_thresholds():
    rng = np.random.default_rng(5)
    for _ in range(30):
        ds, ref = random_instance(rng, 30, 2, 4, grid=True)
        X, C, lab = ds.points, ref.representatives, ref.assignment
        pts, cen = np.arange(ds.n), np.arange(4)
        _, best = best_imm_cut(X, C, lab, pts, cen)
        direct = min(
            brute_mistakes(X[:, i], C[lab, i], t)
            for i in range(2)
            for t in np.unique(np.concatenate([X[:, i], C[:, i]]))
            if C[:, i].min() <= t < C[:, i].max()
        )
        assert best == direct


def test_duplicate_centers():
    with pytest.raises(DegenerateInputError):
        fit_imm(np.zeros((2, 1)), Clustering([0, 1], [[1.0], [1.0]]))


def test_leaves_carry_reference_centers():
    rng = np.random.default_rng(9)
    ds, ref = random_instance(rng, 40, 3, 5)
    tree = fit_imm(ds, ref)
    tree.validate(3)
    assert tree.n_leaves == 5
    for leaf in tree.leaves():
        assert np.array_equal(leaf.representative, ref.representatives[leaf.cluster])
