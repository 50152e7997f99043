import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exclus.core import DegenerateInputError, NoCutError, evaluate, induce_clustering
from exclus.instances import gen_spacing_lb
from exclus.maxspacing import (
    UnionFind,
    best_spacing_cut,
    edge_forest,
    euclidean_mst,
    fit_ex_single_link,
    guarantee,
    pairwise_dists,
    single_linkage_opt,
    single_linkage_spacing,
)


def test_mst_total_matches_kruskal():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(25, 3))
    D = pairwise_dists(X)
    iu, ju = np.triu_indices(25, 1)
    uf = UnionFind(25)
    total = 0.0
    for e in np.argsort(D[iu, ju], kind="stable"):
        if uf.union(int(iu[e]), int(ju[e])):
            total += D[iu[e], ju[e]]
    assert sum(w for w, _, _ in euclidean_mst(X)) == pytest.approx(total, rel=1e-12)


def test_union_find_labels_first_occurrence():
    uf = UnionFind(5)
    uf.union(3, 4)
    uf.union(1, 3)
    assert list(uf.labels()) == [0, 1, 2, 1, 1]


def test_k_equals_n():
    X = np.random.default_rng(1).normal(size=(8, 2))
    cl = single_linkage_opt(X, 8)
    D = pairwise_dists(X)
    assert evaluate(X, cl, "spacing").value == pytest.approx(D[np.triu_indices(8, 1)].min(), rel=1e-12)


def test_two_blobs():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    assert single_linkage_spacing(X, 2) == 10.0
    assert evaluate(X, single_linkage_opt(X, 2), "spacing").value == 10.0


def test_k_out_of_range():
    with pytest.raises(ValueError):
        single_linkage_opt(np.zeros((3, 1)), 4)


def test_best_cut_two_points():
    sc = best_spacing_cut(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert sc.spacing == 5.0
    assert sc.cut.threshold in (1.5, 2.0)


def test_best_cut_collinear():
    sc = best_spacing_cut(np.array([[0.0], [1.0], [5.0], [6.0]]))
    assert sc.cut.threshold == 3.0 and sc.spacing == 4.0


def test_best_cut_identical_points():
    with pytest.raises(NoCutError):
        best_spacing_cut(np.zeros((3, 2)))


def test_best_cut_is_exhaustive_optimum():
    rng = np.random.default_rng(2)
    for _ in range(30):
        X = rng.integers(0, 8, size=(10, 2)).astype(float)
        if np.unique(X, axis=0).shape[0] < 2:
            continue
        D = pairwise_dists(X)
        best = 0.0
        for i in range(2):
            for t in np.unique(X[:, i])[:-1]:
                L = X[:, i] <= t
                best = max(best, D[np.ix_(L, ~L)].min())
        assert best_spacing_cut(X).spacing == best


def test_edge_forest_components():
    X = np.array([[0.0], [1.0], [5.0], [5.5]])
    assert list(edge_forest(X, 1.5)) == [0, 0, 1, 1]
    assert list(edge_forest(X, 1.0)) == [0, 1, 2, 2]


def test_axis_separable_optimum_recovered():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [20.0, 0.0], [21.0, 0.0], [40.0, 0.0]])
    tree, cl = fit_ex_single_link(X, 3)
    assert evaluate(X, cl, "spacing").value == single_linkage_spacing(X, 3) == 19.0


def test_lower_bound_instance():
    ds, _ = gen_spacing_lb(2, 3)
    assert single_linkage_spacing(ds, 2) == 2.0
    _, cl = fit_ex_single_link(ds, 2)
    assert evaluate(ds, cl, "spacing").value >= 1.0


def test_trace_records_each_split():
    ds, _ = gen_spacing_lb(3, 4)
    tree, cl, trace = fit_ex_single_link(ds, 3, return_trace=True)
    assert len(trace.cuts) == 2 == len(trace.selected)
    assert tree.n_leaves == 3
    assert np.array_equal(induce_clustering(tree, ds).assignment, cl.assignment)


def test_degenerate():
    with pytest.raises(DegenerateInputError):
        fit_ex_single_link(np.zeros((4, 2)), 2)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
@settings(max_examples=60, deadline=None)
def test_guarantee_holds(seed, k):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(k + 1, 41))
    X = rng.normal(size=(n, int(rng.integers(1, 4))))
    _, cl = fit_ex_single_link(X, k)
    assert evaluate(X, cl, "spacing").value >= guarantee(X, k) * (1 - 1e-12)
