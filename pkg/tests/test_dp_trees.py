import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exclus.core import Clustering, NoCutError, evaluate, induce_clustering
from exclus.dp_trees import (
    CutStats,
    borrowed_sets_disjoint,
    build_combined,
    build_combined_tree,
    build_di,
    coordinate_cost,
    cut_stats,
    di_upper_bounds,
    gap_bound,
    jensen_holds,
    lca_cut,
    lca_node,
    mistake_penalty,
    search_tree_ratio,
    ub_value,
)
from exclus.oracles import enumerate_di_opt

from helpers import random_instance, voronoi_reference


def stats_from(values, T):
    values = np.asarray(values, dtype=float)
    th = (values[:-1] + values[1:]) / 2
    return CutStats(0, values, np.arange(values.size), th, np.asarray(T, dtype=np.int64))


@st.composite
def cut_stats_st(draw, max_gaps=6):
    m = draw(st.integers(1, max_gaps))
    gaps = draw(st.lists(st.integers(1, 9), min_size=m, max_size=m))
    values = np.concatenate([[0.0], np.cumsum(gaps)]).astype(float)
    T = draw(st.lists(st.integers(0, 12), min_size=m, max_size=m))
    return stats_from(values, T)


def test_cut_stats_all_points_at_centers():
    C = np.array([[0.0], [4.0], [9.0]])
    s = cut_stats(C, Clustering([0, 1, 2], C), 0)
    assert list(s.T) == [0, 0]


def test_cut_stats_single_mistake():
    X = np.array([[0.0], [10.0], [4.0]])
    s = cut_stats(X, Clustering([0, 1, 1], [[0.0], [10.0]]), 0)
    assert list(s.thresholds) == [5.0] and list(s.T) == [1]


def test_single_gap_tree():
    s = stats_from([2.0, 7.0], [3])
    for obj, w in (("kmedians", 5.0), ("kmeans", 25.0)):
        di = build_di(s, obj)
        assert di.value == ub_value(di, s, obj) == 3 * w


def test_two_gaps_take_cheaper_shape():
    s = stats_from([0.0, 1.0, 5.0], [4, 1])
    # root at gap 0: 4*5 + 1*4 = 24; root at gap 1: 1*5 + 4*1 = 9
    assert build_di(s, "kmedians").value == 9.0 == enumerate_di_opt(s, "kmedians")


def test_zero_mistakes_zero_cost():
    assert build_di(stats_from([0, 1, 2, 3], [0, 0, 0]), "kmeans").value == 0.0


def test_no_gap_raises():
    with pytest.raises(NoCutError):
        build_di(stats_from([1.0], []), "kmedians")


def test_balanced_tree_is_optimal_for_uniform_input():
    s = stats_from(np.arange(8.0), [1] * 7)
    di = build_di(s, "kmedians")
    assert di.value == enumerate_di_opt(s, "kmedians")
    # a perfectly balanced tree on 7 gaps has root 3
    balanced = {3: (1, 5), 1: (0, 2), 5: (4, 6)}
    left = np.full(7, -1)
    right = np.full(7, -1)
    for j, (a, b) in balanced.items():
        left[j], right[j] = a, b
    from exclus.dp_trees import _tree_from_shape

    assert ub_value(_tree_from_shape(s, 3, left, right), s, "kmedians") == di.value


@given(cut_stats_st(), st.sampled_from(["kmedians", "kmeans"]))
@settings(max_examples=100, deadline=None)
def test_dp_equals_enumeration(stats, objective):
    di = build_di(stats, objective)
    assert di.value == enumerate_di_opt(stats, objective)
    assert ub_value(di, stats, objective) == di.value


def test_lca_full_range_is_root():
    di = build_di(stats_from([0, 1, 2, 3, 4], [1, 2, 3, 4]), "kmedians")
    assert lca_node(di, 0, 4) == di.root
    assert lca_cut(di, (0, 4)) == di.cut(di.root)


def test_lca_adjacent_pair():
    di = build_di(stats_from([0, 1, 2, 3, 4], [5, 1, 1, 5]), "kmedians")
    for j in range(4):
        assert lca_node(di, j, j + 1) == j


def test_lca_single_group_raises():
    di = build_di(stats_from([0, 1], [1]), "kmedians")
    with pytest.raises(NoCutError):
        lca_node(di, 1, 1)


def test_two_centers_single_cut_on_wider_dimension():
    C = np.array([[0.0, 0.0], [1.0, 6.0]])
    X = np.vstack([C, C + 0.2])
    tree = build_combined_tree(X, voronoi_reference(X, C), "kmedians")
    assert tree.n_leaves == 2 and tree.root.cut.dim == 1


@pytest.mark.parametrize("objective", ["kmedians", "kmeans"])
def test_axis_separable_recovers_reference(objective):
    C = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]])
    rng = np.random.default_rng(0)
    X = np.vstack([c + rng.uniform(-1, 1, (10, 2)) for c in C])
    ref = voronoi_reference(X, C)
    comb = build_combined(X, ref, objective)
    assert all(node.mistakes == 0 for node in comb.nodes)
    cost = evaluate(X, induce_clustering(comb.tree, X), objective).value
    assert cost == pytest.approx(evaluate(X, ref, objective).value, rel=1e-12)


@pytest.mark.parametrize("objective", ["kmedians", "kmeans"])
def test_bound_audits_on_lloyd_references(objective):
    rng = np.random.default_rng(17)
    for _ in range(10):
        ds, ref = random_instance(rng, 60, 3, int(rng.integers(4, 9)), lloyd=True)
        comb = build_combined(ds, ref, objective)
        penalty = mistake_penalty(comb, objective)
        ub = di_upper_bounds(comb, objective)
        assert penalty <= ds.d * ub.sum() * (1 + 1e-9) + 1e-9
        assert borrowed_sets_disjoint(comb)
        k = ref.k
        for i, di in enumerate(comb.di_trees):
            if di is None:
                continue
            opt_i = coordinate_cost(ds, ref, i, objective)
            assert gap_bound(di.stats, objective) / 2 <= opt_i * (1 + 1e-9) + 1e-9
            # monitored, not enforced: the log base of this bound is unstated
            factor = 2 * math.log2(k) * (k if objective == "kmeans" else 1)
            if search_tree_ratio(di, objective) > factor * (1 + 1e-9):
                warnings.warn(f"search-tree ratio above 2 log2 k on dim {i}")
            assert jensen_holds(di)
        cost = evaluate(ds, induce_clustering(comb.tree, ds), objective).value
        assert cost <= evaluate(ds, ref, objective).value + penalty + 1e-9


def test_squared_gap_bound_needs_quarter_factor():
    # off-Voronoi reference: a point assigned to a center that is not its nearest
    X = np.array([[0.0, 0.0], [2.0, 100.0], [1.01, 0.0]])
    ref = Clustering([0, 1, 0], [[0.0, 0.0], [2.0, 100.0]])
    s = cut_stats(X, ref, 0)
    opt0 = coordinate_cost(X, ref, 0, "kmeans")
    assert gap_bound(s, "kmeans") / 2 > opt0
    assert gap_bound(s, "kmeans") / 4 <= opt0


def test_kmeans_tree_cost_needs_factor_two():
    X = np.array([[0.0, 0.0], [10.0, 9.0], [6.0, -20.0]] + [[0.0, 0.0]] * 5 + [[10.0, 9.0]] * 5)
    ref = Clustering([0, 1, 0] + [0] * 5 + [1] * 5, [[0.0, 0.0], [10.0, 9.0]])
    comb = build_combined(X, ref, "kmeans")
    cost = evaluate(X, induce_clustering(comb.tree, X), "kmeans").value
    refc = evaluate(X, ref, "kmeans").value
    penalty = mistake_penalty(comb, "kmeans")
    assert cost > refc + penalty
    assert cost <= 2 * refc + 2 * penalty
