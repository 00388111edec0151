import csv
import math

import numpy as np
import pytest
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from app.errors import DisconnectedGraphError, MissingBaselineError, NonpositiveWeightError, ParseError
from app.median.experiment import exact_baselines, run_experiment, write_ratios_csv
from app.median.graph import graph_from_edges, graph_hash, grid_road_graph, is_connected, load_graph, write_graph
from app.median.incremental import build_incremental, facility_order, project_bids, universe_costs
from app.median.kmedoids import assignment_cost, kmedoids, medoid_ladder
from app.median.shortest_paths import shortest_path_matrix
from app.models.graphs import MedoidSolution


def _path(n):
    return graph_from_edges([(i, i + 1, 1.0) for i in range(n - 1)])


def test_path_distances():
    dist = shortest_path_matrix(_path(3))
    assert dist[0, 2] == 2.0
    assert np.array_equal(dist, dist.T)
    assert np.all(np.diag(dist) == 0)


def test_triangle_takes_the_short_way_round():
    g = graph_from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)])
    assert shortest_path_matrix(g)[0, 2] == 2.0


def test_duplicate_arcs_merge_to_minimum_and_ids_are_relabelled():
    g = graph_from_edges([(10, 20, 3.0), (20, 10, 2.0), (20, 30, 1.0), (30, 30, 4.0)])
    assert g.vertex_count == 3
    assert g.labels == [10, 20, 30]
    assert g.edges == [(0, 1, 2.0), (1, 2, 1.0)]


def test_bad_graphs():
    with pytest.raises(DisconnectedGraphError) as exc:
        graph_from_edges([(0, 1, 1.0), (2, 3, 1.0)])
    assert exc.value.code == "DISCONNECTED"
    with pytest.raises(NonpositiveWeightError) as exc:
        graph_from_edges([(0, 1, 0.0)])
    assert exc.value.code == "NONPOSITIVE_WEIGHT"


def test_graph_file_round_trip(tmp_path):
    g = grid_road_graph(3, 4, seed=2)
    path = write_graph(g, tmp_path / "g.csv")
    loaded = load_graph(path)
    assert loaded.vertex_count == 12
    assert graph_hash(loaded) == graph_hash(g)


def test_graph_file_with_wrong_header(tmp_path):
    path = tmp_path / "g.csv"
    path.write_text("from,to,w\n0,1,1.0\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_graph(path)
    short = tmp_path / "short.csv"
    short.write_text("u,v,weight\n0,1\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_graph(short)


def test_synthetic_graph_is_connected_and_seeded():
    g = grid_road_graph(6, 7, seed=11)
    assert g.vertex_count == 42
    assert is_connected(g)
    assert grid_road_graph(6, 7, seed=11) == g


def test_dijkstra_matches_bellman_ford():
    g = grid_road_graph(10, 10, seed=4)
    u = [e[0] for e in g.edges]
    v = [e[1] for e in g.edges]
    w = [e[2] for e in g.edges]
    n = g.vertex_count
    matrix = sparse.coo_matrix((w + w, (u + v, v + u)), shape=(n, n)).tocsr()
    expected = shortest_path(matrix, method="BF", directed=True)
    assert np.allclose(shortest_path_matrix(g, threads=2), expected, rtol=1e-12)


def test_kmedoids_extremes():
    dist = shortest_path_matrix(_path(5))
    assert kmedoids(dist, 5, seed=0).cost == 0.0
    one = kmedoids(dist, 1, seed=0)
    assert one.facilities == [2]
    assert one.cost == 6.0
    with pytest.raises(ValueError):
        kmedoids(dist, 0, seed=0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_kmedoids_is_close_to_exhaustive_optimum(k):
    good = 0
    for seed in range(100):
        dist = shortest_path_matrix(grid_road_graph(2, 5, seed=seed))
        optimum = exact_baselines(dist)[k].cost
        solution = kmedoids(dist, k, seed=seed)
        assert solution.cost >= optimum - 1e-9
        if solution.cost <= 1.2 * optimum:
            good += 1
    assert good >= 95


def test_swap_history_never_increases():
    dist = shortest_path_matrix(grid_road_graph(5, 5, seed=3))
    history = []
    kmedoids(dist, 4, seed=1, init=[0, 1, 2, 3], history=history)
    assert len(history) >= 2
    assert all(after <= before for before, after in zip(history, history[1:]))


def test_ladder_covers_every_k():
    dist = shortest_path_matrix(grid_road_graph(3, 3, seed=5))
    ladder = medoid_ladder(dist, seed=0)
    assert sorted(ladder) == list(range(1, 10))
    assert all(len(sol.facilities) == k for k, sol in ladder.items())
    assert ladder[9].cost == 0.0


def test_project_bids():
    costs = [4.0, 2.0, 1.0, 0.0]
    assert project_bids([0.5, 1.5, 3.0, 5.0], costs) == [1, 2, 3, 4]
    assert project_bids([0.5, 5.0], costs) == [1, 4]
    assert project_bids([4.0], [4.0, 4.0, 1.0, 0.0]) == [1, 4]


def test_missing_baseline():
    with pytest.raises(MissingBaselineError):
        universe_costs({1: MedoidSolution(k=1, facilities=[0], cost=3.0)}, 4)


def test_only_the_full_set_is_built_when_k_is_n():
    dist = shortest_path_matrix(_path(4))
    solution = build_incremental(dist, [4], exact_baselines(dist))
    assert solution.index_set == [4]
    assert solution.ratios[4] == 1.0
    assert all(math.isinf(solution.ratios[k]) for k in (1, 2, 3))


def test_colinear_points():
    dist = shortest_path_matrix(_path(4))
    baselines = exact_baselines(dist)
    assert [baselines[k].cost for k in (1, 2, 3, 4)] == [4.0, 2.0, 1.0, 0.0]
    solution = build_incremental(dist, [1, 4], baselines)
    assert solution.prefix_sets[1] == frozenset({1})
    assert solution.ratios == {1: 1.0, 2: 2.0, 3: 4.0, 4: 1.0}

    nested = build_incremental(dist, [1, 2, 4], baselines)
    assert nested.prefix_sets[2] == frozenset({0, 2})
    # tie between 0 and 2 goes to the smaller id
    assert nested.prefix_sets[1] == frozenset({0})
    assert nested.ratios[1] == pytest.approx(6.0 / 4.0)


def test_sets_are_nested_and_small_enough():
    dist = shortest_path_matrix(grid_road_graph(3, 4, seed=8))
    baselines = exact_baselines(dist)
    solution = build_incremental(dist, [1, 3, 5, 9], baselines)
    ks = solution.index_set
    for small, large in zip(ks, ks[1:]):
        assert solution.prefix_sets[small] <= solution.prefix_sets[large]
    assert all(len(solution.prefix_sets[k]) <= k for k in ks)
    assert all(ratio >= 1.0 - 1e-12 for ratio in solution.ratios.values())
    assert solution.facilities(4) == solution.prefix_sets[3]
    assert solution.holder(0) is None


def test_greedy_fill_has_exact_sizes():
    dist = shortest_path_matrix(grid_road_graph(3, 4, seed=8))
    solution = build_incremental(dist, [2, 6], exact_baselines(dist), greedy_fill=True)
    assert solution.index_set == list(range(1, 13))
    assert all(len(solution.prefix_sets[k]) == k for k in solution.index_set)
    assert solution.prefix_sets[2] <= solution.prefix_sets[3]
    assert sorted(solution.order) == list(range(12))
    assert assignment_cost(dist, solution.prefix_sets[12]) == 0.0


def test_facility_order_is_deterministic():
    dist = shortest_path_matrix(grid_road_graph(3, 4, seed=8))
    baselines = exact_baselines(dist)
    first = build_incremental(dist, [1, 4], baselines)
    second = build_incremental(dist, [1, 4], baselines)
    assert first.order == second.order
    assert sorted(first.order) == list(range(12))
    assert facility_order(first, dist)[0] in first.prefix_sets[1]


def test_experiment_ratios_are_at_least_one(tmp_path):
    g = grid_road_graph(2, 3, seed=1)
    dist = shortest_path_matrix(g)
    rows = run_experiment(
        g, 4.0, 2, ["D", "A"], trials=10, seed=1, dist=dist, baselines=exact_baselines(dist), threads=2
    )
    assert len(rows) == 12
    assert [row.k for row in rows[:6]] == list(range(1, 7))
    assert all(row.mean_ratio >= 1.0 - 1e-12 for row in rows)
    assert rows[5].mean_ratio == 1.0
    path = write_ratios_csv(rows, tmp_path / "ratios.csv")
    with path.open(encoding="utf-8") as fh:
        lines = list(csv.reader(fh))
    assert lines[0] == ["algorithm", "k", "mean_ratio", "stderr"]
    assert len(lines) == 13


def test_experiment_rejects_prediction_at_n():
    g = _path(4)
    with pytest.raises(ValueError):
        run_experiment(g, 4.0, 4, ["D"], trials=2, seed=0)
