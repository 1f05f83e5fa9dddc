import math
import threading

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asdim.generators import gen_cycle, gen_path, oracle_r_components
from asdim.graph import (
    DistanceOracle,
    GraphInputError,
    RealProjection,
    WeightedGraph,
    induced_subgraph,
    r_components,
    rooted_projection,
    rs_components,
    shortest_paths,
    subdivide_edge,
    weak_diameter,
)

from .strategies import small_graphs


def as_lists(parts):
    return [p.tolist() for p in parts]


class TestWeightedGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphInputError):
            WeightedGraph(2, ((0, 0, 1.0),))

    @pytest.mark.parametrize("w", [0.0, -1.0, math.nan])
    def test_rejects_bad_weight(self, w):
        with pytest.raises(GraphInputError):
            WeightedGraph(2, ((0, 1, w),))

    def test_rejects_unknown_vertex(self):
        with pytest.raises(GraphInputError):
            WeightedGraph(2, ((0, 2, 1.0),))

    def test_parallel_edges_use_lightest(self):
        g = WeightedGraph(2, ((0, 1, 3.0), (0, 1, 1.5)))
        assert g.simple_edges() == {(0, 1): 1.5}
        assert shortest_paths(g, 0)[1] == 1.5

    def test_components_ordered_by_smallest_id(self):
        g = WeightedGraph.from_edges(5, [(3, 4), (0, 2)])
        assert as_lists(g.components()) == [[0, 2], [1], [3, 4]]


class TestShortestPaths:
    def test_single_vertex(self):
        assert shortest_paths(WeightedGraph(1, ()), 0).tolist() == [0.0]

    def test_unit_path(self):
        assert shortest_paths(gen_path(3), 0).tolist() == [0.0, 1.0, 2.0]

    def test_triangle_takes_two_hops(self):
        g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)))
        assert shortest_paths(g, 0)[2] == 2.0

    def test_other_component_is_infinite(self):
        g = WeightedGraph.from_edges(3, [(0, 1)])
        assert math.isinf(shortest_paths(g, 0)[2])

    def test_invalid_source(self):
        with pytest.raises(GraphInputError):
            shortest_paths(gen_path(3), 3)


class TestRootedProjection:
    def test_single_vertex(self):
        assert rooted_projection(WeightedGraph(1, ()), 0).values.tolist() == [0.0]

    def test_path_from_end(self):
        assert rooted_projection(gen_path(4), 0).values.tolist() == [0, 1, 2, 3]

    def test_cycle(self):
        assert rooted_projection(gen_cycle(6), 0).values.tolist() == [0, 1, 2, 3, 2, 1]

    def test_unreachable_modes(self):
        g = WeightedGraph.from_edges(3, [(0, 1)])
        with pytest.raises(GraphInputError):
            rooted_projection(g, 0)
        f = rooted_projection(g, 0, unreachable="component")
        assert f.values[:2].tolist() == [0, 1] and math.isinf(f.values[2])

    @given(small_graphs(connected=True))
    def test_is_lipschitz(self, g):
        assert rooted_projection(g, 0).is_lipschitz(g)

    def test_lipschitz_violation_detected(self):
        f = RealProjection(np.array([0.0, 2.0]))
        assert f.lipschitz_violations(gen_path(2)) == [(0, 1)]


class TestRComponents:
    def test_empty(self):
        assert r_components(DistanceOracle(gen_path(5)), [], 1) == []

    def test_gaps_of_two(self):
        o = DistanceOracle(gen_path(5))
        assert as_lists(r_components(o, [0, 2, 4], 1)) == [[0], [2], [4]]
        assert as_lists(r_components(o, [0, 2, 4], 2)) == [[0, 2, 4]]

    def test_nonpositive_r(self):
        with pytest.raises(GraphInputError):
            r_components(DistanceOracle(gen_path(2)), [0], 0)

    @given(small_graphs(max_n=10), st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.5]), st.data())
    def test_matches_threshold_bfs(self, g, r, data):
        s = data.draw(st.lists(st.integers(0, g.vertex_count - 1), unique=True))
        got = as_lists(r_components(DistanceOracle(g), s, r))
        assert got == oracle_r_components(g, s, r)


class TestRSComponents:
    def test_infinite_sp_collapses(self):
        g = gen_path(5)
        o = DistanceOracle(g)
        f = rooted_projection(g, 0)
        assert as_lists(rs_components(o, f, [0, 2, 4], 2, math.inf)) == as_lists(r_components(o, [0, 2, 4], 2))

    def test_projection_gap_within_sp(self):
        g = gen_path(5)
        assert as_lists(rs_components(DistanceOracle(g), rooted_projection(g, 0), [1, 3], 4, 3)) == [[1, 3]]

    def test_projection_splits_a_component(self):
        # two vertices 4 apart that are also 4 apart in the projection: one 4-component, two (4,3)-components
        g = gen_path(9)
        o = DistanceOracle(g)
        f = rooted_projection(g, 0)
        assert len(r_components(o, [0, 4], 4)) == 1
        assert as_lists(rs_components(o, f, [0, 4], 4, 3)) == [[0], [4]]

    def test_undefined_projection(self):
        g = WeightedGraph.from_edges(3, [(0, 1)])
        f = rooted_projection(g, 0, unreachable="component")
        with pytest.raises(GraphInputError):
            rs_components(DistanceOracle(g), f, [0, 2], 1, 1)

    @given(small_graphs(connected=True), st.sampled_from([0.5, 1.0, 2.0]), st.data())
    def test_large_sp_equals_r_components(self, g, r, data):
        s = data.draw(st.lists(st.integers(0, g.vertex_count - 1), unique=True))
        o = DistanceOracle(g)
        f = rooted_projection(g, 0)
        assert as_lists(rs_components(o, f, s, r, r)) == as_lists(r_components(o, s, r))


class TestWeakDiameter:
    def test_singleton(self):
        assert weak_diameter(DistanceOracle(gen_path(3)), [1]) == 0

    def test_path_ends(self):
        assert weak_diameter(DistanceOracle(gen_path(5)), [0, 4]) == 4

    def test_cycle_triple(self):
        assert weak_diameter(DistanceOracle(gen_cycle(6)), [0, 2, 3]) == 3

    def test_spanning_components_is_infinite(self):
        g = WeightedGraph.from_edges(2, [])
        assert math.isinf(weak_diameter(DistanceOracle(g), [0, 1]))

    def test_empty(self):
        with pytest.raises(GraphInputError):
            weak_diameter(DistanceOracle(gen_path(2)), [])


class TestInducedSubgraph:
    def test_all_vertices(self):
        g = gen_cycle(5)
        h, mapping = induced_subgraph(g, range(5))
        assert mapping.tolist() == list(range(5)) and h.simple_edges() == g.simple_edges()

    def test_cycle_minus_vertex(self):
        g = gen_cycle(6)
        h, mapping = induced_subgraph(g, [1, 2, 3, 4, 5])
        local = {int(v): i for i, v in enumerate(mapping)}
        assert shortest_paths(h, local[1])[local[5]] == 4
        assert shortest_paths(g, 1)[5] == 2

    def test_empty(self):
        h, mapping = induced_subgraph(gen_path(3), [])
        assert h.vertex_count == 0 and len(mapping) == 0

    @given(small_graphs(), st.data())
    def test_never_shortens(self, g, data):
        s = data.draw(st.lists(st.integers(0, g.vertex_count - 1), unique=True, min_size=1))
        h, mapping = induced_subgraph(g, s)
        dg = DistanceOracle(g).all_pairs()
        dh = DistanceOracle(h).all_pairs()
        assert np.all(dh + 1e-9 >= dg[np.ix_(mapping, mapping)])


class TestSubdivideEdge:
    def test_identity_split(self):
        g = gen_path(3)
        assert subdivide_edge(g, (0, 1), [1.0]) is g

    def test_halves(self):
        g = WeightedGraph(2, ((0, 1, 2.0),))
        h = subdivide_edge(g, (0, 1), [0.5, 0.5])
        assert sorted(h.edges) == [(0, 2, 1.0), (2, 1, 1.0)]
        assert shortest_paths(h, 0)[1] == 2.0

    def test_path_every_edge(self):
        g = gen_path(3)
        h = subdivide_edge(subdivide_edge(g, (0, 1), [0.5, 0.5]), (1, 2), [0.5, 0.5])
        assert h.vertex_count == 5 and all(w == 0.5 for _, _, w in h.edges)
        assert shortest_paths(h, 0)[2] == 2.0

    @pytest.mark.parametrize("split", [[0.0, 1.0], [-0.5, 1.5], [0.3, 0.3]])
    def test_rejects_bad_split(self, split):
        with pytest.raises(GraphInputError):
            subdivide_edge(gen_path(2), (0, 1), split)

    @given(small_graphs(min_n=2), st.data())
    def test_preserves_distances(self, g, data):
        if not g.edges:
            return
        u, v, _ = data.draw(st.sampled_from(g.edges))
        split = data.draw(st.sampled_from([[0.5, 0.5], [0.25, 0.75], [0.2, 0.3, 0.5]]))
        h = subdivide_edge(g, (u, v), split)
        n = g.vertex_count
        before = DistanceOracle(g).all_pairs()
        after = DistanceOracle(h).all_pairs()[:n, :n]
        assert np.array_equal(np.isinf(before), np.isinf(after))
        finite = np.isfinite(before)
        assert np.allclose(before[finite], after[finite])


class TestDistanceOracle:
    def test_matches_networkx(self):
        rng = np.random.default_rng(3)
        g = WeightedGraph(30, tuple((int(a), int(b), float(w)) for a, b, w in zip(
            rng.integers(0, 30, 80), rng.integers(0, 30, 80), rng.uniform(0.5, 3, 80)) if a != b))
        ref = nx.Graph()
        ref.add_nodes_from(range(30))
        for (u, v), w in g.simple_edges().items():
            ref.add_edge(u, v, weight=w)
        want = dict(nx.all_pairs_dijkstra_path_length(ref))
        got = DistanceOracle(g).all_pairs()
        for u in range(30):
            for v in range(30):
                assert got[u, v] == pytest.approx(want[u].get(v, math.inf))

    def test_rows_without_all_pairs(self):
        g = gen_path(20)
        o = DistanceOracle(g, all_pairs_cap=5)
        assert o.rows(np.array([0, 19]))[1, 0] == 19

    def test_concurrent_reads_agree(self):
        g = gen_cycle(200)
        o = DistanceOracle(g, all_pairs_cap=0)
        out = {}

        def read(i):
            out[i] = o.row(i % 7).copy()

        threads = [threading.Thread(target=read, args=(i,)) for i in range(28)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for i, row in out.items():
            assert np.array_equal(row, shortest_paths(g, i % 7))

    @given(small_graphs())
    def test_metric_axioms(self, g):
        d = DistanceOracle(g).all_pairs()
        assert np.array_equal(d, d.T)
        assert np.all(np.diag(d) == 0)
        via = np.min(d[:, :, None] + d[None, :, :], axis=1)
        assert np.all(d <= via + 1e-9)
