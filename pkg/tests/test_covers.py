import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asdim.covers import (
    Certificate,
    Cover,
    cover_to_partition,
    r_multiplicity,
    sweep_csv,
    sweep_row,
    verify_cover,
    weak_diameter_coloring,
)
from asdim.generators import gen_grid, gen_path
from asdim.graph import DistanceOracle, GraphInputError
from asdim.pipelines import planar_cover
from asdim.stitching import line_cover

from .strategies import small_graphs


def parity_cover(n=10, **claims):
    cert = Certificate(1.0, claims.pop("bound", 0.0), **claims)
    return Cover([np.arange(0, n, 2), np.arange(1, n, 2)], cert, n)


class TestVerifyCover:
    def test_whole_graph_single_set(self):
        g = gen_path(6)
        cover = Cover([np.arange(6)], Certificate(1.0, 5.0), 6)
        rep = verify_cover(cover, DistanceOracle(g))
        assert rep.passed and rep.max_component_diameter == 5

    def test_parity_sets_are_singletons(self):
        rep = verify_cover(parity_cover(), DistanceOracle(gen_path(10)))
        assert rep.passed
        assert rep.component_diameters == [0.0, 0.0]

    def test_claimed_coverage_two_fails(self):
        rep = verify_cover(parity_cover(claimed_coverage=2), DistanceOracle(gen_path(10)))
        assert not rep.passed and not rep.checks["coverage"]
        assert rep.min_coverage == 1

    def test_uncovered_vertex_reported(self):
        cover = Cover([np.arange(5)], Certificate(1.0, 10.0), 6)
        rep = verify_cover(cover, DistanceOracle(gen_path(6)))
        assert rep.uncovered == [5] and not rep.checks["coverage"]

    def test_bound_too_small_fails(self):
        cover = Cover([np.arange(6)], Certificate(1.0, 4.0), 6)
        assert not verify_cover(cover, DistanceOracle(gen_path(6))).checks["component_bound"]

    def test_multiplicity_claim(self):
        rep = verify_cover(parity_cover(claimed_multiplicity=1), DistanceOracle(gen_path(10)))
        assert rep.max_multiplicity == 2 and not rep.checks["multiplicity"]

    def test_size_mismatch(self):
        with pytest.raises(GraphInputError):
            verify_cover(parity_cover(), DistanceOracle(gen_path(9)))

    def test_roundtrip_json(self):
        cover = parity_cover(claimed_multiplicity=2)
        cover.certificate.parameters["k0"] = np.int64(3)
        back = Cover.from_dict(json.loads(cover.to_json()))
        assert [s.tolist() for s in back.sets] == [s.tolist() for s in cover.sets]
        assert back.certificate.claimed_multiplicity == 2
        assert back.certificate.parameters["k0"] == 3


class TestPartition:
    def test_disjoint_cover_unchanged(self):
        cover = parity_cover()
        part = cover_to_partition(cover)
        assert [s.tolist() for s in part.sets] == [s.tolist() for s in cover.sets]

    def test_identical_sets(self):
        s = np.arange(4)
        part = cover_to_partition(Cover([s, s], Certificate(1.0, 3.0, 2), 4))
        assert [x.tolist() for x in part.sets] == [[0, 1, 2, 3], []]
        assert part.certificate.claimed_coverage == 1

    def test_line_cover_residues_on_path(self):
        g = gen_path(6)
        lines = line_cover(3, 1.0)
        x = np.arange(6, dtype=float)
        sets = [np.flatnonzero(lines.contains(i, x)) for i in range(3)]
        cover = Cover(sets, Certificate(1.0, 5.0, 2), 6)
        assert verify_cover(cover, DistanceOracle(g)).min_coverage == 2
        part = cover_to_partition(cover)
        assert part.coverage_counts().tolist() == [1] * 6
        assert verify_cover(part, DistanceOracle(g)).passed

    def test_uncovered_raises(self):
        with pytest.raises(GraphInputError):
            cover_to_partition(Cover([np.arange(3)], Certificate(1.0, 1.0), 4))

    @given(small_graphs(max_n=8), st.data())
    def test_partition_never_worse(self, g, data):
        n = g.vertex_count
        k = data.draw(st.integers(1, 3))
        member = data.draw(st.lists(st.lists(st.booleans(), min_size=k, max_size=k), min_size=n, max_size=n))
        for row in member:
            row[0] = row[0] or not any(row)
        sets = [np.array([v for v in range(n) if member[v][j]], dtype=np.int64) for j in range(k)]
        cover = Cover(sets, Certificate(1.0, 1e9), n)
        o = DistanceOracle(g)
        full = verify_cover(cover, o)
        part = verify_cover(cover_to_partition(cover), o)
        for a, b in zip(part.component_diameters, full.component_diameters):
            assert a <= b
        assert len(cover.sets) - full.min_coverage + 1 >= 1


class TestMultiplicity:
    def test_far_apart_sets(self):
        g = gen_path(10)
        cover = Cover([np.array([0, 1]), np.array([5, 6])], Certificate(1.0, 1.0), 10)
        assert r_multiplicity(cover, DistanceOracle(g), 1) == 1

    def test_parity_on_path(self):
        assert r_multiplicity(parity_cover(), DistanceOracle(gen_path(10)), 1) == 2

    def test_nonpositive_r(self):
        with pytest.raises(GraphInputError):
            r_multiplicity(parity_cover(), DistanceOracle(gen_path(10)), 0)

    @given(small_graphs(max_n=8), st.sampled_from([0.5, 1.0, 2.0]), st.data())
    def test_matches_brute_force(self, g, r, data):
        n = g.vertex_count
        labels = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
        sets = [np.array([v for v in range(n) if labels[v] == j], dtype=np.int64) for j in range(3)]
        cover = Cover(sets, Certificate(r, 1.0), n)
        d = DistanceOracle(g).all_pairs()
        want = max(len({labels[u] for u in range(n) if d[v, u] <= r + 1e-9}) for v in range(n))
        assert r_multiplicity(cover, DistanceOracle(g), r) == want


class TestColoring:
    def test_single_set(self):
        g = gen_path(7)
        colors, worst = weak_diameter_coloring(Cover([np.arange(7)], Certificate(1.0, 6.0), 7), g, DistanceOracle(g))
        assert set(colors.tolist()) == {0} and worst == 6

    def test_parity(self):
        g = gen_path(10)
        colors, worst = weak_diameter_coloring(parity_cover(), g, DistanceOracle(g))
        assert colors.tolist() == [0, 1] * 5 and worst == 0

    def test_grid_pipeline_cover(self):
        g, _ = gen_grid([8, 8])
        o = DistanceOracle(g)
        cover = planar_cover(g, 1)
        colors, worst = weak_diameter_coloring(cover, g, o)
        assert set(colors.tolist()) <= {0, 1, 2}
        assert worst <= cover.certificate.claimed_bound


def test_sweep_csv_shape():
    g = gen_path(10)
    cover = parity_cover()
    row = sweep_row(cover, verify_cover(cover, DistanceOracle(g)), g.edge_count)
    text = sweep_csv([row])
    header, line = text.strip().split("\n")
    assert header == "scheme,r,n,m,sets,min_coverage,max_component_diameter,bound,multiplicity"
    assert line.split(",")[2:6] == ["10", "9", "2", "1"]
