import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asdim import cli, formats
from asdim.covers import Certificate, Cover
from asdim.generators import gen_interval_graph, gen_separated_points
from asdim.geometric import SEPARATION, UNIT_BALL, Embedding
from asdim.graph import GraphInputError, WeightedGraph

from .strategies import small_graphs


class TestGraphFormat:
    @given(small_graphs(max_n=12))
    def test_text_roundtrip(self, g):
        assert formats.graph_from_text(formats.graph_to_text(g)) == g

    @given(small_graphs(max_n=12))
    def test_json_roundtrip(self, g):
        assert formats.graph_from_text(formats.graph_to_json(g)) == g

    def test_default_weight_and_comments(self):
        g = formats.graph_from_text("# triangle\n3 2\n0 1\n1 2 0.5\n")
        assert g.edges == ((0, 1, 1.0), (1, 2, 0.5))

    def test_edge_count_mismatch(self):
        with pytest.raises(GraphInputError, match="announces"):
            formats.graph_from_text("3 2\n0 1\n")

    def test_missing_header(self):
        with pytest.raises(GraphInputError, match="header"):
            formats.graph_from_text("0 1 1\n")

    def test_json_file(self, tmp_path):
        g = WeightedGraph.from_edges(3, [(0, 1), (1, 2)])
        formats.write_graph(g, tmp_path / "g.json")
        assert (tmp_path / "g.json").read_text().startswith("{")
        assert formats.read_graph(tmp_path / "g.json") == g


class TestAuxFormats:
    def test_pd_roundtrip(self, tmp_path):
        _, pd = gen_interval_graph(1, 40, 2)
        formats.write_pd(pd, tmp_path / "x.pd")
        assert [set(b) for b in formats.read_pd(tmp_path / "x.pd").bags] == [set(b) for b in pd.bags]

    @pytest.mark.parametrize("mode, C", [(SEPARATION, 2.0), (UNIT_BALL, 1.0)])
    def test_points_roundtrip(self, tmp_path, mode, C):
        _, pts = gen_separated_points(2, 30, 6.0, d=3, C=C)
        formats.write_points(Embedding(3, C, pts, mode), tmp_path / "x.pts")
        back = formats.read_points(tmp_path / "x.pts")
        assert (back.d, back.C, back.mode) == (3, C, mode)
        assert np.array_equal(back.points, pts)

    def test_points_wrong_width(self):
        with pytest.raises(GraphInputError, match="coordinates"):
            formats.points_from_text("2 1 separation\n0 0\n1\n")

    def test_cover_roundtrip(self, tmp_path):
        cover = Cover([np.array([0, 2]), np.array([1])], Certificate(1.0, 2.0, 1, 2, "demo", {"a": 1}), 3)
        formats.write_cover(cover, tmp_path / "c.json", {"note": "x"})
        back = formats.read_cover(tmp_path / "c.json")
        assert [s.tolist() for s in back.sets] == [[0, 2], [1]]
        assert back.certificate.scheme_name == "demo" and back.certificate.parameters == {"a": 1}
        assert json.loads((tmp_path / "c.json").read_text())["note"] == "x"


def run(*argv):
    return cli.main([str(a) for a in argv])


class TestGen:
    def test_grid(self, tmp_path, capsys):
        assert run("gen", "grid", 8, 8, "--out", tmp_path / "grid8.g") == 0
        g = formats.read_graph(tmp_path / "grid8.g")
        assert g.vertex_count == 64
        assert formats.read_points(tmp_path / "grid8.pts").points.shape == (64, 2)

    def test_interval(self, tmp_path):
        assert run("gen", "interval", "--n", 200, "--k", 3, "--seed", 7, "--out", tmp_path / "iv.g") == 0
        from asdim.pathwidth import decomposition_violations
        g = formats.read_graph(tmp_path / "iv.g")
        assert decomposition_violations(formats.read_pd(tmp_path / "iv.pd").bags, g) == []

    def test_stretch(self, tmp_path):
        assert run("gen", "stretch", "--base", "grid4x4", "--k", 8, "--p", 2, "--out", tmp_path / "s.g") == 0
        assert formats.read_graph(tmp_path / "s.g").is_unit_weight()

    def test_missing_argument(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run("gen", "tree", "--out", tmp_path / "t.g")
        assert exc.value.code == 2

    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            run("gen", "points", "--n", 80, "--seed", 3, "--out", tmp_path / f"{name}.g")
        assert (tmp_path / "a.g").read_bytes() == (tmp_path / "b.g").read_bytes()
        assert (tmp_path / "a.pts").read_bytes() == (tmp_path / "b.pts").read_bytes()


@pytest.fixture
def grid8(tmp_path):
    run("gen", "grid", 8, 8, "--out", tmp_path / "grid8.g")
    return tmp_path


class TestCover:
    def test_planar_sweep(self, grid8):
        code = run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", "1,2,4", "--out-dir", grid8, "--verify")
        assert code == 0
        assert sorted(p.name for p in grid8.glob("*.json")) == [f"grid8.planar.r{r}.json" for r in (1, 2, 4)]

    def test_pathwidth(self, tmp_path):
        run("gen", "interval", "--n", 100, "--k", 2, "--out", tmp_path / "g.g")
        code = run("cover", tmp_path / "g.g", tmp_path / "g.pd", "--scheme", "pathwidth", "--r", 1, "--out-dir", tmp_path, "--strict")
        assert code == 0
        cover = formats.read_cover(tmp_path / "g.pathwidth.r1.json")
        assert cover.coverage_counts().tolist() == [1] * 100

    def test_banana_modulus_three(self, tmp_path):
        run("gen", "tree", "--n", 60, "--seed", 1, "--out", tmp_path / "tree.g")
        code = run("cover", tmp_path / "tree.g", "--scheme", "banana", "--m", 3, "--q", 2, "--p", 3, "--r", 1,
                   "--out-dir", tmp_path, "--verify")
        assert code == 0
        cover = formats.read_cover(tmp_path / "tree.banana.r1.json")
        assert len(cover.sets) == 3 and cover.coverage_counts().min() == 2

    def test_geometric_needs_points(self, grid8):
        code = run("cover", grid8 / "grid8.g", grid8 / "grid8.pts", "--scheme", "geometric", "--r", 1, "--out-dir", grid8, "--verify")
        assert code == 0
        with pytest.raises(SystemExit) as exc:
            run("cover", grid8 / "grid8.g", "--scheme", "geometric", "--r", 1)
        assert exc.value.code == 2

    def test_mode_mismatch(self, grid8):
        with pytest.raises(SystemExit) as exc:
            run("cover", grid8 / "grid8.g", grid8 / "grid8.pts", "--scheme", "unit-ball", "--r", 1, "--out-dir", grid8)
        assert exc.value.code == 2

    @pytest.mark.parametrize("extra", [["--scheme", "planar", "--q", "2"], ["--scheme", "k3p"], ["--scheme", "genus"]])
    def test_parameter_mismatch(self, grid8, extra):
        with pytest.raises(SystemExit) as exc:
            run("cover", grid8 / "grid8.g", "--r", 1, *extra)
        assert exc.value.code == 2

    def test_bad_r(self, grid8):
        with pytest.raises(SystemExit) as exc:
            run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", "0,1")
        assert exc.value.code == 2

    def test_missing_file(self, tmp_path):
        assert run("cover", tmp_path / "nope.g", "--scheme", "planar", "--r", 1) == 2

    def test_deterministic(self, grid8):
        a, b = grid8 / "a", grid8 / "b"
        for out in (a, b):
            run("cover", grid8 / "grid8.g", "--scheme", "chordal", "--r", "1,2", "--out-dir", out, "--verify")
        for name in ("grid8.chordal.r1.json", "grid8.chordal.r2.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_strict_skips_failing_covers(self, grid8, monkeypatch):
        from asdim import pipelines

        def lying(g, r, heavy=False):
            cover = pipelines.planar_cover(g, r, heavy)
            cover.certificate.claimed_bound = 0.0
            return cover

        monkeypatch.setattr(cli, "planar_cover", lying)
        code = run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", "1,2", "--out-dir", grid8 / "s", "--strict")
        assert code == 1
        assert not list((grid8 / "s").glob("*.json"))
        code = run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", 1, "--out-dir", grid8 / "v", "--verify")
        assert code == 1 and len(list((grid8 / "v").glob("*.json"))) == 1

    def test_csv(self, grid8):
        csv = grid8 / "sweep.csv"
        run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", "1,2,4", "--out-dir", grid8, "--csv", csv)
        header, *rows = csv.read_text().strip().split("\n")
        assert header == "scheme,r,n,m,sets,min_coverage,max_component_diameter,bound,multiplicity"
        assert len(rows) == 3 and all(row.split(",")[2:5] == ["64", "112", "3"] for row in rows)


class TestVerify:
    def test_pass_and_tamper(self, grid8, capsys):
        run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", 1, "--out-dir", grid8)
        path = grid8 / "grid8.planar.r1.json"
        capsys.readouterr()
        assert run("verify", grid8 / "grid8.g", path) == 0
        assert json.loads(capsys.readouterr().out)["passed"] is True
        doc = json.loads(path.read_text())
        for s in doc["sets"]:
            if 5 in s:
                s.remove(5)
        path.write_text(json.dumps(doc))
        assert run("verify", grid8 / "grid8.g", path) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["checks"]["coverage"] is False and report["uncovered"] == [5]

    def test_size_mismatch(self, grid8, tmp_path):
        run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", 1, "--out-dir", grid8)
        run("gen", "path", 5, "--out", tmp_path / "p.g")
        assert run("verify", tmp_path / "p.g", grid8 / "grid8.planar.r1.json") == 2

    def test_sweep_table(self, grid8):
        run("cover", grid8 / "grid8.g", "--scheme", "planar", "--r", "1,2", "--out-dir", grid8)
        files = sorted(grid8.glob("*.json"))
        assert run("verify", grid8 / "grid8.g", *files, "--csv", grid8 / "t.csv") == 0
        assert len((grid8 / "t.csv").read_text().strip().split("\n")) == 3
