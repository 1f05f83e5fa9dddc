"""Text and JSON file formats for graphs, path decompositions, point sets and covers."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .covers import Cover
from .geometric import Embedding
from .graph import GraphInputError, WeightedGraph
from .pathwidth import PathDecomposition


def _number(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def graph_to_text(g: WeightedGraph) -> str:
    lines = [f"{g.vertex_count} {g.edge_count}"]
    lines += [f"{u} {v} {_number(w)}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_json(g: WeightedGraph) -> str:
    doc = {"n": g.vertex_count, "edges": [[u, v, float(w)] for u, v, w in g.edges]}
    return json.dumps(doc, sort_keys=True)


def graph_from_text(text: str) -> WeightedGraph:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        edges = [(int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0) for e in doc["edges"]]
        return WeightedGraph(int(doc["n"]), tuple(edges))
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise GraphInputError("graph file must start with a 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise GraphInputError(f"header announces {m} edges but the file has {len(body)}")
    edges = []
    for i, row in enumerate(body, start=2):
        if len(row) not in (2, 3):
            raise GraphInputError(f"line {i}: expected 'u v [w]'")
        edges.append((int(row[0]), int(row[1]), float(row[2]) if len(row) == 3 else 1.0))
    return WeightedGraph(n, tuple(edges))


def read_graph(path: str | Path) -> WeightedGraph:
    return graph_from_text(Path(path).read_text())


def write_graph(g: WeightedGraph, path: str | Path) -> None:
    text = graph_to_json(g) + "\n" if str(path).endswith(".json") else graph_to_text(g)
    Path(path).write_text(text)


def pd_to_text(pd: PathDecomposition) -> str:
    return "".join(" ".join(str(v) for v in sorted(bag)) + "\n" for bag in pd.bags)


def pd_from_text(text: str) -> PathDecomposition:
    bags = [frozenset(int(t) for t in ln.split()) for ln in text.splitlines() if ln.strip()]
    return PathDecomposition(bags)


def read_pd(path: str | Path) -> PathDecomposition:
    return pd_from_text(Path(path).read_text())


def write_pd(pd: PathDecomposition, path: str | Path) -> None:
    Path(path).write_text(pd_to_text(pd))


def points_to_text(emb: Embedding) -> str:
    lines = [f"{emb.d} {_number(emb.C)} {emb.mode}"]
    lines += [" ".join(repr(float(x)) for x in row) for row in emb.points]
    return "\n".join(lines) + "\n"


def points_from_text(text: str) -> Embedding:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 3:
        raise GraphInputError("point file must start with a 'd C mode' header")
    d, C, mode = int(rows[0][0]), float(rows[0][1]), rows[0][2]
    body = rows[1:]
    for i, row in enumerate(body, start=2):
        if len(row) != d:
            raise GraphInputError(f"line {i}: expected {d} coordinates")
    pts = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(-1, d)
    return Embedding(d, C, pts, mode)


def read_points(path: str | Path) -> Embedding:
    return points_from_text(Path(path).read_text())


def write_points(emb: Embedding, path: str | Path) -> None:
    Path(path).write_text(points_to_text(emb))


def read_cover(path: str | Path) -> Cover:
    return Cover.from_dict(json.loads(Path(path).read_text()))


def write_cover(cover: Cover, path: str | Path, extra: dict | None = None) -> None:
    doc = cover.to_dict()
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")
