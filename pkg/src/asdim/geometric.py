"""Covers of geometric graphs by recursive stitching along coordinate axes.

A graph embedded in R^d is stitched along the last free coordinate; each slab
is then a graph with one more bounded coordinate and is covered the same way
with one more unit of coverage.  Once every coordinate is bounded the piece
sits in a box, and a packing argument bounds its components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .covers import Certificate, Cover
from .graph import EPS, GraphInputError, RealProjection, WeightedGraph
from .stitching import slab_provider, stitch_with_trace

SEPARATION = "separation"
UNIT_BALL = "unit-ball"


@dataclass
class Embedding:
    """Points for the vertices of a graph, in separation mode (class ``D^d(C)``) or unit-ball mode."""

    d: int
    C: float
    points: np.ndarray
    mode: str = SEPARATION

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float).reshape(-1, self.d)
        if self.d < 1:
            raise GraphInputError("dimension must be at least 1")
        if self.C < 1:
            raise GraphInputError("stretch C must be at least 1")
        if self.mode not in (SEPARATION, UNIT_BALL):
            raise GraphInputError(f"unknown embedding mode {self.mode!r}")


@dataclass
class EmbeddingReport:
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_embedding(emb: Embedding, g: WeightedGraph) -> EmbeddingReport:
    rep = EmbeddingReport()
    pts = emb.points
    if len(pts) != g.vertex_count:
        rep.violations.append(f"{len(pts)} points for {g.vertex_count} vertices")
        return rep
    if not np.all(np.isfinite(pts)):
        rep.violations.append("non-finite coordinates")
        return rep
    if not g.is_unit_weight():
        rep.violations.append("geometric graphs must have unit edge weights")
    tree = cKDTree(pts) if len(pts) else None
    edges = g.simple_edges()
    if emb.mode == SEPARATION:
        if tree is not None:
            for u, v in sorted(tree.query_pairs(1.0 - EPS)):
                rep.violations.append(f"points {u} and {v} are closer than 1")
        for u, v in edges:
            if np.linalg.norm(pts[u] - pts[v]) > emb.C + EPS:
                rep.violations.append(f"edge ({u}, {v}) is longer than C")
    else:
        close = set(tree.query_pairs(1.0 + EPS)) if tree is not None else set()
        for u, v in sorted(close - set(edges)):
            rep.violations.append(f"points {u} and {v} are within 1 but not adjacent")
        for u, v in sorted(set(edges) - close):
            rep.violations.append(f"edge ({u}, {v}) joins points more than 1 apart")
    return rep


def coordinate_projection(emb: Embedding, axis: int, divisor: float | None = None) -> RealProjection:
    if not 0 <= axis < emb.d:
        raise GraphInputError(f"axis {axis} out of range for dimension {emb.d}")
    if divisor is None:
        divisor = emb.C if emb.mode == SEPARATION else 1.0
    return RealProjection(emb.points[:, axis] / divisor)


def packing_cap(box: float, d: int) -> int:
    """Most points pairwise at least 1 apart inside a cube of side ``box``."""
    return (math.ceil(box * math.sqrt(d) - EPS) + 1) ** d


def unit_ball_base_bound(box: float, d: int) -> float:
    return 2.0 * math.ceil(math.sqrt(d) * box - EPS) ** d


@dataclass
class _Ledger:
    coverage: dict[int, dict[str, int]] = field(default_factory=dict)
    base_cases: int = 0
    packing_violations: list[dict] = field(default_factory=list)
    worst_packing: float = 0.0
    max_box: float = 0.0

    def note_coverage(self, depth: int, target: int, observed: int) -> None:
        entry = self.coverage.setdefault(depth, {"target": target, "observed_min": observed, "covers": 0})
        entry["observed_min"] = min(entry["observed_min"], observed)
        entry["covers"] += 1
        if observed < target:
            raise AssertionError(f"coverage {observed} below {target} at depth {depth}")


class _Recursion:
    def __init__(self, emb: Embedding):
        self.emb = emb
        self.K = emb.d + 1
        self.ledger = _Ledger()

    def base(self, h: WeightedGraph, pts: np.ndarray, rho: float, box: float) -> Cover:
        d = self.emb.d
        n = h.vertex_count
        self.ledger.base_cases += 1
        self.ledger.max_box = max(self.ledger.max_box, box)
        if self.emb.mode == SEPARATION:
            cap = packing_cap(box, d)
            if n > cap:
                self.ledger.packing_violations.append({"points": n, "cap": cap, "box": box})
            self.ledger.worst_packing = max(self.ledger.worst_packing, n / cap)
            bound = n * rho
        else:
            bound = unit_ball_base_bound(box, d)
        everything = np.arange(n)
        cert = Certificate(rho, bound, self.K, None, "box", {"box": box})
        return Cover([everything] * self.K, cert, n)

    def cover(self, h: WeightedGraph, pts: np.ndarray, free: int, rho: float, box: float) -> Cover:
        depth = self.emb.d - free
        target = 1 + depth
        if free == 0:
            out = self.base(h, pts, rho, box)
        else:
            divisor = self.emb.C if self.emb.mode == SEPARATION else 1.0
            f = RealProjection(pts[:, free - 1] / divisor)

            def inner(sub: WeightedGraph, mapping: np.ndarray, span: float, sub_rho: float) -> Cover:
                return self.cover(sub, pts[mapping], free - 1, sub_rho, max(box, divisor * span))

            out, _ = stitch_with_trace(h, f, slab_provider(h, f, inner), self.K, target, rho)
        counts = out.coverage_counts()
        self.ledger.note_coverage(depth, target, int(counts.min()) if h.vertex_count else target)
        return out


def geometric_cover(g: WeightedGraph, emb: Embedding, r: float) -> Cover:
    """``d+1`` sets covering ``g`` whose ``r``-components have bounded weak diameter.

    The certificate records the coverage observed at every recursion depth, the
    largest box side reached, and how full the fullest base box was relative to
    its packing capacity.
    """
    if not r > 0:
        raise GraphInputError("r must be positive")
    report = validate_embedding(emb, g)
    if not report.valid:
        raise GraphInputError("invalid embedding: " + "; ".join(report.violations[:5]))
    rec = _Recursion(emb)
    out = rec.cover(g, emb.points, emb.d, r, 0.0)
    led = rec.ledger
    params = dict(out.certificate.parameters) if out.certificate.scheme_name == "stitch" else {}
    params.pop("slabs", None)
    params.update({
        "d": emb.d,
        "C": emb.C,
        "mode": emb.mode,
        "coverage_ledger": {str(k): v for k, v in sorted(led.coverage.items())},
        "base_cases": led.base_cases,
        "max_box": led.max_box,
        "worst_packing_ratio": led.worst_packing,
        "packing_violations": led.packing_violations,
    })
    scheme = "unit-ball" if emb.mode == UNIT_BALL else "geometric"
    cert = Certificate(r, out.certificate.claimed_bound, 1, None, scheme, params)
    return Cover(out.sets, cert, g.vertex_count)


def unit_ball_cover(points: np.ndarray, r: float, g: WeightedGraph | None = None) -> Cover:
    from .generators import unit_ball_graph

    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise GraphInputError("points must be an (n, d) array")
    if g is None:
        g = unit_ball_graph(pts)
    return geometric_cover(g, Embedding(pts.shape[1], 1.0, pts, UNIT_BALL), r)


def grid_subgraph_cover(g: WeightedGraph, coords: np.ndarray, r: float) -> Cover:
    """Cover a subgraph of the integer grid, which lies in ``D^d(1)``."""
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 2 or len(arr) != g.vertex_count:
        raise GraphInputError("need one coordinate row per vertex")
    if not np.all(np.abs(arr - np.round(arr)) <= EPS):
        raise GraphInputError("grid coordinates must be integers")
    for u, v in g.simple_edges():
        if np.abs(arr[u] - arr[v]).sum() != 1:
            raise GraphInputError(f"edge ({u}, {v}) is not a grid edge")
    return geometric_cover(g, Embedding(arr.shape[1], 1.0, np.round(arr), SEPARATION), r)
