"""Three-set covers for graphs without a K_{3,p} minor, and the chordal partition scheme."""

from __future__ import annotations

import math

import numpy as np

from .banana import annulus_cover
from .covers import Certificate, Cover, union_covers
from .graph import (
    DistanceOracle,
    GraphInputError,
    WeightedGraph,
    induced_subgraph,
    r_components,
    rooted_projection,
)
from .stitching import slab_provider, stitch_with_trace

SETS = 3


def split_heavy_edges(g: WeightedGraph) -> WeightedGraph:
    """Subdivide every edge heavier than 1 into equal pieces of weight at most 1.

    Original vertices keep their ids; distances between them are unchanged.
    """
    n = g.vertex_count
    edges = []
    for u, v, w in g.edges:
        if w <= 1.0:
            edges.append((u, v, w))
            continue
        pieces = math.ceil(w)
        chain = [u] + list(range(n, n + pieces - 1)) + [v]
        n += pieces - 1
        edges.extend((a, b, w / pieces) for a, b in zip(chain, chain[1:]))
    return WeightedGraph(n, tuple(edges))


def _slab_inner(p: int):
    def inner(h: WeightedGraph, mapping: np.ndarray, span: float, rho: float) -> Cover:
        # vertex 0 of the component graph is the root of its projection
        if len(mapping) and mapping[0] == 0:
            everything = np.arange(h.vertex_count)
            cert = Certificate(rho, 2 * span, SETS, None, "root-slab", {"root_slab": True})
            return Cover([everything] * SETS, cert, h.vertex_count)
        q = 6 * span + 2
        parts, maps, bound = [], [], 0.0
        for comp in h.components():
            sub, submap = induced_subgraph(h, comp)
            c = annulus_cover(sub, 0, rho, q, p, m=SETS)
            parts.append(c)
            maps.append(submap)
            bound = max(bound, c.certificate.claimed_bound)
        cert = Certificate(rho, bound, SETS - 1, None, "banana", {"q": q})
        return Cover(union_covers(parts, h.vertex_count, maps), cert, h.vertex_count)

    return inner


def provider_linear_form(p: int) -> dict[str, float]:
    """Coefficients ``(a, b, c)`` with slab bound ``<= a*rho + b*S + c`` for the modulus-3 annulus provider."""
    return {"a": 7 * p + 10, "b": 18 * p + 12, "c": 6 * p + 4}


def k3p_cover(g: WeightedGraph, p: int, r: float, subdivide_heavy: bool = False, scheme: str = "k3p") -> Cover:
    """Three sets covering ``g`` whose ``r``-components are bounded, assuming no K_{3,p} minor.

    The assumption is not checked; run :func:`asdim.covers.verify_cover` on the
    result to see whether the certified bound was met.
    """
    if p < 3:
        raise GraphInputError("p must be at least 3")
    if not r > 0:
        raise GraphInputError("r must be positive")
    work = g
    if g.max_weight() > 1.0:
        if not subdivide_heavy:
            raise GraphInputError("edge weights above 1 need subdivide_heavy=True")
        work = split_heavy_edges(g)

    params: dict = {
        "p": p,
        "K": SETS,
        "s2": (SETS + 2) * r,
        "q_rule": "6*S+2 with S the widened slab span",
        "provider_linear_form": provider_linear_form(p),
        "components": [],
    }
    parts, maps = [], []
    bound = 0.0
    for comp in work.components():
        h, mapping = induced_subgraph(work, comp)
        f = rooted_projection(h, 0)
        cover, trace = stitch_with_trace(h, f, slab_provider(h, f, _slab_inner(p)), SETS, 1, r)
        parts.append(cover)
        maps.append(mapping)
        bound = max(bound, cover.certificate.claimed_bound)
        params["components"].append(
            {"root": int(mapping[0]), "size": int(len(mapping)), "constants": cover.certificate.parameters["constants"],
             "slabs": trace.slabs}
        )
    sets = union_covers(parts, work.vertex_count, maps) if parts else [np.zeros(0, dtype=np.int64)] * SETS
    if work is not g:
        sets = [s[s < g.vertex_count] for s in sets]
        params["subdivided_vertices"] = work.vertex_count - g.vertex_count
    cert = Certificate(r, bound, 1, None, scheme, params)
    return Cover(sets, cert, g.vertex_count)


def planar_cover(g: WeightedGraph, r: float, subdivide_heavy: bool = False) -> Cover:
    """Planar graphs exclude K_{3,3}, so this is :func:`k3p_cover` with ``p = 3``."""
    return k3p_cover(g, 3, r, subdivide_heavy, scheme="planar")


def genus_cover(g: WeightedGraph, genus: int, r: float, subdivide_heavy: bool = False) -> Cover:
    if genus < 0:
        raise GraphInputError("genus must be nonnegative")
    cover = k3p_cover(g, 2 * genus + 3, r, subdivide_heavy, scheme="genus")
    cover.certificate.parameters["genus"] = genus
    cover.certificate.parameters["expected_growth"] = "O(g^2 r)"
    return cover


def chordal_scheme(g: WeightedGraph, r: float) -> Cover:
    """Partition into ``(20r+12)``-bounded parts meeting every ``r``-ball at most twice.

    Runs the two-set annulus cover with ``q = p = 2`` at scale ``2r`` and takes
    the ``2r``-components of both sets as parts.  Valid for chordal graphs, which
    have no 2-fat 2-banana; chordality is not checked.
    """
    if not r > 0:
        raise GraphInputError("r must be positive")
    if not g.is_unit_weight():
        raise GraphInputError("the chordal scheme expects an unweighted graph")
    parts: list[np.ndarray] = []
    k0s = []
    for comp in g.components():
        h, mapping = induced_subgraph(g, comp)
        cover = annulus_cover(h, 0, 2 * r, 2, 2, m=2)
        k0s.append(cover.certificate.parameters["k0"])
        oracle = DistanceOracle(h)
        for s in cover.sets:
            for piece in r_components(oracle, s, 2 * r):
                parts.append(mapping[piece])
    parts.sort(key=lambda a: int(a[0]))
    params = {"q": 2, "p": 2, "m": 2, "inner_scale": 2 * r, "k0": k0s}
    cert = Certificate(r, 20 * r + 12, 1, 2, "chordal", params, bounded_sets=True)
    return Cover(parts, cert, g.vertex_count)
