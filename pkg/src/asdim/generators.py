"""Seeded instance generators and brute-force oracles for small graphs."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .graph import EPS, DistanceOracle, GraphInputError, WeightedGraph
from .pathwidth import PathDecomposition


def gen_grid(dims: Sequence[int]) -> tuple[WeightedGraph, np.ndarray]:
    """Unit grid ``[0,d1) x ... x [0,dk)``; vertex ids follow row-major order of the coordinates."""
    dims = [int(x) for x in dims]
    if not dims or min(dims) < 1:
        raise GraphInputError("grid dimensions must be a nonempty list of positive integers")
    coords = np.array(list(np.ndindex(*dims)), dtype=np.int64).reshape(-1, len(dims))
    ids = np.arange(len(coords)).reshape(dims)
    edges = []
    for axis in range(len(dims)):
        lo = np.take(ids, range(dims[axis] - 1), axis=axis).ravel()
        hi = np.take(ids, range(1, dims[axis]), axis=axis).ravel()
        edges.extend(zip(lo.tolist(), hi.tolist()))
    return WeightedGraph.from_edges(len(coords), edges), coords


def gen_torus_grid(dims: Sequence[int]) -> tuple[WeightedGraph, np.ndarray]:
    """Grid with wrap-around edges along every axis of length at least 3."""
    g, coords = gen_grid(dims)
    ids = np.arange(len(coords)).reshape([int(x) for x in dims])
    extra = []
    for axis, size in enumerate(dims):
        if size >= 3:
            first = np.take(ids, [0], axis=axis).ravel()
            last = np.take(ids, [size - 1], axis=axis).ravel()
            extra.extend(zip(first.tolist(), last.tolist()))
    edges = [(u, v) for u, v, _ in g.edges] + extra
    return WeightedGraph.from_edges(g.vertex_count, edges), coords


def gen_path(n: int) -> WeightedGraph:
    if n < 1:
        raise GraphInputError("n must be positive")
    return WeightedGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> WeightedGraph:
    if n < 3:
        raise GraphInputError("a cycle needs at least 3 vertices")
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_tree(seed: int, n: int) -> WeightedGraph:
    """Random recursive tree: vertex ``i`` attaches to a uniform earlier vertex."""
    if n < 1:
        raise GraphInputError("n must be positive")
    rng = np.random.default_rng(seed)
    parents = [int(rng.integers(0, i)) for i in range(1, n)]
    return WeightedGraph.from_edges(n, [(p, i) for i, p in enumerate(parents, start=1)])


def gen_interval_graph(seed: int, n: int, k: int) -> tuple[WeightedGraph, PathDecomposition]:
    """Random connected interval graph with clique number at most ``k+1``.

    Vertices are opened and closed by a left-to-right sweep that keeps between
    one and ``k+1`` intervals alive; every opening emits the current active set
    as a bag, so the bags form a path decomposition of width at most ``k``.
    """
    if n < 1 or k < 1:
        raise GraphInputError("need n >= 1 and k >= 1")
    rng = np.random.default_rng(seed)
    active: list[int] = []
    bags: list[frozenset[int]] = []
    edges: set[tuple[int, int]] = set()
    nxt = 0
    while nxt < n:
        if len(active) == k + 1 or (len(active) > 1 and rng.random() < 0.5):
            active.pop(int(rng.integers(0, len(active))))
            continue
        for u in active:
            edges.add((u, nxt))
        active.append(nxt)
        bags.append(frozenset(active))
        nxt += 1
    return WeightedGraph.from_edges(n, sorted(edges)), PathDecomposition(bags)


def subdivide_all(g: WeightedGraph, k: int) -> WeightedGraph:
    """Replace each edge of weight ``w`` by a path of ``k+1`` edges of weight ``w``.

    Original vertices keep their ids, and distances between them scale by ``k+1``.
    """
    if k < 0:
        raise GraphInputError("k must be nonnegative")
    n = g.vertex_count
    edges = []
    for u, v, w in g.edges:
        chain = [u] + list(range(n, n + k)) + [v]
        n += k
        edges.extend((a, b, w) for a, b in zip(chain, chain[1:]))
    return WeightedGraph(n, tuple(edges))


@dataclass(frozen=True)
class StretchParams:
    k: int
    p: int

    def __post_init__(self) -> None:
        if self.k < 0 or self.p < 0:
            raise GraphInputError("stretch parameters must be nonnegative")


def _cubic_tree(leaves: int) -> tuple[int, list[tuple[int, int]], list[int]]:
    """Tree of minimal radius with ``leaves`` leaves whose internal vertices have degree 3.

    Returns (vertex count, edges, leaf ids); vertex 0 is the centre.
    """
    if leaves <= 1:
        return 1, [], [0]
    if leaves == 2:
        return 2, [(0, 1)], [0, 1]
    edges: list[tuple[int, int]] = []
    leaf_ids: list[int] = []
    count = 1

    def grow(parent: int, want: int) -> None:
        nonlocal count
        me = count
        count += 1
        edges.append((parent, me))
        if want == 1:
            leaf_ids.append(me)
            return
        grow(me, (want + 1) // 2)
        grow(me, want // 2)

    share = [leaves // 3 + (1 if i < leaves % 3 else 0) for i in range(3)]
    for s in share:
        grow(0, s)
    return count, edges, leaf_ids


def stretch(g: WeightedGraph, params: StretchParams) -> WeightedGraph:
    """The ``(k, p)``-stretch of ``g``: every vertex becomes a ``p``-subdivided cubic tree with one leaf
    per incident edge, and every edge becomes a path with ``k`` inner vertices between two leaves."""
    k, p = params.k, params.p
    adj = g.adjacency()
    edges: list[tuple[int, int]] = []
    n = 0
    port: dict[tuple[int, int], int] = {}  # (v, neighbour) -> leaf of T_v
    for v in range(g.vertex_count):
        nbrs = sorted({u for u, _ in adj[v]})
        size, tree_edges, leaves = _cubic_tree(len(nbrs))
        base = n
        n += size
        for a, b in tree_edges:
            chain = [base + a] + list(range(n, n + p)) + [base + b]
            n += p
            edges.extend(zip(chain, chain[1:]))
        for u, leaf in zip(nbrs, leaves):
            port[(v, u)] = base + leaf
    for u, v in sorted(g.simple_edges()):
        chain = [port[(u, v)]] + list(range(n, n + k)) + [port[(v, u)]]
        n += k
        edges.extend(zip(chain, chain[1:]))
    return WeightedGraph.from_edges(n, edges)


def stretch_growth_bound(d: int, k: int, p: int, r: int) -> float:
    """Growth envelope for stretched ``d``-dimensional grids, by regime of ``r``."""
    if r <= p:
        return 3 * r + 1
    if r <= k:
        return 4 * d * r + 1
    return 4 * d * k * (1 + 2 * math.ceil(r / k)) ** d


def stretch_params_for(d: int) -> StretchParams:
    """Smallest ``p >= d`` and ``k >= 4 p log2 d``."""
    p = d
    k = math.ceil(4 * p * math.log2(d) - EPS) if d > 1 else 0
    return StretchParams(k, p)


def unit_ball_graph(points: np.ndarray, radius: float = 1.0) -> WeightedGraph:
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return WeightedGraph(0, ())
    pairs = cKDTree(pts).query_pairs(radius + EPS, output_type="ndarray")
    return WeightedGraph.from_edges(len(pts), [tuple(x) for x in pairs.tolist()])


def gen_unit_ball_points(seed: int, n: int, box: float, d: int = 2) -> tuple[WeightedGraph, np.ndarray]:
    """``n`` uniform points in ``[0, box]^d`` and their unit-ball graph."""
    if n < 0 or not box > 0 or d < 1:
        raise GraphInputError("need n >= 0, box > 0, d >= 1")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, box, size=(n, d))
    return unit_ball_graph(pts), pts


def gen_separated_points(seed: int, n: int, box: float, d: int = 3, C: float = 2.0,
                         attempts: int = 200000) -> tuple[WeightedGraph, np.ndarray]:
    """Up to ``n`` points in ``[0, box]^d`` pairwise at least 1 apart, joined when within ``C``."""
    if n < 0 or not box > 0 or d < 1 or C < 1:
        raise GraphInputError("need n >= 0, box > 0, d >= 1, C >= 1")
    rng = np.random.default_rng(seed)
    arr = np.zeros((n, d))
    count = 0
    for _ in range(attempts):
        if count == n:
            break
        x = rng.uniform(0.0, box, size=d)
        if count == 0 or np.min(np.sum((arr[:count] - x) ** 2, axis=1)) >= 1.0:
            arr[count] = x
            count += 1
    arr = arr[:count]
    return unit_ball_graph(arr, C), arr


def oracle_r_components(g: WeightedGraph, s: Sequence[int], r: float) -> list[list[int]]:
    """``r``-components by breadth-first search in the threshold graph, from a full distance matrix."""
    dist = DistanceOracle(g).all_pairs() if g.vertex_count else np.zeros((0, 0))
    members = sorted(set(int(v) for v in s))
    seen: set[int] = set()
    out = []
    for v in members:
        if v in seen:
            continue
        seen.add(v)
        comp = [v]
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in members:
                if y not in seen and dist[x, y] <= r + EPS:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        out.append(sorted(comp))
    return out


MIN_BOUND_CAP = 10


def oracle_min_bound(g: WeightedGraph, m: int, r: float) -> float:
    """Smallest possible max weak diameter of an ``r``-component over all covers by ``m`` sets.

    Shrinking sets never enlarges components, so it suffices to search
    partitions; colourings are enumerated as restricted growth strings.
    """
    n = g.vertex_count
    if n > MIN_BOUND_CAP:
        raise GraphInputError(f"oracle_min_bound is limited to {MIN_BOUND_CAP} vertices")
    if m < 1:
        raise GraphInputError("m must be positive")
    if n == 0:
        return 0.0
    dist = DistanceOracle(g).all_pairs()
    close = [[bool(dist[i, j] <= r + EPS) for j in range(n)] for i in range(n)]
    best = math.inf
    colour = [0] * n

    def worst_component(limit: float) -> float:
        worst = 0.0
        seen = [False] * n
        for v in range(n):
            if seen[v]:
                continue
            seen[v] = True
            comp = [v]
            i = 0
            while i < len(comp):
                x = comp[i]
                i += 1
                for y in range(n):
                    if not seen[y] and colour[y] == colour[v] and close[x][y]:
                        seen[y] = True
                        comp.append(y)
            for a in comp:
                for b in comp:
                    if dist[a, b] > worst:
                        worst = float(dist[a, b])
                        if worst >= limit:
                            return worst
        return worst

    def assign(i: int, used: int) -> None:
        nonlocal best
        if i == n:
            best = min(best, worst_component(best))
            return
        for c in range(min(used + 1, m)):
            colour[i] = c
            assign(i + 1, max(used, c + 1))
            if best == 0.0:
                return

    assign(0, 0)
    return best


def oracle_growth(g: WeightedGraph, r_max: int) -> np.ndarray:
    """``out[r]`` is the largest ball ``|B_r(v)|`` over all vertices, for ``r = 0..r_max``."""
    if r_max < 0:
        raise GraphInputError("r_max must be nonnegative")
    out = np.zeros(r_max + 1, dtype=np.int64)
    oracle = DistanceOracle(g)
    step = 256
    radii = np.arange(r_max + 1, dtype=float) + EPS
    for start in range(0, g.vertex_count, step):
        rows = oracle.rows(np.arange(start, min(g.vertex_count, start + step)))
        finite = np.where(np.isfinite(rows), rows, np.inf)
        for idx, rad in enumerate(radii):
            out[idx] = max(out[idx], int((finite <= rad).sum(axis=1).max()))
    return out

