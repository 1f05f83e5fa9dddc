"""Annulus covers around a root, and a brute-force fat-banana finder for tiny graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .covers import Certificate, Cover
from .graph import EPS, DistanceOracle, GraphInputError, WeightedGraph, shortest_paths


@dataclass
class AnnulusDecomposition:
    """Core ball plus half-open annuli ``A_k = {u : k*r <= d(root, u) < (k+1)*r}`` for ``k >= k0``."""

    root: int
    width_r: float
    k0: int
    core: np.ndarray
    annuli: dict[int, np.ndarray] = field(default_factory=dict)
    index: np.ndarray | None = None  # annulus index per vertex, -1 for the core


def annulus_index(dist: np.ndarray, r: float) -> np.ndarray:
    return np.floor((dist + EPS) / r).astype(np.int64)


def first_annulus(r: float, q: float, m: int) -> int:
    """Smallest ``k0`` with ``k0*r >= r+q``, raised until ``k0 = m-1 (mod m)``."""
    k0 = max(1, math.ceil((r + q) / r - EPS))
    while k0 % m != m - 1:
        k0 += 1
    return k0


def decompose(g: WeightedGraph, root: int, r: float, k0: int) -> AnnulusDecomposition:
    dist = shortest_paths(g, root)
    if not np.all(np.isfinite(dist)):
        raise GraphInputError("annulus decomposition needs a connected graph; split components first")
    idx = annulus_index(dist, r)
    idx[idx < k0] = -1
    core = np.flatnonzero(idx < 0)
    annuli = {int(k): np.flatnonzero(idx == k) for k in np.unique(idx[idx >= 0])}
    return AnnulusDecomposition(root, r, k0, core, annuli, idx)


def derived_bound(r: float, q: float, p: int, m: int, k0: int) -> float:
    """Component bound for blocks of ``m-1`` consecutive annuli plus the core term."""
    return p * (3 * r + 2 * (m - 1) * r + 3 * q) + 2 * k0 * r + 2 * r


def annulus_cover(g: WeightedGraph, root: int, r: float, q: float, p: int, m: int = 2) -> Cover:
    """Cover ``g`` by ``m`` sets built from annuli of width ``r`` around ``root``.

    With ``m == 2`` the sets are the core plus even annuli, and the odd annuli;
    their ``r``-components are ``(5r+3q)p``-bounded when ``g`` has no ``q``-fat
    ``p``-banana.  With ``m >= 3`` set ``i`` drops the annuli ``k = i (mod m)``
    and keeps the core unless ``i = k0-1 (mod m)``; every vertex is then covered
    ``m-1`` times.
    """
    if not (r > 0 and q > 0):
        raise GraphInputError("r and q must be positive")
    if p < 2 or m < 2:
        raise GraphInputError("need p >= 2 and m >= 2")
    k0 = first_annulus(r, q, m)
    dec = decompose(g, root, r, k0)
    idx = dec.index
    off = idx >= 0
    params = {"root": int(root), "q": q, "p": p, "m": m, "k0": k0}
    if m == 2:
        c0 = np.flatnonzero(~off | (off & (idx % 2 == 0)))
        c1 = np.flatnonzero(off & (idx % 2 == 1))
        cert = Certificate(r, (5 * r + 3 * q) * p, 1, None, "banana", params)
        return Cover([c0, c1], cert, g.vertex_count)
    skip_core = (k0 - 1) % m
    sets = []
    for i in range(m):
        keep = off & (idx % m != i)
        if i != skip_core:
            keep |= ~off
        sets.append(np.flatnonzero(keep))
    bound = derived_bound(r, q, p, m, k0)
    params["derived_bound"] = bound
    cert = Certificate(r, bound, m - 1, None, "banana", params)
    return Cover(sets, cert, g.vertex_count)


@dataclass
class BananaWitness:
    """Two connected sets at distance >= q joined by p geodesics that stay q apart."""

    set_a: tuple[int, ...]
    set_b: tuple[int, ...]
    paths: list[tuple[int, ...]]
    q: float
    p: int

    def violations(self, g: WeightedGraph, oracle: DistanceOracle | None = None) -> list[str]:
        oracle = oracle or DistanceOracle(g)
        out = []
        for name, s in (("A", self.set_a), ("B", self.set_b)):
            if not _connected(g, set(s)):
                out.append(f"{name} is not connected")
        if oracle.set_distance(np.array(self.set_a), np.array(self.set_b)) < self.q - EPS:
            out.append("d(A, B) < q")
        if len(self.paths) != self.p:
            out.append("wrong number of paths")
        ws = g.simple_edges()
        for path in self.paths:
            if path[0] not in self.set_a or path[-1] not in self.set_b:
                out.append(f"path {path} does not join A to B")
            length = 0.0
            for a, b in zip(path, path[1:]):
                w = ws.get((min(a, b), max(a, b)))
                if w is None:
                    out.append(f"path {path} uses a non-edge")
                    break
                length += w
            if abs(length - oracle.dist(path[0], path[-1])) > EPS:
                out.append(f"path {path} is not geodesic")
        for x, y in combinations(self.paths, 2):
            if oracle.set_distance(np.array(x), np.array(y)) < self.q - EPS:
                out.append(f"paths {x} and {y} are closer than q")
        return out


def _connected(g: WeightedGraph, s: set[int]) -> bool:
    if not s:
        return False
    start = next(iter(s))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            if u in s and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == s


def _connected_subsets(g: WeightedGraph, size: int) -> list[tuple[int, ...]]:
    found: set[frozenset[int]] = set()
    frontier = [frozenset([v]) for v in range(g.vertex_count)]
    found.update(frontier)
    for _ in range(size - 1):
        nxt = []
        for s in frontier:
            for v in s:
                for u in g.neighbors(v):
                    t = s | {u}
                    if u not in s and t not in found:
                        found.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted((tuple(sorted(s)) for s in found), key=lambda t: (len(t), t))


def _geodesics(g: WeightedGraph, dist_row: np.ndarray, a: int, b: int, avoid: set[int]) -> list[tuple[int, ...]]:
    """All shortest ``a``-``b`` paths whose inner vertices avoid ``avoid``."""
    target = dist_row[b]
    out: list[tuple[int, ...]] = []

    def walk(v: int, path: list[int]) -> None:
        if v == b:
            out.append(tuple(path))
            return
        for u, w in g.adjacency()[v]:
            if u in path:
                continue
            if abs(dist_row[v] + w - dist_row[u]) > EPS or dist_row[u] > target + EPS:
                continue
            if u != b and u in avoid:
                continue
            path.append(u)
            walk(u, path)
            path.pop()

    walk(a, [a])
    return out


def detect_fat_banana(g: WeightedGraph, q: float, p: int, size_cap: int = 12, max_set: int = 3) -> BananaWitness | None:
    """Exhaustively look for a ``q``-fat ``p``-banana with end sets of at most ``max_set`` vertices.

    This is a test oracle for tiny graphs; ``None`` only means nothing was found
    within the enumeration bounds.
    """
    if g.vertex_count > size_cap:
        raise GraphInputError(f"graph has {g.vertex_count} vertices, above the cap {size_cap}")
    if p < 1:
        raise GraphInputError("p must be positive")
    oracle = DistanceOracle(g)
    dist = oracle.all_pairs() if g.vertex_count else np.zeros((0, 0))
    subsets = _connected_subsets(g, max_set) if g.vertex_count else []
    for ia, a_set in enumerate(subsets):
        for b_set in subsets[ia + 1:]:
            if dist[np.ix_(a_set, b_set)].min() < q - EPS:
                continue
            avoid = set(a_set) | set(b_set)
            paths = []
            for a in a_set:
                for b in b_set:
                    paths.extend(_geodesics(g, dist[a], a, b, avoid))
            chosen = _pick_far_paths(paths, dist, q, p)
            if chosen is not None:
                return BananaWitness(a_set, b_set, chosen, q, p)
    return None


def _pick_far_paths(paths: list[tuple[int, ...]], dist: np.ndarray, q: float, p: int) -> list[tuple[int, ...]] | None:
    if len(paths) < p:
        return None
    far = [[dist[np.ix_(x, y)].min() >= q - EPS for y in paths] for x in paths]

    def extend(chosen: list[int], start: int) -> list[int] | None:
        if len(chosen) == p:
            return chosen
        for i in range(start, len(paths)):
            if all(far[i][j] for j in chosen):
                res = extend(chosen + [i], i + 1)
                if res is not None:
                    return res
        return None

    pick = extend([], 0)
    return None if pick is None else [paths[i] for i in pick]
