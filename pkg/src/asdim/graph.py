"""Weighted graphs, exact shortest-path metrics and component primitives."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

EPS = 1e-9
"""Comparison slack for every threshold test ``d <= r``."""

INF = math.inf


class GraphInputError(ValueError):
    """Raised for malformed graphs, vertex ids or parameters."""


def as_index_array(s: Iterable[int] | np.ndarray) -> np.ndarray:
    if isinstance(s, np.ndarray):
        return np.asarray(s, dtype=np.int64)
    return np.fromiter(sorted(s), dtype=np.int64)


@dataclass(frozen=True)
class WeightedGraph:
    """Finite undirected graph on vertices ``0..vertex_count-1`` with positive weights.

    Parallel edges are kept as given; only the lightest one matters
    metrically.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, float], ...] = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise GraphInputError("vertex_count must be nonnegative")
        norm = []
        for e in self.edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise GraphInputError(f"edge ({u}, {v}) has an invalid endpoint")
            if u == v:
                raise GraphInputError(f"self-loop at vertex {u}")
            if not w > 0 or math.isinf(w) or math.isnan(w):
                raise GraphInputError(f"edge ({u}, {v}) has nonpositive weight {w}")
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[float]], weight: float = 1.0) -> "WeightedGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; missing weights default to ``weight``."""
        out = []
        for e in edges:
            if len(e) == 2:
                out.append((int(e[0]), int(e[1]), weight))
            else:
                out.append((int(e[0]), int(e[1]), float(e[2])))
        return cls(n, tuple(out))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def simple_edges(self) -> dict[tuple[int, int], float]:
        """Map ``(min, max)`` endpoint pairs to their lightest weight."""
        if "simple" not in self._cache:
            best: dict[tuple[int, int], float] = {}
            for u, v, w in self.edges:
                key = (u, v) if u < v else (v, u)
                if key not in best or w < best[key]:
                    best[key] = w
            self._cache["simple"] = best
        return self._cache["simple"]

    def csr(self) -> csr_matrix:
        if "csr" not in self._cache:
            best = self.simple_edges()
            n = self.vertex_count
            if best:
                keys = np.array(list(best.keys()), dtype=np.int64)
                ws = np.array(list(best.values()), dtype=float)
                rows = np.concatenate([keys[:, 0], keys[:, 1]])
                cols = np.concatenate([keys[:, 1], keys[:, 0]])
                data = np.concatenate([ws, ws])
            else:
                rows = cols = np.zeros(0, dtype=np.int64)
                data = np.zeros(0)
            self._cache["csr"] = csr_matrix((data, (rows, cols)), shape=(n, n))
        return self._cache["csr"]

    def adjacency(self) -> list[list[tuple[int, float]]]:
        if "adj" not in self._cache:
            adj: list[list[tuple[int, float]]] = [[] for _ in range(self.vertex_count)]
            for (u, v), w in sorted(self.simple_edges().items()):
                adj[u].append((v, w))
                adj[v].append((u, w))
            self._cache["adj"] = adj
        return self._cache["adj"]

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adjacency()[v]]

    def degree(self, v: int) -> int:
        return len(self.adjacency()[v])

    def is_unit_weight(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    def max_weight(self) -> float:
        return max((w for _, _, w in self.edges), default=0.0)

    def components(self) -> list[np.ndarray]:
        """Connected components, each sorted, ordered by smallest vertex id."""
        if "components" not in self._cache:
            if self.vertex_count == 0:
                self._cache["components"] = []
            else:
                _, labels = connected_components(self.csr(), directed=False)
                groups: dict[int, list[int]] = {}
                for v, lab in enumerate(labels):
                    groups.setdefault(int(lab), []).append(v)
                comps = sorted((np.array(g, dtype=np.int64) for g in groups.values()), key=lambda a: int(a[0]))
                self._cache["components"] = comps
        return self._cache["components"]

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def _check_vertex(g: WeightedGraph, v: int) -> int:
    v = int(v)
    if not 0 <= v < g.vertex_count:
        raise GraphInputError(f"invalid vertex id {v} for a graph on {g.vertex_count} vertices")
    return v


def shortest_paths(g: WeightedGraph, source: int) -> np.ndarray:
    """Exact single-source distances; ``inf`` outside the source's component."""
    source = _check_vertex(g, source)
    return dijkstra(g.csr(), directed=False, indices=source)


class DistanceOracle:
    """Lazily cached exact distances of one graph.

    Rows are computed on demand.  When the graph has at most ``all_pairs_cap``
    vertices, the first request for a matrix computes all pairs at once.
    Access is guarded by a lock so threads sharing an oracle see the same rows.
    """

    def __init__(self, g: WeightedGraph, all_pairs_cap: int = 5000) -> None:
        self.graph = g
        self.all_pairs_cap = all_pairs_cap
        self._rows: dict[int, np.ndarray] = {}
        self._full: np.ndarray | None = None
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.graph.vertex_count

    def all_pairs(self) -> np.ndarray:
        with self._lock:
            if self._full is None:
                if self.n > self.all_pairs_cap:
                    raise GraphInputError(
                        f"all-pairs distances requested for {self.n} vertices (cap {self.all_pairs_cap})"
                    )
                if self.n == 0:
                    self._full = np.zeros((0, 0))
                else:
                    self._full = dijkstra(self.graph.csr(), directed=False)
            return self._full

    def row(self, source: int) -> np.ndarray:
        source = _check_vertex(self.graph, source)
        if self._full is not None:
            return self._full[source]
        with self._lock:
            r = self._rows.get(source)
        if r is None:
            r = shortest_paths(self.graph, source)
            with self._lock:
                self._rows[source] = r
        return r

    def rows(self, sources: np.ndarray) -> np.ndarray:
        sources = np.asarray(sources, dtype=np.int64)
        if self._full is None and self.n <= self.all_pairs_cap and len(sources) > 1:
            self.all_pairs()
        if self._full is not None:
            return self._full[sources]
        if len(sources) == 0:
            return np.zeros((0, self.n))
        return np.vstack([self.row(int(s)) for s in sources])

    def block(self, s: np.ndarray, t: np.ndarray | None = None) -> np.ndarray:
        """Distance matrix between the vertex arrays ``s`` and ``t`` (default ``s``)."""
        s = np.asarray(s, dtype=np.int64)
        t = s if t is None else np.asarray(t, dtype=np.int64)
        return self.rows(s)[:, t]

    def dist(self, u: int, v: int) -> float:
        return float(self.row(u)[_check_vertex(self.graph, v)])

    def set_distance(self, a: np.ndarray, b: np.ndarray) -> float:
        """``min d(x, y)`` over ``x`` in ``a`` and ``y`` in ``b``."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if len(a) == 0 or len(b) == 0:
            return INF
        if self._full is None and self.n > self.all_pairs_cap:
            d = dijkstra(self.graph.csr(), directed=False, indices=a, min_only=True)
            return float(d[b].min())
        return float(self.block(a, b).min())


@dataclass(frozen=True)
class RealProjection:
    """A 1-Lipschitz map from vertices to reals, stored densely."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __getitem__(self, v: int) -> float:
        return float(self.values[v])

    def __len__(self) -> int:
        return len(self.values)

    def lipschitz_violations(self, g: WeightedGraph) -> list[tuple[int, int]]:
        """Edges ``uv`` with ``|f(u) - f(v)| > w(uv)`` beyond tolerance."""
        bad = []
        for (u, v), w in g.simple_edges().items():
            fu, fv = self.values[u], self.values[v]
            if not (np.isfinite(fu) and np.isfinite(fv)):
                continue
            if abs(fu - fv) > w + EPS:
                bad.append((u, v))
        return bad

    def is_lipschitz(self, g: WeightedGraph) -> bool:
        return not self.lipschitz_violations(g)

    def restrict(self, ids: np.ndarray) -> "RealProjection":
        return RealProjection(self.values[np.asarray(ids, dtype=np.int64)])


def rooted_projection(g: WeightedGraph, root: int, unreachable: str = "error") -> RealProjection:
    """Distance-to-root projection.

    ``unreachable="error"`` rejects disconnected inputs; ``"component"`` keeps
    ``inf`` outside the root's component so callers can restrict to it.
    """
    if unreachable not in ("error", "component"):
        raise GraphInputError(f"unknown unreachable mode {unreachable!r}")
    d = shortest_paths(g, root)
    if unreachable == "error" and not np.all(np.isfinite(d)):
        bad = int(np.flatnonzero(~np.isfinite(d))[0])
        raise GraphInputError(f"vertex {bad} is unreachable from root {root}")
    return RealProjection(d)


def _threshold_labels(adj_mask: np.ndarray) -> np.ndarray:
    k = adj_mask.shape[0]
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = connected_components(csr_matrix(adj_mask), directed=False)
    return labels


def _group(s: np.ndarray, labels: np.ndarray) -> list[np.ndarray]:
    groups: dict[int, list[int]] = {}
    for v, lab in zip(s.tolist(), labels.tolist()):
        groups.setdefault(lab, []).append(v)
    return sorted((np.array(sorted(g), dtype=np.int64) for g in groups.values()), key=lambda a: int(a[0]))


def r_components(oracle: DistanceOracle, s: Iterable[int] | np.ndarray, r: float) -> list[np.ndarray]:
    """Partition ``s`` into classes chained by steps of length at most ``r``.

    Classes come back sorted internally and ordered by smallest member.
    """
    if not r > 0:
        raise GraphInputError("r must be positive")
    s = np.unique(as_index_array(s))
    if len(s) == 0:
        return []
    mask = oracle.block(s) <= r + EPS
    return _group(s, _threshold_labels(mask))


def rs_components(
    oracle: DistanceOracle,
    f: RealProjection | np.ndarray,
    s: Iterable[int] | np.ndarray,
    r: float,
    sp: float,
) -> list[np.ndarray]:
    """Like :func:`r_components`, but each step must also move ``f`` by at most ``sp``."""
    if not (r > 0 and sp > 0):
        raise GraphInputError("r and sp must be positive")
    values = f.values if isinstance(f, RealProjection) else np.asarray(f, dtype=float)
    s = np.unique(as_index_array(s))
    if len(s) == 0:
        return []
    if len(values) < oracle.n or not np.all(np.isfinite(values[s])):
        raise GraphInputError("projection is not defined on every vertex of s")
    mask = oracle.block(s) <= r + EPS
    if math.isfinite(sp):
        fs = values[s]
        mask &= np.abs(fs[:, None] - fs[None, :]) <= sp + EPS
    return _group(s, _threshold_labels(mask))


def weak_diameter(oracle: DistanceOracle, s: Iterable[int] | np.ndarray) -> float:
    """Largest ambient distance between two members of ``s``."""
    s = np.unique(as_index_array(s))
    if len(s) == 0:
        raise GraphInputError("weak diameter of an empty set")
    return float(oracle.block(s).max())


def induced_subgraph(g: WeightedGraph, s: Iterable[int] | np.ndarray) -> tuple[WeightedGraph, np.ndarray]:
    """Subgraph induced by ``s``; returns it with ``mapping[new_id] = old_id``."""
    mapping = np.unique(as_index_array(s))
    index = {int(v): i for i, v in enumerate(mapping)}
    edges = []
    for (u, v), w in g.simple_edges().items():
        iu = index.get(u)
        if iu is None:
            continue
        iv = index.get(v)
        if iv is not None:
            edges.append((iu, iv, w))
    return WeightedGraph(len(mapping), tuple(edges)), mapping


def subdivide_edge(g: WeightedGraph, edge: tuple[int, int], split: Sequence[float]) -> WeightedGraph:
    """Replace edge ``(u, v)`` by a path whose weights are ``split`` fractions of its weight.

    New vertices get ids ``n, n+1, ...`` ordered from ``u`` towards ``v``.
    Every copy of a parallel edge is replaced.
    """
    u, v = int(edge[0]), int(edge[1])
    if any(not x > 0 for x in split):
        raise GraphInputError("subdivision fractions must be positive")
    if abs(sum(split) - 1.0) > EPS:
        raise GraphInputError("subdivision fractions must sum to 1")
    matches = [e for e in g.edges if {e[0], e[1]} == {u, v}]
    if not matches:
        raise GraphInputError(f"no edge between {u} and {v}")
    if len(split) == 1:
        return g
    n = g.vertex_count
    edges = [e for e in g.edges if {e[0], e[1]} != {u, v}]
    for _, _, w in matches:
        chain = [u] + list(range(n, n + len(split) - 1)) + [v]
        n += len(split) - 1
        for a, b, frac in zip(chain, chain[1:], split):
            edges.append((a, b, w * frac))
    return WeightedGraph(n, tuple(edges))
