"""Partitions of bounded r-multiplicity for graphs given with a path decomposition.

Vertices are peeled into non-nested levels by interval containment, each level
is cut into sections of fixed start-count weight, sections split into initial
clusters, and clusters of deeper levels are merged onto the oldest nearby
cluster of the levels above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .covers import Certificate, Cover
from .graph import EPS, DistanceOracle, GraphInputError, WeightedGraph, induced_subgraph, r_components


@dataclass
class PathDecomposition:
    bags: list[frozenset[int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def __len__(self) -> int:
        return len(self.bags)


@dataclass
class IntervalRep:
    """Per-vertex bag interval ``[start, end]`` (inclusive)."""

    start: np.ndarray
    end: np.ndarray
    length: int
    width: int


def decomposition_violations(bags: Sequence[Sequence[int]], g: WeightedGraph | None = None) -> list[str]:
    problems = []
    seen: dict[int, list[int]] = {}
    for i, bag in enumerate(bags):
        for v in bag:
            seen.setdefault(int(v), []).append(i)
    for v, idx in sorted(seen.items()):
        if idx != list(range(idx[0], idx[0] + len(idx))):
            problems.append(f"vertex {v} appears in non-contiguous bags {idx}")
    if g is not None:
        for v in range(g.vertex_count):
            if v not in seen:
                problems.append(f"vertex {v} is in no bag")
        extra = [v for v in seen if not 0 <= v < g.vertex_count]
        if extra:
            problems.append(f"bags mention unknown vertices {extra[:5]}")
        sets = [set(b) for b in bags]
        for (u, v) in g.simple_edges():
            lo = max(seen.get(u, [-1])[0], seen.get(v, [-1])[0])
            hi = min(seen.get(u, [-1])[-1], seen.get(v, [-2])[-1])
            if lo > hi or lo < 0 or not (u in sets[lo] and v in sets[lo]):
                problems.append(f"edge ({u}, {v}) lies in no bag")
    return problems


def normalize_pd(bags: Sequence[Sequence[int]], g: WeightedGraph | None = None) -> PathDecomposition:
    """Validate and drop every bag contained in a neighbouring bag until none is."""
    problems = decomposition_violations(bags, g)
    if problems:
        raise GraphInputError("invalid path decomposition: " + "; ".join(problems[:10]))
    out = [frozenset(int(v) for v in b) for b in bags]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(out) and len(out) > 1:
            left = out[i - 1] if i > 0 else None
            right = out[i + 1] if i + 1 < len(out) else None
            if (left is not None and out[i] <= left) or (right is not None and out[i] <= right):
                del out[i]
                changed = True
            else:
                i += 1
    return PathDecomposition(out)


def interval_rep(pd: PathDecomposition, n: int) -> IntervalRep:
    start = np.full(n, -1, dtype=np.int64)
    end = np.full(n, -1, dtype=np.int64)
    for i, bag in enumerate(pd.bags):
        for v in bag:
            if start[v] < 0:
                start[v] = i
            end[v] = i
    if np.any(start < 0):
        raise GraphInputError(f"vertex {int(np.flatnonzero(start < 0)[0])} is in no bag")
    return IntervalRep(start, end, len(pd.bags), pd.width)


@dataclass
class LevelStructure:
    levels: list[np.ndarray]
    level_of: np.ndarray
    starts: list[np.ndarray]  # sorted bag indices where some level-j vertex starts

    @property
    def p(self) -> int:
        return len(self.levels)

    def measure(self, j: int, lo: int, hi: int) -> int:
        """Number of indices in ``[lo, hi]`` where a vertex of level ``j`` (0-based) starts."""
        s = self.starts[j]
        return int(np.searchsorted(s, hi, side="right") - np.searchsorted(s, lo, side="left"))


def peel_levels(rep: IntervalRep, pd: PathDecomposition) -> LevelStructure:
    """Repeatedly remove the vertices whose interval is not strictly inside another remaining one."""
    n = len(rep.start)
    remaining = np.ones(n, dtype=bool)
    level_of = np.full(n, -1, dtype=np.int64)
    levels = []
    while remaining.any():
        current = []
        for v in np.flatnonzero(remaining):
            a, b = rep.start[v], rep.end[v]
            # anything strictly containing I_v sits in both end bags of I_v
            maximal = True
            for u in pd.bags[a] & pd.bags[b]:
                if u != v and remaining[u] and rep.start[u] <= a and rep.end[u] >= b and (
                    rep.start[u] < a or rep.end[u] > b
                ):
                    maximal = False
                    break
            if maximal:
                current.append(v)
        current_arr = np.array(current, dtype=np.int64)
        level_of[current_arr] = len(levels)
        remaining[current_arr] = False
        levels.append(current_arr)
    starts = [np.unique(rep.start[lv]) for lv in levels]
    return LevelStructure(levels, level_of, starts)


@dataclass
class PathwidthConstants:
    k: int
    p: int
    r: float
    small_r: list[float]  # r_1..r_p
    big_r: list[float]    # R_1..R_p
    section_weight: list[float]  # Q_1..Q_p

    @classmethod
    def build(cls, k: int, p: int, r: float, top_factor: float = 100.0) -> "PathwidthConstants":
        kk = max(k, 1)
        small = [0.0] * p
        big = [0.0] * p
        small[p - 1] = top_factor * r
        big[p - 1] = 3 * (kk + 1) * kk * small[p - 1] ** 2
        for j in range(p - 2, -1, -1):
            small[j] = 10 * big[j + 1]
            big[j] = 3 * (kk + 1) * kk * small[j] ** 2
        return cls(kk, p, r, small, big, [2 * kk * x for x in small])

    @property
    def final_bound(self) -> float:
        return (self.p + 1) * self.big_r[0]


@dataclass
class Cluster:
    members: np.ndarray
    age: int
    labels: tuple[int, int]
    cid: int


@dataclass
class PathwidthRun:
    """Everything the construction computed, kept for invariant checks."""

    pd: PathDecomposition
    rep: IntervalRep
    levels: LevelStructure
    constants: PathwidthConstants
    sections: list[np.ndarray]  # per level: section number of each level vertex (aligned with levels[j])
    initial: list[list[Cluster]] = field(default_factory=list)
    merged: list[Cluster] = field(default_factory=list)


def _sections(levels: LevelStructure, rep: IntervalRep, j: int, weight: float) -> np.ndarray:
    verts = levels.levels[j]
    rank = np.searchsorted(levels.starts[j], rep.start[verts]) + 1  # 1-based rank of the start index
    return np.floor((rank - 1) / weight + EPS).astype(np.int64)


def pathwidth_run(g: WeightedGraph, pd: PathDecomposition | Sequence[Sequence[int]], r: float, top_factor: float = 100.0,
                  oracle: DistanceOracle | None = None) -> PathwidthRun:
    if not r > 0:
        raise GraphInputError("r must be positive")
    if top_factor * r <= 2 * r:
        raise GraphInputError("the top scale must exceed 2r")
    oracle = oracle or DistanceOracle(g)
    pd = normalize_pd(pd.bags if isinstance(pd, PathDecomposition) else pd, g)
    rep = interval_rep(pd, g.vertex_count)
    lv = peel_levels(rep, pd)
    const = PathwidthConstants.build(pd.width, max(lv.p, 1), r, top_factor)
    run = PathwidthRun(pd, rep, lv, const, [])

    cid = 0
    for j in range(lv.p):
        verts = lv.levels[j]
        sec = _sections(lv, rep, j, const.section_weight[j])
        run.sections.append(sec)
        clusters = []
        for t in np.unique(sec):
            for comp in r_components(oracle, verts[sec == t], const.small_r[j]):
                clusters.append(Cluster(comp, j, (j, j), cid))
                cid += 1
        run.initial.append(clusters)

    merged: list[Cluster] = list(run.initial[0]) if run.initial else []
    for j in range(1, lv.p):
        snapshot = [(c.members, c.age, c.cid) for c in merged]
        if snapshot:
            owner = np.concatenate([np.full(len(m), i, dtype=np.int64) for i, (m, _, _) in enumerate(snapshot)])
            verts = np.concatenate([m for m, _, _ in snapshot])
        additions: dict[int, list[np.ndarray]] = {}
        fresh = []
        for init in run.initial[j]:
            best = None
            if snapshot:
                d = oracle.block(init.members, verts).min(axis=0)
                near = np.zeros(len(snapshot), dtype=float) + np.inf
                np.minimum.at(near, owner, d)
                cand = [i for i in np.flatnonzero(near <= const.small_r[j] + EPS)]
                if cand:
                    best = min(cand, key=lambda i: (snapshot[i][1], snapshot[i][2]))
            if best is None:
                fresh.append(Cluster(init.members, j, (j, j), init.cid))
            else:
                additions.setdefault(best, []).append(init.members)
        new_merged = []
        for i, c in enumerate(merged):
            if i in additions:
                members = np.unique(np.concatenate([c.members] + additions[i]))
                new_merged.append(Cluster(members, c.age, (c.labels[0], j), c.cid))
            else:
                new_merged.append(c)
        merged = new_merged + fresh
    run.merged = merged
    return run


def pw_cover(g: WeightedGraph, pd: PathDecomposition | Sequence[Sequence[int]], r: float, top_factor: float = 100.0,
             oracle: DistanceOracle | None = None) -> Cover:
    """Partition ``g`` into parts of weak diameter at most ``(p+1)R_1`` meeting each ``r``-ball at most twice.

    ``top_factor`` sets the deepest scale ``r_p = top_factor * r``; the default
    uses the standard constants.  Smaller values (still above 2) keep the same
    arithmetic but produce non-trivial sections on small inputs.
    """
    run = pathwidth_run(g, pd, r, top_factor, oracle)
    return run_to_cover(run, g.vertex_count)


def run_to_cover(run: PathwidthRun, n: int) -> Cover:
    const = run.constants
    parts = sorted((c.members for c in run.merged), key=lambda a: int(a[0]))
    params = {
        "k": run.pd.width,
        "p": run.levels.p,
        "r_j": const.small_r,
        "R_j": const.big_r,
        "Q_j": const.section_weight,
        "top_factor": const.small_r[-1] / const.r,
        "width_bound": (const.k + 2) * const.big_r[0],
    }
    cert = Certificate(const.r, const.final_bound, 1, 2, "pathwidth", params, bounded_sets=True)
    return Cover(parts, cert, n)


def section_separation_violations(g: WeightedGraph, run: PathwidthRun) -> list[tuple[int, int, int, float]]:
    """Non-consecutive ``j``-sections closer than ``r_j`` in the graph induced by levels ``>= j``."""
    bad = []
    lv = run.levels
    for j in range(lv.p):
        deep = np.flatnonzero(lv.level_of >= j)
        h, mapping = induced_subgraph(g, deep)
        local = {int(v): i for i, v in enumerate(mapping)}
        verts = lv.levels[j]
        sec = run.sections[j]
        ids = np.unique(sec)
        if len(ids) < 3:
            continue
        for a in ids:
            src = [local[int(v)] for v in verts[sec == a]]
            d = dijkstra(h.csr(), directed=False, indices=src, min_only=True)
            for b in ids[ids >= a + 2]:
                tgt = [local[int(v)] for v in verts[sec == b]]
                gap = float(d[tgt].min())
                if gap <= run.constants.small_r[j] + EPS:
                    bad.append((j, int(a), int(b), gap))
    return bad


def initial_cluster_violations(oracle: DistanceOracle, run: PathwidthRun) -> list[tuple[int, int, float]]:
    """Initial clusters whose weak diameter exceeds ``R_j``."""
    bad = []
    for j, clusters in enumerate(run.initial):
        for c in clusters:
            if len(c.members) > 1:
                diam = float(oracle.block(c.members).max())
                if diam > run.constants.big_r[j] + EPS:
                    bad.append((j, c.cid, diam))
    return bad


def window_violations(oracle: DistanceOracle, run: PathwidthRun, r: float, windows: Sequence[tuple[int, int]]
                      ) -> list[tuple[int, int, int, float]]:
    """Check that level vertices in bags ``[a, b]`` have ``r``-components of diameter ``<= (C+1)(k+1)r``."""
    bad = []
    k = max(run.pd.width, 1)
    lv = run.levels
    for a, b in windows:
        inside = set()
        for i in range(a, b + 1):
            inside |= run.pd.bags[i]
        inside_arr = np.array(sorted(inside), dtype=np.int64)
        for j in range(lv.p):
            members = inside_arr[lv.level_of[inside_arr] == j]
            C = lv.measure(j, a, b)
            for comp in r_components(oracle, members, r):
                if len(comp) > 1:
                    diam = float(oracle.block(comp).max())
                    if diam > (C + 1) * (k + 1) * r + EPS:
                        bad.append((a, b, j, diam))
    return bad
