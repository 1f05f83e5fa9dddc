"""Covers with certificates, and a verifier that rechecks every claim from exact distances."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .graph import EPS, DistanceOracle, GraphInputError, WeightedGraph, as_index_array, r_components


@dataclass
class Certificate:
    """What a construction claims about its cover.

    ``claimed_bound`` bounds the weak diameter of every ``scale_r``-component of
    every set; with ``bounded_sets`` it bounds whole sets instead (partition
    schemes).  ``claimed_multiplicity`` bounds how many sets any ``scale_r``-ball
    meets.
    """

    scale_r: float
    claimed_bound: float
    claimed_coverage: int = 1
    claimed_multiplicity: int | None = None
    scheme_name: str = ""
    parameters: dict[str, Any] = field(default_factory=dict)
    bounded_sets: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme_name,
            "r": self.scale_r,
            "bound": self.claimed_bound,
            "coverage": self.claimed_coverage,
            "multiplicity": self.claimed_multiplicity,
            "bounded_sets": self.bounded_sets,
            "parameters": _jsonable(self.parameters),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Certificate":
        return cls(
            scale_r=float(doc["r"]),
            claimed_bound=float(doc["bound"]),
            claimed_coverage=int(doc.get("coverage", 1)),
            claimed_multiplicity=None if doc.get("multiplicity") is None else int(doc["multiplicity"]),
            scheme_name=doc.get("scheme", ""),
            parameters=dict(doc.get("parameters", {})),
            bounded_sets=bool(doc.get("bounded_sets", False)),
        )


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


@dataclass
class Cover:
    """An ordered family of vertex sets of a graph on ``n`` vertices, plus its certificate."""

    sets: list[np.ndarray]
    certificate: Certificate
    n: int

    def __post_init__(self) -> None:
        self.sets = [np.unique(as_index_array(s)) for s in self.sets]
        for s in self.sets:
            if len(s) and (s[0] < 0 or s[-1] >= self.n):
                raise GraphInputError("cover set contains a vertex outside the graph")

    def __len__(self) -> int:
        return len(self.sets)

    def coverage_counts(self) -> np.ndarray:
        counts = np.zeros(self.n, dtype=np.int64)
        for s in self.sets:
            counts[s] += 1
        return counts

    def to_dict(self) -> dict[str, Any]:
        doc = self.certificate.to_dict()
        doc["n"] = self.n
        doc["sets"] = [s.tolist() for s in self.sets]
        return doc

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Cover":
        return cls([np.array(s, dtype=np.int64) for s in doc["sets"]], Certificate.from_dict(doc), int(doc["n"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class VerificationReport:
    component_diameters: list[float]
    set_diameters: list[float] | None
    min_coverage: int
    max_multiplicity: int | None
    checks: dict[str, bool]
    claimed_bound: float
    uncovered: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def max_component_diameter(self) -> float:
        return max(self.component_diameters, default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "max_component_diameter": self.max_component_diameter,
            "component_diameters": list(self.component_diameters),
            "set_diameters": None if self.set_diameters is None else list(self.set_diameters),
            "min_coverage": self.min_coverage,
            "max_multiplicity": self.max_multiplicity,
            "claimed_bound": self.claimed_bound,
            "uncovered": self.uncovered[:20],
        }


def _component_diameters(oracle: DistanceOracle, s: np.ndarray, r: float) -> float:
    worst = 0.0
    for comp in r_components(oracle, s, r):
        if len(comp) > 1:
            worst = max(worst, float(oracle.block(comp).max()))
    return worst


def r_multiplicity(cover: Cover, oracle: DistanceOracle, r: float) -> int:
    """Largest number of sets met by a single ball ``B_r(v)``."""
    if not r > 0:
        raise GraphInputError("r must be positive")
    n = cover.n
    if n == 0:
        return 0
    rows, cols = [], []
    for j, s in enumerate(cover.sets):
        rows.append(s)
        cols.append(np.full(len(s), j, dtype=np.int64))
    if not rows or sum(len(x) for x in rows) == 0:
        return 0
    member = csr_matrix(
        (np.ones(sum(len(x) for x in rows)), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, len(cover.sets)),
    )
    worst = 0
    step = 512
    for start in range(0, n, step):
        block = oracle.rows(np.arange(start, min(n, start + step))) <= r + EPS
        hits = csr_matrix(block.astype(np.float64)) @ member
        hits.data = np.minimum(hits.data, 1.0)
        worst = max(worst, int(np.asarray(hits.sum(axis=1)).max()))
    return worst


def verify_cover(cover: Cover, oracle: DistanceOracle) -> VerificationReport:
    """Re-derive coverage, component diameters and multiplicity and compare with the claims."""
    cert = cover.certificate
    if oracle.n != cover.n:
        raise GraphInputError(f"cover is for {cover.n} vertices but the graph has {oracle.n}")
    counts = cover.coverage_counts()
    min_cov = int(counts.min()) if cover.n else cert.claimed_coverage
    uncovered = np.flatnonzero(counts == 0).tolist()

    comp_diams = [_component_diameters(oracle, s, cert.scale_r) for s in cover.sets]
    checks = {
        "coverage": min_cov >= cert.claimed_coverage,
        "set_count": cert.claimed_coverage <= max(len(cover.sets), 1),
        "component_bound": max(comp_diams, default=0.0) <= cert.claimed_bound + EPS,
    }
    set_diams = None
    if cert.bounded_sets:
        set_diams = [float(oracle.block(s).max()) if len(s) > 1 else 0.0 for s in cover.sets]
        checks["set_bound"] = max(set_diams, default=0.0) <= cert.claimed_bound + EPS
    mult = None
    if cert.claimed_multiplicity is not None:
        mult = r_multiplicity(cover, oracle, cert.scale_r)
        checks["multiplicity"] = mult <= cert.claimed_multiplicity
    closed = cert.parameters.get("closed_form_bound")
    if closed is not None:
        checks["closed_form"] = max(comp_diams, default=0.0) <= float(closed) + EPS
    return VerificationReport(comp_diams, set_diams, min_cov, mult, checks, cert.claimed_bound, uncovered)


def cover_to_partition(cover: Cover) -> Cover:
    """Keep each vertex only in the lowest-indexed set that contains it."""
    owner = np.full(cover.n, -1, dtype=np.int64)
    for j in range(len(cover.sets) - 1, -1, -1):
        owner[cover.sets[j]] = j
    if cover.n and np.any(owner < 0):
        raise GraphInputError(f"vertex {int(np.flatnonzero(owner < 0)[0])} is not covered")
    sets = [np.flatnonzero(owner == j) for j in range(len(cover.sets))]
    cert = Certificate(
        scale_r=cover.certificate.scale_r,
        claimed_bound=cover.certificate.claimed_bound,
        claimed_coverage=1,
        claimed_multiplicity=cover.certificate.claimed_multiplicity,
        scheme_name=cover.certificate.scheme_name,
        parameters=dict(cover.certificate.parameters),
        bounded_sets=cover.certificate.bounded_sets,
    )
    return Cover(sets, cert, cover.n)


def weak_diameter_coloring(cover: Cover, graph: WeightedGraph, oracle: DistanceOracle) -> tuple[np.ndarray, float]:
    """Colour vertices by partition index; return colours and the worst monochromatic weak diameter.

    Monochromatic components are connected components of the subgraph induced
    by a colour class, so on unit-weight graphs with ``scale_r >= 1`` each one
    sits inside a single ``scale_r``-component.
    """
    part = cover_to_partition(cover)
    colors = np.full(cover.n, -1, dtype=np.int64)
    for j, s in enumerate(part.sets):
        colors[s] = j
    parent = list(range(cover.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v) in graph.simple_edges():
        if colors[u] == colors[v]:
            parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(cover.n):
        groups.setdefault(find(v), []).append(v)
    worst = 0.0
    for members in groups.values():
        if len(members) > 1:
            worst = max(worst, float(oracle.block(np.array(members)).max()))
    return colors, worst


SWEEP_FIELDS = ["scheme", "r", "n", "m", "sets", "min_coverage", "max_component_diameter", "bound", "multiplicity"]


def sweep_row(cover: Cover, report: VerificationReport, edge_count: int) -> dict[str, Any]:
    return {
        "scheme": cover.certificate.scheme_name,
        "r": cover.certificate.scale_r,
        "n": cover.n,
        "m": edge_count,
        "sets": len(cover.sets),
        "min_coverage": report.min_coverage,
        "max_component_diameter": report.max_component_diameter,
        "bound": cover.certificate.claimed_bound,
        "multiplicity": "" if report.max_multiplicity is None else report.max_multiplicity,
    }


def sweep_csv(rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def union_covers(parts: Sequence[Cover], n: int, mapping: Sequence[np.ndarray] | None = None) -> list[np.ndarray]:
    """Union the i-th sets of several covers, optionally relabelling each through ``mapping``."""
    k = max((len(c.sets) for c in parts), default=0)
    out: list[list[np.ndarray]] = [[] for _ in range(k)]
    for idx, c in enumerate(parts):
        for j, s in enumerate(c.sets):
            out[j].append(s if mapping is None else mapping[idx][s])
    return [np.unique(np.concatenate(x)) if x else np.zeros(0, dtype=np.int64) for x in out]
