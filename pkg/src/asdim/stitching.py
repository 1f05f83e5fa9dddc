"""Stitch slab covers along a real projection into a cover of the whole graph.

Slabs are preimages of half-open intervals of length ``s2 = (K+2)r``.  Even
slabs are covered at scale ``r`` and trimmed by a residue cover of the line;
odd slabs are covered at the larger scale ``r2`` and kept whole.  The union of
the two families has one dimension more than the slab covers.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .covers import Certificate, Cover
from .graph import (
    EPS,
    DistanceOracle,
    GraphInputError,
    RealProjection,
    WeightedGraph,
    induced_subgraph,
    rs_components,
)


class ProviderContractError(RuntimeError):
    """A slab provider returned something that breaks the stitching contract."""


def floor_index(x: np.ndarray | float, s: float) -> np.ndarray:
    return np.floor((np.asarray(x, dtype=float) + EPS) / s).astype(np.int64)


@dataclass(frozen=True)
class LineCover:
    """``K`` subsets of the reals; class ``i`` drops every cell ``[s*k, s*(k+1))`` with ``k = i (mod K)``."""

    class_count: int
    scale: float

    def __post_init__(self) -> None:
        if self.class_count < 2:
            raise GraphInputError("a line cover needs at least 2 classes")
        if not self.scale > 0:
            raise GraphInputError("scale must be positive")

    def contains(self, i: int, x: np.ndarray | float) -> np.ndarray:
        return floor_index(x, self.scale) % self.class_count != i

    def coverage(self, x: np.ndarray | float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sum(self.contains(i, x).astype(np.int64) for i in range(self.class_count))

    def run(self, i: int, x: float) -> tuple[float, float] | None:
        """The maximal interval of class ``i`` containing ``x``, or ``None``."""
        k = int(floor_index(x, self.scale))
        if k % self.class_count == i:
            return None
        lo = k
        while (lo - 1) % self.class_count != i:
            lo -= 1
        hi = k
        while (hi + 1) % self.class_count != i:
            hi += 1
        return lo * self.scale, (hi + 1) * self.scale


def line_cover(K: int, s: float) -> LineCover:
    return LineCover(K, s)


def b_intervals(s2: float, phase: int) -> Callable[[np.ndarray | float], np.ndarray]:
    """Membership in ``B_phase``: the cells ``[(2k+phase-1)s2, (2k+phase)s2)``."""
    if phase not in (1, 2):
        raise GraphInputError("phase must be 1 or 2")
    if not s2 > 0:
        raise GraphInputError("s2 must be positive")

    def member(x: np.ndarray | float) -> np.ndarray:
        return floor_index(x, s2) % 2 == phase - 1

    return member


@dataclass
class StitchConstants:
    K: int
    r: float
    s1: float
    S1: float
    s2: float
    r1: float
    R1: float = 0.0
    r2: float = 0.0
    R2: float = 0.0
    final_bound: float = 0.0

    @classmethod
    def start(cls, K: int, r: float) -> "StitchConstants":
        s1 = r
        S1 = (K - 1) * s1
        return cls(K=K, r=r, s1=s1, S1=S1, s2=S1 + 2 * s1 + r, r1=r)

    def set_R1(self, R1: float) -> None:
        self.R1 = R1
        self.r2 = R1 + 2 * self.r1 + self.r

    def set_R2(self, R2: float) -> None:
        self.R2 = R2
        self.final_bound = R2 + 2 * self.r2


@dataclass
class SlabRequest:
    """Ask for a cover of the preimage of ``[a, b)`` at scale ``rho``."""

    interval: tuple[float, float]
    rho: float
    span_cap: float
    required_sets: int
    required_coverage: int
    vertices: np.ndarray
    phase: int = 1
    index: int = 0


SlabProvider = Callable[[SlabRequest], Cover]


@dataclass
class StitchTrace:
    constants: StitchConstants
    phase_sets: dict[int, list[np.ndarray]] = field(default_factory=dict)
    slab_index: np.ndarray | None = None
    slabs: list[dict] = field(default_factory=list)


def _check_provider(req: SlabRequest, cover: Cover) -> None:
    where = f"slab {req.index} (phase {req.phase}, interval {req.interval})"
    if len(cover.sets) != req.required_sets:
        raise ProviderContractError(f"{where}: expected {req.required_sets} sets, got {len(cover.sets)}")
    allowed = np.zeros(cover.n, dtype=bool)
    allowed[req.vertices] = True
    counts = np.zeros(cover.n, dtype=np.int64)
    for s in cover.sets:
        if len(s) and not allowed[s].all():
            raise ProviderContractError(f"{where}: a set leaves the slab")
        counts[s] += 1
    if len(req.vertices) and counts[req.vertices].min() < req.required_coverage:
        raise ProviderContractError(
            f"{where}: coverage {int(counts[req.vertices].min())} below {req.required_coverage}"
        )


def stitch_with_trace(
    g: WeightedGraph,
    f: RealProjection,
    provider: SlabProvider,
    K: int,
    c: int,
    r: float,
    linear_form: tuple[float, float] | None = None,
) -> tuple[Cover, StitchTrace]:
    if K < 2:
        raise GraphInputError("K must be at least 2")
    if c < 1 or c + 1 > K:
        raise GraphInputError("need 1 <= c <= K-1")
    if not r > 0:
        raise GraphInputError("r must be positive")
    const = StitchConstants.start(K, r)
    values = np.asarray(f.values, dtype=float)
    n = g.vertex_count
    if len(values) != n:
        raise GraphInputError(f"projection has {len(values)} values for {n} vertices")
    if not np.all(np.isfinite(values)):
        raise GraphInputError("projection values must be finite")
    trace = StitchTrace(const)
    if n == 0:
        const.set_R1(0.0)
        const.set_R2(0.0)
        cert = Certificate(r, const.final_bound, c, None, "stitch", {"constants": asdict(const)})
        return Cover([np.zeros(0, dtype=np.int64)] * K, cert, 0), trace

    slab = floor_index(values, const.s2)
    trace.slab_index = slab
    phase_of = np.where(slab % 2 == 0, 1, 2)

    def run_phase(phase: int, rho: float) -> tuple[list[np.ndarray], float]:
        acc: list[list[np.ndarray]] = [[] for _ in range(K)]
        worst = 0.0
        for t in np.unique(slab[phase_of == phase]):
            members = np.flatnonzero(slab == t)
            req = SlabRequest(
                interval=(float(t) * const.s2, float(t + 1) * const.s2),
                rho=rho,
                span_cap=const.s2,
                required_sets=K,
                required_coverage=c + 1,
                vertices=members,
                phase=phase,
                index=int(t),
            )
            cover = provider(req)
            _check_provider(req, cover)
            worst = max(worst, cover.certificate.claimed_bound)
            for j, s in enumerate(cover.sets):
                acc[j].append(s)
            entry = {"phase": phase, "index": int(t), "rho": rho, "size": int(len(members)),
                     "bound": cover.certificate.claimed_bound}
            entry.update({k: v for k, v in cover.certificate.parameters.items() if k in ("q", "span", "root_slab")})
            trace.slabs.append(entry)
        sets = [np.unique(np.concatenate(a)) if a else np.zeros(0, dtype=np.int64) for a in acc]
        return sets, worst

    a1, R1 = run_phase(1, const.r1)
    const.set_R1(R1)
    a2, R2 = run_phase(2, const.r2)
    const.set_R2(R2)
    trace.phase_sets = {1: a1, 2: a2}

    lines = line_cover(K, const.s1)
    out = []
    for j in range(K):
        keep = lines.contains(j, values[a1[j]])
        out.append(np.union1d(a1[j][keep], a2[j]))

    params: dict = {"constants": asdict(const), "K": K, "slabs": trace.slabs}
    if linear_form is not None:
        a, b = linear_form
        dim = K - 2
        params["linear_form"] = {"a": a, "b": b}
        params["closed_form_bound"] = 20 * a * (6 * a + b * (dim + 4)) * r
    cert = Certificate(r, const.final_bound, c, None, "stitch", params)
    return Cover(out, cert, n), trace


def stitch(
    g: WeightedGraph,
    f: RealProjection,
    provider: SlabProvider,
    K: int,
    c: int,
    r: float,
    linear_form: tuple[float, float] | None = None,
) -> Cover:
    """Combine ``K``-set slab covers of coverage ``c+1`` into a ``K``-set cover of coverage ``c``.

    The certificate bound is ``R2 + 2*r2`` where ``R1``/``R2`` are the largest
    bounds the provider reported at scales ``r`` and ``r2 = R1 + 3r``.  With
    ``linear_form=(a, b)`` (provider bounds at most ``a*rho + b*S``) the
    certificate also carries the closed form ``20a(6a+b(K+2))r``.
    """
    return stitch_with_trace(g, f, provider, K, c, r, linear_form)[0]


InnerCover = Callable[[WeightedGraph, np.ndarray, float, float], Cover]


def intrinsic_adapter(
    g: WeightedGraph,
    f: RealProjection,
    interval: tuple[float, float],
    rho: float,
    inner: InnerCover,
) -> Cover:
    """Cover the preimage of ``[a, b)`` using an intrinsic cover of the preimage of ``[a-rho, b+rho)``.

    ``inner(h, mapping, span, rho)`` covers the induced subgraph ``h`` (whose
    vertex ``i`` is ``mapping[i]`` in ``g``) in its own shortest-path metric.
    Sets are restricted back to the slab; the bound is the inner bound for the
    widened span ``(b - a) + 2*rho``.
    """
    a, b = interval
    values = f.values
    wide = np.flatnonzero((values >= a - rho - EPS) & (values < b + rho - EPS))
    inside = (values >= a - EPS) & (values < b - EPS)
    h, mapping = induced_subgraph(g, wide)
    span = (b - a) + 2 * rho
    inner_cover = inner(h, mapping, span, rho)
    sets = []
    for s in inner_cover.sets:
        orig = mapping[s]
        sets.append(orig[inside[orig]])
    params = dict(inner_cover.certificate.parameters)
    params["span"] = span
    cert = Certificate(rho, inner_cover.certificate.claimed_bound, inner_cover.certificate.claimed_coverage,
                       None, inner_cover.certificate.scheme_name, params)
    return Cover(sets, cert, g.vertex_count)


def slab_provider(g: WeightedGraph, f: RealProjection, inner: InnerCover) -> SlabProvider:
    """Provider that answers every request through :func:`intrinsic_adapter`."""

    def provide(req: SlabRequest) -> Cover:
        return intrinsic_adapter(g, f, req.interval, req.rho, inner)

    return provide


def union_bound_holds(
    oracle: DistanceOracle,
    f: RealProjection,
    a1: np.ndarray,
    a2: np.ndarray,
    r1: float,
    s1: float,
    R2: float,
    r2: float,
) -> bool:
    """Check that every ``(r1, s1)``-component of ``a1 | a2`` has weak diameter at most ``R2 + 2*r2``."""
    union = np.union1d(a1, a2)
    for comp in rs_components(oracle, f, union, r1, s1):
        if len(comp) > 1 and oracle.block(comp).max() > R2 + 2 * r2 + EPS:
            return False
    return True
