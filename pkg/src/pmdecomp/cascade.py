"""Truncated transitive cascades inside a computed component."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .cellgraph import CellGraph, Component, forward_reach, grand_orbit_component
from .pwmap import BULLET
from .ratset import ClosedIntervalSet, OpenIntervalSet, closure, interior

MUTUALLY_COFINAL = "MutuallyCofinal"
DISJOINT = "Disjoint"
UNKNOWN = "Unknown"


class EmptyStage(RuntimeError):
    """A stage came out empty: the component is not minimal at this resolution."""

    def __init__(self, index: int, partial: "Cascade"):
        super().__init__(f"stage {index} is empty")
        self.index = index
        self.partial = partial


class DomainMismatch(RuntimeError):
    def __init__(self, domain: OpenIntervalSet, component: OpenIntervalSet):
        super().__init__(f"cascade domain {domain} differs from component {component}")
        self.domain = domain
        self.component = component


@dataclass
class Cascade:
    graph: CellGraph
    component: Component
    basis: List[int]  # cell indices, sorted by left endpoint
    reach: List[frozenset]  # forward saturation of each basis cell
    stages: List[OpenIntervalSet]
    stage_cells: List[frozenset]
    depth: Optional[int]

    def to_json(self) -> dict:
        return {
            "basis": [[str(lo), str(hi)] for lo, hi in map(self.graph.cell, self.basis)],
            "stages": [s.to_json() for s in self.stages],
            "saturation_depth": self.depth,
        }


@dataclass
class CoreReport:
    closed: ClosedIntervalSet
    diamond: OpenIntervalSet
    status: str
    matching_stage: Optional[int]  # 1-based

    def to_json(self) -> dict:
        return {
            "core": self.closed.to_json(),
            "diamond": self.diamond.to_json(),
            "status": self.status,
            "matching_stage": self.matching_stage,
        }


def build_cascade(
    graph: CellGraph, component: Component, m: int = 4, depth: Optional[int] = None
) -> Cascade:
    if m < 1:
        raise ValueError("m must be at least 1")
    basis = sorted(component.cells)[:m]
    reach, stages, stage_cells = [], [], []
    current: Optional[frozenset] = None
    for n, cell in enumerate(basis, start=1):
        hull = forward_reach(graph, [cell], depth)
        reach.append(hull)
        current = hull if current is None else current & hull
        stage_cells.append(current)
        stages.append(graph.region(current))
        if not current:
            raise EmptyStage(n, Cascade(graph, component, basis[:n], reach, stages, stage_cells, depth))
    return Cascade(graph, component, basis, reach, stages, stage_cells, depth)


def core(c: Cascade, n: Optional[int] = None) -> CoreReport:
    n = len(c.stages) if n is None else n
    if not 1 <= n <= len(c.stages):
        raise ValueError(f"N must lie in 1..{len(c.stages)}")
    closed = closure(c.stages[0])
    for stage in c.stages[1:n]:
        closed = _intersect_closed(closed, closure(stage))
    dia = interior(closed)
    # interior of a closed union of cells merges touching pieces, so it is
    # already the diamond
    match = next((k + 1 for k, s in enumerate(c.stages[:n]) if s == dia), None)
    # stabilized only means the last two computed stages agree
    status = "stabilized" if n >= 2 and c.stages[n - 1] == c.stages[n - 2] else "truncated"
    return CoreReport(closed, dia, status, match)


def _intersect_closed(a: ClosedIntervalSet, b: ClosedIntervalSet) -> ClosedIntervalSet:
    out = []
    i = j = 0
    A, B = a.intervals, b.intervals
    while i < len(A) and j < len(B):
        lo, hi = max(A[i][0], B[j][0]), min(A[i][1], B[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return ClosedIntervalSet(out)


def domain(c: Cascade, n: int = 1) -> OpenIntervalSet:
    """Cell-level diamond of the grand-orbit hull of stage n."""
    hull = grand_orbit_component(c.graph, c.stage_cells[n - 1])
    region = c.graph.region(hull)
    if region != c.component.region:
        raise DomainMismatch(region, c.component.region)
    return region


def equivalent(c1: Cascade, c2: Cascade) -> str:
    if c1.graph.delta != c2.graph.delta:
        raise ValueError("cascades built at different resolutions")
    if c1.component.region != c2.component.region:
        return DISJOINT
    for p in range(len(c1.stage_cells)):
        if p >= len(c2.stage_cells):
            return UNKNOWN
        if not any(c1.stage_cells[q] <= c2.stage_cells[p] for q in range(len(c1.stage_cells))):
            return UNKNOWN
        if not any(c2.stage_cells[r] <= c1.stage_cells[p] for r in range(len(c2.stage_cells))):
            return UNKNOWN
    return MUTUALLY_COFINAL


def typical_target_membership(model, x, c: Cascade, horizon: int) -> List[Optional[int]]:
    """For each stage, the least m <= horizon with f^m(x) in it, else None."""
    orbit = model.forward_orbit(Fraction(x), horizon)
    hits: List[Optional[int]] = []
    for stage in c.stages:
        hit = None
        for m, y in enumerate(orbit):
            if y is BULLET:
                break
            if y in stage:
                hit = m
                break
        hits.append(hit)
    return hits


def summarize(graph: CellGraph, component: Component, m: int = 4, n: Optional[int] = None,
              depth: Optional[int] = None) -> dict:
    """Build, core and domain for one component, as report JSON."""
    try:
        c = build_cascade(graph, component, m, depth)
    except EmptyStage as exc:
        return {"error": "EmptyStage", "stage": exc.index, "cascade": exc.partial.to_json()}
    out = c.to_json()
    out["core"] = core(c, n).to_json()
    try:
        out["domain"] = domain(c).to_json()
    except DomainMismatch as exc:
        out["error"] = "DomainMismatch"
        out["domain"] = exc.domain.to_json()
    return out


__all__ = [
    "Cascade",
    "CoreReport",
    "EmptyStage",
    "DomainMismatch",
    "build_cascade",
    "core",
    "domain",
    "equivalent",
    "typical_target_membership",
    "summarize",
]
