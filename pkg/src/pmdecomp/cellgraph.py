"""Cell-level discretization of the modified map.

The domain is cut at S and at a uniform grid of step ``delta``.  Each open
cell sits inside a single affine piece, so its image is one open interval and
its successors are a contiguous run of cells.  Fully invariant hulls become
undirected reachability in this graph.
"""
from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .invariants import ComplexityExceeded, complexity_cap, inv
from .pwmap import BULLET, Model
from .ratset import (
    FinitePointSet,
    OpenIntervalSet,
    complement_in,
    diamond,
    intersect,
    union,
)

SUPPORTED = "Supported"
REFUTED = "RefutedAtResolution"
UNKNOWN = "Unknown"

NONDEGENERATE = "NonDegenerate"
SHRINKS = "ShrinksToNowhereDense"

# denominator for pseudo-random rational orbit starts; prime, so the orbit
# denominators rarely collide with those of S
SAMPLE_DENOMINATOR = 1_000_003


def default_delta(model: Model) -> Fraction:
    return (model.hi - model.lo) / 1024


class CellGraph:
    """Forward transition graph on the cells of one partition."""

    def __init__(self, model: Model, delta: Fraction, cuts: Sequence[Fraction]):
        self.model = model
        self.delta = delta
        self.cuts: Tuple[Fraction, ...] = tuple(cuts)
        n = len(self.cuts) - 1
        self.succ: List[range] = []
        self.pred: List[List[int]] = [[] for _ in range(n)]
        for i in range(n):
            lo, hi = self.cuts[i], self.cuts[i + 1]
            a, b = model.pieces[model.piece_index(lo)]
            y0, y1 = a * lo + b, a * hi + b
            if y0 > y1:
                y0, y1 = y1, y0
            first = bisect_right(self.cuts, y0) - 1
            last = bisect_left(self.cuts, y1) - 1
            targets = range(first, last + 1)
            self.succ.append(targets)
            for j in targets:
                self.pred[j].append(i)
        self._labels: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.cuts) - 1

    def cell(self, i: int) -> Tuple[Fraction, Fraction]:
        return self.cuts[i], self.cuts[i + 1]

    def cell_of(self, x: Fraction) -> Optional[int]:
        """Index of the open cell containing x, or None when x is a cut."""
        i = bisect_right(self.cuts, x) - 1
        if i < 0 or i >= len(self) or self.cuts[i] == x:
            return None
        return i

    def cells_meeting(self, lo: Fraction, hi: Fraction) -> range:
        start = max(bisect_right(self.cuts, lo) - 1, 0)
        stop = min(bisect_left(self.cuts, hi), len(self))
        return range(start, stop)

    def cells_inside(self, region: OpenIntervalSet) -> List[int]:
        out = []
        for lo, hi in region:
            i = bisect_left(self.cuts, lo)
            j = bisect_right(self.cuts, hi) - 1
            out.extend(range(i, j))
        return out

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, targets in enumerate(self.succ) for j in targets]

    def region(self, cells: Iterable[int]) -> OpenIntervalSet:
        """diamond of the union of the given cells."""
        idx = sorted(set(cells))
        runs: list = []
        for i in idx:
            if runs and runs[-1][1] == i:
                runs[-1][1] = i + 1
            else:
                runs.append([i, i + 1])
        return OpenIntervalSet._trusted([(self.cuts[a], self.cuts[b]) for a, b in runs])

    def block_labels(self) -> np.ndarray:
        """Weakly connected component label of every cell."""
        if self._labels is None:
            _, self._labels = connected_components(self._matrix(), directed=True, connection="weak")
        return self._labels

    def _matrix(self, cells: Optional[Sequence[int]] = None) -> csr_matrix:
        if cells is None:
            n = len(self)
            pairs = self.edges()
        else:
            pos = {c: k for k, c in enumerate(cells)}
            n = len(cells)
            pairs = [(pos[i], pos[j]) for i in cells for j in self.succ[i] if j in pos]
        if not pairs:
            return csr_matrix((n, n), dtype=np.int8)
        rows, cols = zip(*pairs)
        return csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))


def build(model: Model, delta=None, cap: Optional[int] = None) -> CellGraph:
    delta = Fraction(delta) if delta is not None else default_delta(model)
    if delta <= 0:
        raise ValueError("delta must be positive")
    cap = cap or complexity_cap()
    span = model.hi - model.lo
    steps = -(-span // delta)  # ceil
    if steps + len(model.S) > cap:
        raise ComplexityExceeded("cell count", int(steps + len(model.S)), cap)
    grid = {model.lo + j * delta for j in range(int(steps))}
    cuts = sorted(grid | set(model.S.points) | {model.hi})
    return CellGraph(model, delta, cuts)


def grand_orbit_component(graph: CellGraph, seeds: Iterable[int]) -> FrozenSet[int]:
    """Smallest cell set containing the seeds, closed under successors and predecessors."""
    seen = set(seeds)
    stack = list(seen)
    while stack:
        i = stack.pop()
        for j in graph.succ[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
        for j in graph.pred[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return frozenset(seen)


def forward_reach(graph: CellGraph, seeds: Iterable[int], depth: Optional[int] = None) -> FrozenSet[int]:
    """Cells reachable in at most ``depth`` steps (to the fixed point when None)."""
    seen = set(seeds)
    frontier = list(seen)
    level = 0
    while frontier and (depth is None or level < depth):
        nxt = []
        for i in frontier:
            for j in graph.succ[i]:
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
        level += 1
    return frozenset(seen)


# backward point clouds of S ----------------------------------------------------


@dataclass(frozen=True)
class Cloud:
    """Exact backward orbit of one point of S, truncated at depth or size."""

    center: Fraction
    points: Tuple[Fraction, ...]
    finite: bool  # the preimage tree died out: the hull is nowhere dense
    depth: int


def backward_cloud(model: Model, c: Fraction, depth: int, budget: int) -> Cloud:
    seen = {c}
    frontier = [c]
    level = 0
    while frontier and level < depth:
        nxt = []
        for p in frontier:
            for q in model.preimage_points(p):
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
            if len(seen) >= budget:
                # hard stop mid-level; the tree is still alive
                return Cloud(c, tuple(sorted(seen)), False, level + 1)
        frontier = nxt
        level += 1
    return Cloud(c, tuple(sorted(seen)), not frontier, level)


# decomposition -------------------------------------------------------------------


@dataclass
class TransitivityReport:
    verdict: str
    scc_count: int
    covered: int = 0
    required: int = 0
    witness: Optional[OpenIntervalSet] = None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "scc_count": self.scc_count,
            "covered_cells": self.covered,
            "required_cells": self.required,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


@dataclass
class Component:
    witnesses: Tuple[Fraction, ...]
    region: OpenIntervalSet
    cells: FrozenSet[int] = field(repr=False)
    transitivity: Optional[TransitivityReport] = None

    def to_json(self) -> dict:
        return {
            "witnesses": [str(c) for c in self.witnesses],
            "region": self.region.to_json(),
            "cell_count": len(self.cells),
            "transitivity": self.transitivity.to_json() if self.transitivity else None,
        }


@dataclass
class Decomposition:
    sigma: OpenIntervalSet
    zed: OpenIntervalSet
    components: List[Component]
    delta: Fraction
    depth: int
    cell_count: int
    clouds: Dict[Fraction, Cloud] = field(repr=False, default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def cloud_status(self) -> str:
        return "stabilized" if all(c.finite for c in self.clouds.values()) else "truncated"

    def regions(self) -> List[OpenIntervalSet]:
        return [c.region for c in self.components]

    def component_of(self, x: Fraction) -> Optional[int]:
        for k, comp in enumerate(self.components):
            if x in comp.region:
                return k
        return None

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.to_json(),
            "zed": self.zed.to_json(),
            "components": [c.to_json() for c in self.components],
            "delta": str(self.delta),
            "depth": self.depth,
            "cell_count": self.cell_count,
            "cloud_status": self.cloud_status,
            "witness_clouds": {
                str(c): {"size": len(cl.points), "finite": cl.finite, "depth": cl.depth}
                for c, cl in sorted(self.clouds.items())
            },
            "notes": list(self.notes),
        }


def _side_cells(graph: CellGraph, c: Fraction) -> List[int]:
    k = bisect_left(graph.cuts, c)
    out = []
    if k > 0:
        out.append(k - 1)
    if k < len(graph):
        out.append(k)
    return out


def _blocks_for(graph: CellGraph, cloud: Cloud) -> List[int]:
    """Blocks abutting c that actually contain part of c's backward orbit."""
    if cloud.finite:
        return []
    labels = graph.block_labels()
    found = set()
    for p in cloud.points:
        if p == cloud.center:
            continue
        i = graph.cell_of(p)
        if i is not None:
            found.add(int(labels[i]))
            continue
        k = bisect_left(graph.cuts, p)
        if 0 < k < len(graph) and labels[k - 1] == labels[k]:
            found.add(int(labels[k]))
    sides = [int(labels[i]) for i in _side_cells(graph, cloud.center)]
    return sorted({b for b in sides if b in found})


def components_from_witnesses(
    graph: CellGraph, witnesses: Iterable[Fraction], depth: int = 12, budget: int = 2_000,
    clouds: Optional[Dict[Fraction, Cloud]] = None,
) -> List[Component]:
    """Group witnesses whose accepted blocks overlap; one component per group."""
    labels = graph.block_labels()
    clouds = {} if clouds is None else clouds
    by_witness: Dict[Fraction, List[int]] = {}
    for c in sorted(set(witnesses)):
        if c not in clouds:
            clouds[c] = backward_cloud(graph.model, c, depth, budget)
        blocks = _blocks_for(graph, clouds[c])
        if blocks:
            by_witness[c] = blocks

    parent: Dict[int, int] = {}

    def find(b: int) -> int:
        while parent.setdefault(b, b) != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        return b

    for blocks in by_witness.values():
        for b in blocks[1:]:
            parent[find(b)] = find(blocks[0])

    groups: Dict[int, Tuple[set, set]] = {}
    for c, blocks in by_witness.items():
        root = find(blocks[0])
        wit, blk = groups.setdefault(root, (set(), set()))
        wit.add(c)
        blk.update(blocks)

    members: Dict[int, List[int]] = {}
    for i, lab in enumerate(labels):
        members.setdefault(int(lab), []).append(i)

    out = []
    for wit, blk in groups.values():
        cells = frozenset(i for b in blk for i in members[b])
        out.append(Component(tuple(sorted(wit)), graph.region(cells), cells))
    out.sort(key=lambda comp: comp.region.lo)
    return out


def minimal_components(
    model: Model,
    delta=None,
    depth: int = 12,
    graph: Optional[CellGraph] = None,
    transitivity: bool = True,
    samples: int = 8,
    steps: int = 4096,
    eps_cover=None,
    budget: int = 2_000,
) -> Decomposition:
    graph = graph or build(model, delta)
    clouds: Dict[Fraction, Cloud] = {}
    comps = components_from_witnesses(graph, model.S, depth, budget, clouds)
    sigma = OpenIntervalSet()
    for comp in comps:
        sigma = union(sigma, comp.region)
    sigma = diamond(sigma)
    zed = complement_in(sigma, model.domain)
    notes = []
    if not comps:
        notes.append("no evidence of minimal components in Sigma_f at this depth and resolution")
    if transitivity:
        for comp in comps:
            comp.transitivity = check_transitivity(graph, comp.region, samples, steps, eps_cover)
    return Decomposition(sigma, zed, comps, graph.delta, depth, len(graph), clouds, notes)


# transitivity --------------------------------------------------------------------


def check_transitivity(
    graph: CellGraph,
    region: OpenIntervalSet,
    samples: int = 8,
    steps: int = 4096,
    eps_cover=None,
    seed: int = 0,
) -> TransitivityReport:
    """Three-valued transitivity verdict for a regular open region.

    Refuted when the forward graph restricted to the region has more than one
    strongly connected component; the first sink SCC is the witness of a
    proper invariant subset.  Supported needs a single SCC plus one exact
    sampled orbit that visits every eps_cover-cell of the region.
    """
    cells = graph.cells_inside(region)
    if not cells:
        return TransitivityReport(UNKNOWN, 0)
    n_scc, labels = connected_components(graph._matrix(cells), directed=True, connection="strong")
    if n_scc > 1:
        pos = {c: k for k, c in enumerate(cells)}
        leaks = set()
        for c in cells:
            for j in graph.succ[c]:
                if j in pos and labels[pos[j]] != labels[pos[c]]:
                    leaks.add(int(labels[pos[c]]))
        sinks = [s for s in range(n_scc) if s not in leaks]
        best = min(sinks, key=lambda s: min(c for k, c in enumerate(cells) if labels[k] == s))
        witness = graph.region(c for k, c in enumerate(cells) if labels[k] == best)
        return TransitivityReport(REFUTED, int(n_scc), witness=witness)

    eps = Fraction(eps_cover) if eps_cover is not None else 4 * graph.delta
    model = graph.model
    required = set()
    for lo, hi in region:
        j0 = (lo - model.lo) // eps
        j1 = -(-(hi - model.lo) // eps)
        required.update(range(int(j0), int(j1)))
    rng = random.Random(seed)
    best = 0
    for _ in range(samples):
        lo, hi = region.intervals[rng.randrange(len(region))]
        x = lo + (hi - lo) * Fraction(rng.randrange(1, SAMPLE_DENOMINATOR), SAMPLE_DENOMINATOR)
        covered = set()
        seen = set()
        for _ in range(steps + 1):
            if x is BULLET or x in seen:
                break
            seen.add(x)
            if x in region:
                covered.add(int((x - model.lo) // eps))
                if len(covered) == len(required):
                    return TransitivityReport(SUPPORTED, 1, len(required), len(required))
            x = model.eval(x)
        best = max(best, len(covered & required))
    return TransitivityReport(UNKNOWN, 1, best, len(required))


# germs ---------------------------------------------------------------------------


@dataclass
class GermReport:
    center: Fraction
    radii: List[Fraction]
    hulls: List[OpenIntervalSet]
    verdict: str
    region: Optional[OpenIntervalSet] = None

    def to_json(self) -> dict:
        return {
            "center": str(self.center),
            "radii": [str(r) for r in self.radii],
            "hulls": [h.to_json() for h in self.hulls],
            "verdict": self.verdict,
            "region": self.region.to_json() if self.region is not None else None,
        }


def germ(
    model: Model,
    x,
    r0=None,
    levels: int = 8,
    delta=None,
    max_depth: int = 24,
    graph: Optional[CellGraph] = None,
) -> GermReport:
    """Shrinking-ball hulls around x, intersected level by level.

    Each hull is the diamond of the exact depth-bounded grand-orbit hull of
    the ball.  A final hull that still contains a whole cell and agrees with
    the previous level is NonDegenerate; one that contains no cell at all has
    shrunk below the resolution floor.
    """
    x = Fraction(x)
    graph = graph or build(model, delta)
    r = Fraction(r0) if r0 is not None else (model.hi - model.lo) / 16
    radii, hulls = [], []
    cumulative = None
    for _ in range(levels + 1):
        ball = intersect(OpenIntervalSet([(x - r, x + r)]), model.interior)
        try:
            hull = diamond(inv(model, ball, max_depth).set)
        except ComplexityExceeded:
            return GermReport(x, radii, hulls, UNKNOWN)
        cumulative = hull if cumulative is None else diamond(intersect(cumulative, hull))
        radii.append(r)
        hulls.append(cumulative)
        r /= 2
    final = hulls[-1]
    if not graph.cells_inside(final):
        return GermReport(x, radii, hulls, SHRINKS)
    if len(hulls) >= 2 and hulls[-1] == hulls[-2]:
        return GermReport(x, radii, hulls, NONDEGENERATE, final)
    return GermReport(x, radii, hulls, UNKNOWN)
