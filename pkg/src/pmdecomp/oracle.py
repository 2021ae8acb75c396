"""Brute-force orbit oracle.

Orbits are iterated exactly from a uniform rational grid.  A rational orbit
of a rational affine map either lands in S, revisits an earlier state, or
keeps growing its denominators; the step cap handles the last case.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .cellgraph import CellGraph, Decomposition
from .pwmap import BULLET, Model
from .ratset import FinitePointSet, closure

HIT_BULLET = "HitBullet"
SURVIVING = "Surviving"


@dataclass
class OrbitSample:
    start: Fraction
    steps: int
    fate: str
    bullet_step: Optional[int]
    points: Tuple[Fraction, ...]  # distinct states before the orbit dies or cycles
    cycle_start: Optional[int]  # index into points where the cycle begins
    tail: FrozenSet = field(default_factory=frozenset)
    histogram: Dict[int, int] = field(default_factory=dict)
    tail_cells: FrozenSet = field(default_factory=frozenset)

    @property
    def surviving(self) -> bool:
        return self.fate == SURVIVING

    def at(self, n: int):
        """f^n(start), reconstructed from the stored prefix and cycle."""
        if n < len(self.points):
            return self.points[n]
        if self.cycle_start is None:
            if self.bullet_step is not None:
                return BULLET
            raise IndexError(n)
        period = len(self.points) - self.cycle_start
        return self.points[self.cycle_start + (n - self.cycle_start) % period]


def iterate(model: Model, x: Fraction, steps: int) -> OrbitSample:
    # keyed by (numerator, denominator): hashing huge Fractions is slow
    index: Dict[Tuple[int, int], int] = {}
    points: List[Fraction] = []
    y = x
    bullet_step = None
    cycle_start = None
    for n in range(steps + 1):
        if y is BULLET:
            bullet_step = n
            break
        key = (y.numerator, y.denominator)
        if key in index:
            cycle_start = index[key]
            break
        index[key] = n
        points.append(y)
        y = model.eval(y)
    fate = HIT_BULLET if bullet_step is not None else SURVIVING
    sample = OrbitSample(x, steps, fate, bullet_step, tuple(points), cycle_start)
    if fate == SURVIVING:
        if cycle_start is None:
            tail = points[steps // 2:]
        elif steps // 2 >= cycle_start:
            tail = points[cycle_start:]
        else:
            tail = points[steps // 2:]
        sample.tail = frozenset(tail)
    return sample


def sweep(model: Model, grid_n: int, steps: int, graph: Optional[CellGraph] = None) -> List[OrbitSample]:
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    span = model.hi - model.lo
    out = []
    for i in range(grid_n + 1):
        x = model.lo + span * Fraction(i, grid_n)
        if x in model.S:
            continue
        sample = iterate(model, x, steps)
        if graph is not None:
            hist: Counter = Counter()
            for n in range(min(steps + 1, sample.bullet_step or steps + 1)):
                cell = graph.cell_of(sample.at(n))
                if cell is not None:
                    hist[cell] += 1
            sample.histogram = dict(sorted(hist.items()))
            sample.tail_cells = frozenset(
                c for c in (graph.cell_of(p) for p in sample.tail) if c is not None
            )
        out.append(sample)
    return out


@dataclass
class OracleVerdict:
    counts: List[int]
    surviving: int
    relevant: int
    outside_sigma: int
    agreement: Optional[float]
    violators: List[dict]
    diagnostics: List[dict]
    max_gap: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "component_counts": self.counts,
            "surviving": self.surviving,
            "relevant": self.relevant,
            "outside_sigma": self.outside_sigma,
            "agreement": self.agreement,
            "violators": self.violators,
            "diagnostics": self.diagnostics,
            "max_gap": None if self.max_gap is None else str(self.max_gap),
        }


def validate(decomp: Decomposition, samples: Iterable[OrbitSample], S: Optional[FinitePointSet] = None) -> OracleVerdict:
    samples = list(samples)
    regions = decomp.regions()
    closures = [closure(r) for r in regions]
    counts = [0] * len(regions)
    violators = []
    surviving = relevant = agree = outside = 0
    # per interior point c of S: (tail seen left, tail seen right, some tail on both sides)
    cuts = [sorted(p for p in (S or ()) if p in r) for r in regions]
    sides = [{c: [False, False, False] for c in pts} for pts in cuts]

    for s in samples:
        home = decomp.component_of(s.start)
        if home is not None:
            bad = [p for p in s.points if p not in closures[home]]
            if bad:
                violators.append({"start": str(s.start), "component": home, "escape": str(bad[0])})
        if not s.surviving:
            continue
        surviving += 1
        if home is None:
            outside += 1
            continue
        relevant += 1
        votes = Counter(k for p in s.tail for k, cl in enumerate(closures) if p in cl)
        if votes:
            k, _ = max(votes.items(), key=lambda kv: (kv[1], -kv[0]))
            counts[k] += 1
            if all(p in closures[k] for p in s.tail):
                agree += 1
        for c, flags in sides[home].items():
            left = any(p < c for p in s.tail)
            right = any(p > c for p in s.tail)
            flags[0] |= left
            flags[1] |= right
            flags[2] |= left and right

    diagnostics = []
    for k, per_cut in enumerate(sides):
        split = [c for c, (left, right, both) in per_cut.items() if left and right and not both]
        if split:
            diagnostics.append({
                "kind": "SplitPossible",
                "component": k,
                "cuts": [str(c) for c in split],
                "message": "no surviving tail visits both sides of these points of S",
            })
    agreement = agree / relevant if relevant else None
    return OracleVerdict(counts, surviving, relevant, outside, agreement, violators, diagnostics)


def gap_statistics(cloud: Iterable, lo: Fraction, hi: Fraction) -> Tuple[Fraction, Dict[Fraction, int]]:
    """Largest gap between consecutive cloud points, domain ends included."""
    pts = [lo, *sorted(p for p in set(cloud) if lo <= p <= hi), hi]
    gaps = [b - a for a, b in zip(pts, pts[1:]) if b > a]
    hist = Counter(gaps)
    return (max(gaps) if gaps else Fraction(0)), dict(sorted(hist.items()))


def write_csv(path, samples: Iterable[OrbitSample], decomp: Decomposition) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start", "fate", "bullet_step", "component"])
        for s in samples:
            comp = decomp.component_of(s.start)
            w.writerow([str(s.start), s.fate, "" if s.bullet_step is None else s.bullet_step,
                        "" if comp is None else f"component_{comp}"])
