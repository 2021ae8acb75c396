"""Piecewise affine interval maps and the modified map that kills S."""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from .ratset import (
    ClosedIntervalSet,
    FinitePointSet,
    OpenIntervalSet,
    format_rational,
    remove_points,
    to_rational,
)


class _Bullet:
    """The absorbing state every orbit enters once it touches S."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BULLET"

    def __reduce__(self):
        return (_Bullet, ())


BULLET = _Bullet()
OrbitPoint = Union[Fraction, _Bullet]


class ModelError(ValueError):
    code = "InvalidModel"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_json(self) -> dict:
        return {"error": self.code, "message": self.message}


class NonMonotonePiece(ModelError):
    code = "NonMonotonePiece"


class EscapesDomain(ModelError):
    code = "EscapesDomain"


class SMissingBreakpoint(ModelError):
    code = "SMissingBreakpoint"


class BadBreakpoints(ModelError):
    code = "BadBreakpoints"


class OutOfDomain(ModelError):
    code = "OutOfDomain"


@dataclass(frozen=True)
class PiecewiseAffineMap:
    breakpoints: Tuple[Fraction, ...]
    pieces: Tuple[Tuple[Fraction, Fraction], ...]  # (slope, intercept) per gap

    @classmethod
    def from_strings(cls, breakpoints: Iterable, pieces: Iterable) -> "PiecewiseAffineMap":
        return cls(
            tuple(to_rational(b) for b in breakpoints),
            tuple((to_rational(a), to_rational(b)) for a, b in pieces),
        )


@dataclass(frozen=True)
class Model:
    """A validated map together with its exceptional set S."""

    map: PiecewiseAffineMap
    S: FinitePointSet
    piece_images: Tuple[Tuple[Fraction, Fraction], ...] = field(repr=False)

    @property
    def breakpoints(self) -> Tuple[Fraction, ...]:
        return self.map.breakpoints

    @property
    def pieces(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        return self.map.pieces

    @property
    def lo(self) -> Fraction:
        return self.map.breakpoints[0]

    @property
    def hi(self) -> Fraction:
        return self.map.breakpoints[-1]

    @property
    def domain(self) -> ClosedIntervalSet:
        return ClosedIntervalSet([(self.lo, self.hi)])

    @property
    def interior(self) -> OpenIntervalSet:
        return OpenIntervalSet([(self.lo, self.hi)])

    def piece_index(self, x: Fraction) -> int:
        """Index of the piece whose open gap contains x (x must not be a breakpoint)."""
        return bisect_right(self.map.breakpoints, x) - 1

    # evaluation -------------------------------------------------------------

    @cached_property
    def _extra(self) -> frozenset:
        """Points of S that are not breakpoints."""
        bps = set(self.map.breakpoints)
        return frozenset(p for p in self.S if p not in bps)

    def eval(self, x: OrbitPoint) -> OrbitPoint:
        if x is BULLET:
            return BULLET
        if not isinstance(x, Fraction):
            x = Fraction(x)
        bps = self.map.breakpoints
        if x < bps[0] or x > bps[-1]:
            raise OutOfDomain(f"{x} lies outside [{self.lo}, {self.hi}]")
        # one bisection both finds the piece and detects breakpoints
        i = bisect_right(bps, x) - 1
        if bps[i] == x or (self._extra and x in self._extra):
            return BULLET
        a, b = self.map.pieces[i]
        return a * x + b

    __call__ = eval

    def forward_orbit(self, x: OrbitPoint, n: int) -> List[OrbitPoint]:
        out = [x if x is BULLET else Fraction(x)]
        for _ in range(n):
            out.append(self.eval(out[-1]))
        return out

    # set images -------------------------------------------------------------

    def _fragments(self, o: OpenIntervalSet):
        """Split O at S; yield (piece index, lo, hi) for each open fragment."""
        for lo, hi in o.intervals:
            lo = max(lo, self.lo)
            hi = min(hi, self.hi)
            if lo >= hi:
                continue
            # S holds every breakpoint, so each fragment sits inside one gap
            cuts = [lo, *self.S.inside(lo, hi), hi]
            for u, v in zip(cuts, cuts[1:]):
                yield self.piece_index(u), u, v

    def image_mod(self, o: OpenIntervalSet) -> OpenIntervalSet:
        """f(O minus S), an open set."""
        out = []
        for k, u, v in self._fragments(o):
            a, b = self.map.pieces[k]
            y0, y1 = a * u + b, a * v + b
            out.append((y0, y1) if y0 < y1 else (y1, y0))
        return OpenIntervalSet(out)

    def preimage(self, o: OpenIntervalSet) -> OpenIntervalSet:
        """f^{-1}(O), an open subset of X minus S."""
        if not o:
            return o
        out = []
        bps = self.map.breakpoints
        for k, (a, b) in enumerate(self.map.pieces):
            ylo, yhi = self.piece_images[k]
            for idx in o.overlapping(ylo, yhi):
                lo, hi = o.intervals[idx]
                lo, hi = max(lo, ylo), min(hi, yhi)
                x0, x1 = (lo - b) / a, (hi - b) / a
                if x0 > x1:
                    x0, x1 = x1, x0
                out.append((max(x0, bps[k]), min(x1, bps[k + 1])))
        raw = OpenIntervalSet(p for p in out if p[0] < p[1])
        return remove_points(raw, self.S)

    def preimage_points(self, y: OrbitPoint) -> FinitePointSet:
        if y is BULLET:
            return FinitePointSet()
        y = Fraction(y)
        bps = self.map.breakpoints
        pts = []
        for k, (a, b) in enumerate(self.map.pieces):
            x = (y - b) / a
            if bps[k] < x < bps[k + 1] and x not in self.S:
                pts.append(x)
        return FinitePointSet(pts)

    # serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        extra = [p for p in self.S if p not in set(self.map.breakpoints)]
        return {
            "breakpoints": [format_rational(b) for b in self.map.breakpoints],
            "pieces": [
                {"slope": format_rational(a), "intercept": format_rational(b)}
                for a, b in self.map.pieces
            ],
            "extra_exceptional": [format_rational(p) for p in extra],
        }


def validate(m: PiecewiseAffineMap, S: Optional[Iterable] = None) -> Model:
    bps = m.breakpoints
    if len(bps) < 2:
        raise BadBreakpoints("need at least two breakpoints")
    if any(u >= v for u, v in zip(bps, bps[1:])):
        raise BadBreakpoints("breakpoints must be strictly increasing")
    if len(m.pieces) != len(bps) - 1:
        raise BadBreakpoints(f"{len(bps) - 1} gaps but {len(m.pieces)} pieces")
    lo, hi = bps[0], bps[-1]
    images = []
    for k, (a, b) in enumerate(m.pieces):
        if a == 0:
            raise NonMonotonePiece(f"piece {k} on ({bps[k]}, {bps[k + 1]}) has slope 0")
        y0, y1 = a * bps[k] + b, a * bps[k + 1] + b
        y0, y1 = min(y0, y1), max(y0, y1)
        if y0 < lo or y1 > hi:
            raise EscapesDomain(
                f"piece {k} maps ({bps[k]}, {bps[k + 1]}) onto ({y0}, {y1}), outside [{lo}, {hi}]"
            )
        images.append((y0, y1))
    if S is None:
        pts = FinitePointSet(bps)
    else:
        pts = S if isinstance(S, FinitePointSet) else FinitePointSet(S)
        missing = [b for b in bps if b not in pts]
        if missing:
            raise SMissingBreakpoint(
                "S must contain every breakpoint; missing " + ", ".join(map(str, missing))
            )
        outside = [p for p in pts if p < lo or p > hi]
        if outside:
            raise OutOfDomain("exceptional points outside the domain: " + ", ".join(map(str, outside)))
    return Model(m, pts, tuple(images))


def model_from_json(data: dict) -> Model:
    try:
        bps = data["breakpoints"]
        pieces = [(p["slope"], p["intercept"]) for p in data["pieces"]]
    except (KeyError, TypeError) as exc:
        raise BadBreakpoints(f"malformed map config: {exc}") from None
    m = PiecewiseAffineMap.from_strings(bps, pieces)
    extra = [to_rational(x) for x in data.get("extra_exceptional", [])]
    return validate(m, FinitePointSet([*m.breakpoints, *extra]))


def load_model(path: Union[str, Path]) -> Model:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


MAPS_DIR = Path(__file__).with_name("maps")


def bundled(name: str) -> Model:
    """Load one of the shipped configs: tent, two_component, h_prime, contraction."""
    return load_model(MAPS_DIR / f"{name}.json")
