"""Exact rational interval sets.

Open sets are finite unions of open intervals with rational endpoints.
Touching intervals such as (0,1) and (1,2) are kept apart, so sets that are
open but not regular open can be represented; they only get merged by
:func:`diamond` and :func:`closure`.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Tuple, Union

RationalLike = Union[Fraction, int, str]
Pair = Tuple[Fraction, Fraction]

__all__ = [
    "Fraction",
    "to_rational",
    "format_rational",
    "OpenIntervalSet",
    "ClosedIntervalSet",
    "FinitePointSet",
    "normalize",
    "diamond",
    "closure",
    "interior",
    "boundary",
    "union",
    "intersect",
    "complement_in",
    "regular_difference",
    "remove_points",
    "meets",
    "is_regular_open",
]


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string such as '1/3'")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


class OpenIntervalSet:
    """Canonical finite union of open intervals.

    Intervals are sorted and pairwise disjoint; overlaps are merged but an
    exact touch ``hi_i == lo_{i+1}`` is preserved.
    """

    __slots__ = ("intervals", "_los", "_his")

    def __init__(self, intervals: Iterable[Tuple[RationalLike, RationalLike]] = ()):
        self.intervals: Tuple[Pair, ...] = _canonical_open(intervals)
        self._los = [lo for lo, _ in self.intervals]
        self._his = [hi for _, hi in self.intervals]

    @classmethod
    def _trusted(cls, pairs: Sequence[Pair]) -> "OpenIntervalSet":
        obj = cls.__new__(cls)
        obj.intervals = tuple(pairs)
        obj._los = [lo for lo, _ in obj.intervals]
        obj._his = [hi for _, hi in obj.intervals]
        return obj

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OpenIntervalSet):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(("open", self.intervals))

    def __repr__(self) -> str:
        body = ", ".join(f"({lo}, {hi})" for lo, hi in self.intervals)
        return f"OpenIntervalSet([{body}])"

    def __contains__(self, x: RationalLike) -> bool:
        x = Fraction(x)
        i = bisect_right(self._los, x) - 1
        return i >= 0 and self.intervals[i][0] < x < self.intervals[i][1]

    def __or__(self, other: "OpenIntervalSet") -> "OpenIntervalSet":
        return union(self, other)

    def __and__(self, other: "OpenIntervalSet") -> "OpenIntervalSet":
        return intersect(self, other)

    def __le__(self, other: "OpenIntervalSet") -> bool:
        return self.issubset(other)

    @property
    def lo(self) -> Fraction:
        return self.intervals[0][0]

    @property
    def hi(self) -> Fraction:
        return self.intervals[-1][1]

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def issubset(self, other: "OpenIntervalSet") -> bool:
        """Point-set inclusion."""
        for lo, hi in self.intervals:
            j = bisect_right(other._los, lo) - 1
            if j < 0 or other.intervals[j][1] < hi:
                return False
        return True

    def overlapping(self, lo: Fraction, hi: Fraction) -> range:
        """Indices of intervals having positive-length overlap with (lo, hi)."""
        start = bisect_right(self._his, lo)
        stop = bisect_left(self._los, hi)
        return range(start, stop)

    def to_json(self) -> list:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, data: Iterable[Sequence[str]]) -> "OpenIntervalSet":
        return cls((to_rational(lo), to_rational(hi)) for lo, hi in data)


class ClosedIntervalSet:
    """Finite union of closed intervals, maximally merged; points allowed."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Tuple[RationalLike, RationalLike]] = ()):
        raw = []
        for lo, hi in intervals:
            lo, hi = to_rational(lo), to_rational(hi)
            if lo > hi:
                raise ValueError(f"closed interval needs lo <= hi, got [{lo}, {hi}]")
            raw.append((lo, hi))
        raw.sort()
        merged: list = []
        for lo, hi in raw:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self.intervals: Tuple[Pair, ...] = tuple(merged)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClosedIntervalSet):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(("closed", self.intervals))

    def __repr__(self) -> str:
        body = ", ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals)
        return f"ClosedIntervalSet([{body}])"

    def __contains__(self, x: RationalLike) -> bool:
        x = Fraction(x)
        los = [lo for lo, _ in self.intervals]
        i = bisect_right(los, x) - 1
        return i >= 0 and x <= self.intervals[i][1]

    def to_json(self) -> list:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self.intervals]


class FinitePointSet:
    __slots__ = ("points",)

    def __init__(self, points: Iterable[RationalLike] = ()):
        self.points: Tuple[Fraction, ...] = tuple(sorted({to_rational(p) for p in points}))

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __bool__(self) -> bool:
        return bool(self.points)

    def __contains__(self, x: RationalLike) -> bool:
        x = Fraction(x)
        i = bisect_left(self.points, x)
        return i < len(self.points) and self.points[i] == x

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinitePointSet):
            return NotImplemented
        return self.points == other.points

    def __hash__(self) -> int:
        return hash(("points", self.points))

    def __repr__(self) -> str:
        return "FinitePointSet([" + ", ".join(str(p) for p in self.points) + "])"

    def __or__(self, other: "FinitePointSet") -> "FinitePointSet":
        return FinitePointSet(self.points + other.points)

    def inside(self, lo: Fraction, hi: Fraction) -> Tuple[Fraction, ...]:
        """Points strictly between lo and hi."""
        return self.points[bisect_right(self.points, lo):bisect_left(self.points, hi)]

    def to_json(self) -> list:
        return [format_rational(p) for p in self.points]


def _canonical_open(intervals: Iterable[Tuple[RationalLike, RationalLike]]) -> Tuple[Pair, ...]:
    raw = []
    for lo, hi in intervals:
        lo, hi = to_rational(lo), to_rational(hi)
        if lo >= hi:
            raise ValueError(f"open interval needs lo < hi, got ({lo}, {hi})")
        raw.append((lo, hi))
    raw.sort()
    out: list = []
    for lo, hi in raw:
        # strict overlap merges; an exact touch stays split
        if out and lo < out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(out)


def normalize(raw: Iterable[Tuple[RationalLike, RationalLike]]) -> OpenIntervalSet:
    return OpenIntervalSet(raw)


def diamond(o: OpenIntervalSet) -> OpenIntervalSet:
    """int(cl(O)): fill the isolated boundary points between touching pieces."""
    out: list = []
    for lo, hi in o.intervals:
        if out and lo == out[-1][1]:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return OpenIntervalSet._trusted(out)


def is_regular_open(o: OpenIntervalSet) -> bool:
    return all(o.intervals[i][1] < o.intervals[i + 1][0] for i in range(len(o.intervals) - 1))


def closure(o: OpenIntervalSet) -> ClosedIntervalSet:
    return ClosedIntervalSet(o.intervals)


def interior(f: ClosedIntervalSet) -> OpenIntervalSet:
    return OpenIntervalSet._trusted([(lo, hi) for lo, hi in f.intervals if lo < hi])


def boundary(o: OpenIntervalSet) -> FinitePointSet:
    """cl(O) minus O, i.e. every interval endpoint (touch points included)."""
    pts = []
    for lo, hi in o.intervals:
        pts.append(lo)
        pts.append(hi)
    return FinitePointSet(pts)


def union(a: OpenIntervalSet, b: OpenIntervalSet) -> OpenIntervalSet:
    if not a:
        return b
    if not b:
        return a
    return OpenIntervalSet._trusted(_canonical_open(a.intervals + b.intervals))


def intersect(a: OpenIntervalSet, b: OpenIntervalSet) -> OpenIntervalSet:
    out = []
    i = j = 0
    A, B = a.intervals, b.intervals
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if lo < hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return OpenIntervalSet._trusted(out)


def _subtract_closed(o: OpenIntervalSet, f: ClosedIntervalSet) -> OpenIntervalSet:
    """O minus a closed set F; the result is open."""
    out = []
    cuts = f.intervals
    his = [chi for _, chi in cuts]
    for lo, hi in o.intervals:
        cur = lo
        for clo, chi in cuts[bisect_left(his, lo):]:
            if clo >= hi:
                break
            if clo > cur:
                out.append((cur, clo))
            cur = max(cur, chi)
            if cur >= hi:
                break
        if cur < hi:
            out.append((cur, hi))
    return OpenIntervalSet._trusted(out)


def remove_points(o: OpenIntervalSet, points: Iterable[RationalLike]) -> OpenIntervalSet:
    """O minus a finite set of points."""
    pts = points if isinstance(points, FinitePointSet) else FinitePointSet(points)
    out = []
    for lo, hi in o.intervals:
        cur = lo
        for p in pts.inside(lo, hi):
            out.append((cur, p))
            cur = p
        out.append((cur, hi))
    return OpenIntervalSet._trusted(out)


def complement_in(o: OpenIntervalSet, x: ClosedIntervalSet) -> OpenIntervalSet:
    """int(X) minus cl(O)."""
    return _subtract_closed(interior(x), closure(o))


def regular_difference(o2: OpenIntervalSet, o1: OpenIntervalSet) -> OpenIntervalSet:
    """O2 minus cl(O1)."""
    return _subtract_closed(o2, closure(o1))


def meets(a: OpenIntervalSet, b: OpenIntervalSet) -> bool:
    i = j = 0
    A, B = a.intervals, b.intervals
    while i < len(A) and j < len(B):
        if max(A[i][0], B[j][0]) < min(A[i][1], B[j][1]):
            return True
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return False
