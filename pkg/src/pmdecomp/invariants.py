"""Depth-bounded invariant hulls.

None of the hulls below is finitely reachable in general (the backward orbit
of 1/2 under the tent map is every dyadic rational), so every operator stops
at ``max_depth`` and reports whether it actually hit a fixed point.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .pwmap import BULLET, Model
from .ratset import (
    FinitePointSet,
    OpenIntervalSet,
    complement_in,
    intersect,
    remove_points,
    union,
)

STABILIZED = "stabilized"
TRUNCATED = "truncated"
UNDER = "under"
OVER = "over"

DEFAULT_CAP = 100_000


def complexity_cap() -> int:
    value = os.environ.get("PMDECOMP_CELL_CAP")
    return int(value) if value else DEFAULT_CAP


class ComplexityExceeded(RuntimeError):
    """Raised when an interval/point/cell count passes the cap.

    ``partial`` carries whatever was computed before the abort.
    """

    def __init__(self, what: str, size: int, cap: int, partial=None):
        super().__init__(f"{what}: {size} exceeds complexity cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap
        self.partial = partial


@dataclass(frozen=True)
class BoundedResult:
    set: OpenIntervalSet
    status: str
    depth: int
    direction: str = UNDER

    @property
    def stabilized(self) -> bool:
        return self.status == STABILIZED

    def to_json(self) -> dict:
        return {
            "set": self.set.to_json(),
            "status": self.status,
            "depth": self.depth,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class PointCloudResult:
    points: FinitePointSet
    status: str
    depth: int
    direction: str = UNDER

    @property
    def stabilized(self) -> bool:
        return self.status == STABILIZED

    def to_json(self) -> dict:
        return {
            "points": self.points.to_json(),
            "status": self.status,
            "depth": self.depth,
            "direction": self.direction,
        }


Seed = Union[OpenIntervalSet, FinitePointSet]


def _check(size: int, cap: int, what: str, partial) -> None:
    if size > cap:
        raise ComplexityExceeded(what, size, cap, partial)


def _saturate_open(seed: OpenIntervalSet, steps, max_depth: int, cap: int) -> BoundedResult:
    current = seed
    for depth in range(max_depth):
        grown = current
        for step in steps:
            grown = union(grown, step(grown))
        if grown == current:
            return BoundedResult(current, STABILIZED, depth)
        _check(len(grown), cap, "interval count", BoundedResult(current, TRUNCATED, depth))
        current = grown
    # one extra probe so a set that is already closed reports as such
    probe = current
    for step in steps:
        probe = union(probe, step(probe))
    status = STABILIZED if probe == current else TRUNCATED
    return BoundedResult(current, status, max_depth)


def _saturate_points(seed: FinitePointSet, steps, max_depth: int, cap: int) -> PointCloudResult:
    seen = set(seed.points)
    frontier = set(seed.points)
    for depth in range(max_depth):
        new = set()
        for step in steps:
            # forward and backward sweeps share one round
            pool = frontier | new
            for p in pool:
                for q in step(p):
                    if q not in seen:
                        new.add(q)
            seen |= new
        if not new:
            return PointCloudResult(FinitePointSet(seen), STABILIZED, depth)
        _check(len(seen), cap, "point count", PointCloudResult(FinitePointSet(seen), TRUNCATED, depth))
        frontier = new
    alive = any(q not in seen for step in steps for p in frontier for q in step(p))
    return PointCloudResult(FinitePointSet(seen), TRUNCATED if alive else STABILIZED, max_depth)


def _forward_points(model: Model) -> Callable:
    def step(p):
        y = model.eval(p)
        return () if y is BULLET else (y,)

    return step


def _backward_points(model: Model) -> Callable:
    return lambda p: model.preimage_points(p).points


def pinv(model: Model, seed: Seed, max_depth: int = 32, cap: Optional[int] = None):
    """Forward saturation A, A u f(A), ...; an under-approximation of pinv(A)."""
    cap = cap or complexity_cap()
    if isinstance(seed, FinitePointSet):
        return _saturate_points(seed, [_forward_points(model)], max_depth, cap)
    return _saturate_open(seed, [model.image_mod], max_depth, cap)


def ninv(model: Model, seed: Seed, max_depth: int = 32, cap: Optional[int] = None):
    """Backward saturation: union of f^{-n}(A) for n up to max_depth."""
    cap = cap or complexity_cap()
    if isinstance(seed, FinitePointSet):
        return _saturate_points(seed, [_backward_points(model)], max_depth, cap)
    return _saturate_open(seed, [model.preimage], max_depth, cap)


def inv(model: Model, seed: Seed, max_depth: int = 32, cap: Optional[int] = None):
    """Grand-orbit hull: one forward sweep then one backward sweep per round."""
    cap = cap or complexity_cap()
    if isinstance(seed, FinitePointSet):
        steps = [_forward_points(model), _backward_points(model)]
        return _saturate_points(seed, steps, max_depth, cap)
    return _saturate_open(seed, [model.image_mod, model.preimage], max_depth, cap)


def lambda_S(model: Model, max_depth: int = 12, cap: Optional[int] = None) -> BoundedResult:
    """X minus cl(ninv(S)): an over-approximation of the never-hit-S set."""
    cloud = ninv(model, model.S, max_depth, cap)
    return BoundedResult(remove_points(model.interior, cloud.points), cloud.status, cloud.depth, OVER)


def sigma_and_zed(model: Model, max_depth: int = 12, delta=None, cap: Optional[int] = None):
    """(Sigma, Zed) at one resolution.

    Sigma comes from the cell-graph decomposition; Zed is the lambda_S
    over-approximation with cl(Sigma) removed so the pair stays disjoint.
    """
    from .cellgraph import minimal_components

    decomp = minimal_components(model, delta=delta, depth=max_depth, transitivity=False)
    lam = lambda_S(model, max_depth, cap)
    sigma = BoundedResult(decomp.sigma, decomp.cloud_status, max_depth, UNDER)
    zed = intersect(lam.set, complement_in(decomp.sigma, model.domain))
    return sigma, BoundedResult(zed, lam.status, lam.depth, OVER)
