import random
from fractions import Fraction as F

import pytest

from helpers import random_model, random_open_set
from pmdecomp import invariants
from pmdecomp.invariants import (
    OVER,
    STABILIZED,
    TRUNCATED,
    ComplexityExceeded,
    inv,
    lambda_S,
    ninv,
    pinv,
    sigma_and_zed,
)
from pmdecomp.pwmap import BULLET, PiecewiseAffineMap, bundled, validate
from pmdecomp.ratset import FinitePointSet, OpenIntervalSet as O, closure, diamond, intersect, meets


@pytest.fixture(scope="module")
def tent():
    return bundled("tent")


def grand_orbit_brute(model, seed, depth):
    """Independent zigzag enumeration: each round applies eval and every preimage by scanning pieces."""
    seen = set(seed)
    frontier = set(seed)
    for _ in range(depth):
        new = set()
        for p in frontier:
            y = model.eval(p)
            if y is not BULLET:
                new.add(y)
        for p in frontier | new:
            for k, (a, b) in enumerate(model.pieces):
                x = (p - b) / a
                lo, hi = model.breakpoints[k], model.breakpoints[k + 1]
                if lo < x < hi and x not in model.S:
                    new.add(x)
        new -= seen
        if not new:
            break
        seen |= new
        frontier = new
    return seen


def test_pinv_examples(tent):
    r = pinv(tent, FinitePointSet([F(1, 2)]))
    assert r.points == FinitePointSet([F(1, 2)]) and r.status == STABILIZED and r.depth == 0
    r = pinv(tent, O([(F(1, 4), F(3, 4))]))
    assert r.set == O([(0, 1)])
    assert r.status == STABILIZED and r.depth == 2
    assert pinv(tent, O()).set == O()


def test_ninv_examples(tent):
    r = ninv(tent, FinitePointSet([F(1, 2)]), 2)
    assert r.points == FinitePointSet([F(k, 8) for k in (1, 2, 3, 4, 5, 6, 7)])
    assert r.status == TRUNCATED
    r = ninv(tent, O([(F(1, 2), 1)]), 1)
    assert r.set.intervals == ((F(1, 4), F(1, 2)), (F(1, 2), 1))
    e = ninv(tent, O())
    assert e.set == O() and e.status == STABILIZED and e.depth == 0


def test_inv_tent_point_matches_brute_force(tent):
    r = inv(tent, FinitePointSet([F(1, 2)]), 3)
    expected = grand_orbit_brute(tent, {F(1, 2)}, 3)
    assert set(r.points) == expected
    assert set(r.points) == {F(k, 16) for k in range(1, 16)}


def test_inv_two_component_stays_in_left_half():
    two = bundled("two_component")
    for depth in (1, 3, 6):
        pts = inv(two, FinitePointSet([F(1, 4)]), depth).points
        assert all(0 <= p <= F(1, 2) for p in pts)
        assert set(pts) == grand_orbit_brute(two, {F(1, 4)}, depth)


def test_inv_of_whole_interior_is_stable(tent):
    r = inv(tent, tent.interior)
    assert r.set == tent.interior
    assert r.status == STABILIZED and r.depth == 0


def test_lambda_examples(tent):
    lam = lambda_S(tent, 1)
    assert lam.direction == OVER
    quarters = [F(k, 4) for k in range(5)]
    assert lam.set.intervals == tuple(zip(quarters, quarters[1:]))
    ident = validate(PiecewiseAffineMap.from_strings(["0", "1"], [("1", "0")]))
    for depth in (1, 4):
        assert lambda_S(ident, depth).set == O([(0, 1)])


def test_lambda_shrinks_with_depth_and_gap(tent):
    prev = None
    for k in range(1, 7):
        lam = lambda_S(tent, k)
        gap = max(hi - lo for lo, hi in lam.set)
        assert gap == F(1, 2 ** (k + 1))
        if prev is not None:
            assert lam.set <= prev
        prev = lam.set


def test_sigma_zed_examples(tent):
    sigma, zed = sigma_and_zed(tent, 8)
    assert sigma.set == O([(0, 1)])
    assert not zed.set
    sigma, zed = sigma_and_zed(bundled("two_component"), 8)
    assert sigma.set == O([(0, 1)])
    assert not zed.set
    sigma, zed = sigma_and_zed(bundled("contraction"), 8)
    assert not sigma.set
    assert zed.set  # only the thin backward orbit of S is removed


def test_monotone_growth_random_models():
    rng = random.Random(4)
    for _ in range(25):
        m = random_model(rng, max_p=3)
        seed = intersect(random_open_set(rng, F(0), F(1), max_intervals=2), m.interior)
        for op in (pinv, ninv, inv):
            prev = None
            for depth in range(4):
                cur = op(m, seed, depth).set
                if prev is not None:
                    assert prev <= cur
                prev = cur


def test_invariance_checks_on_stabilized_results():
    rng = random.Random(7)
    checked = 0
    for _ in range(60):
        m = random_model(rng, max_p=3)
        seed = intersect(random_open_set(rng, F(0), F(1), max_intervals=2), m.interior)
        fwd = pinv(m, seed, 10)
        if fwd.stabilized:
            o = fwd.set
            assert m.image_mod(o) <= o
            assert m.image_mod(diamond(o)) <= diamond(o)
            img = m.image_mod(diamond(o))
            cl = closure(o)
            assert all(lo in cl and hi in cl for lo, hi in img)
        back = ninv(m, seed, 10)
        if back.stabilized:
            a = back.set
            assert m.preimage(a) <= a
            assert ninv(m, a, 1).set == a
            checked += 1
    assert checked > 0


def test_sandwich_disjoint():
    for name in ("tent", "two_component", "contraction"):
        sigma, zed = sigma_and_zed(bundled(name), 6)
        assert not meets(sigma.set, zed.set)


def test_complexity_cap(tent, monkeypatch):
    monkeypatch.setenv("PMDECOMP_CELL_CAP", "50")
    assert invariants.complexity_cap() == 50
    with pytest.raises(ComplexityExceeded) as err:
        ninv(tent, FinitePointSet([F(1, 2)]), 10)
    assert err.value.partial is not None
    assert err.value.partial.status == TRUNCATED


def test_result_json(tent):
    data = ninv(tent, O([(F(1, 2), 1)]), 1).to_json()
    assert data["direction"] == "under"
    assert data["set"] == [["1/4", "1/2"], ["1/2", "1"]]
