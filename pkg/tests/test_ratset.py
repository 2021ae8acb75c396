from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmdecomp.ratset import (
    ClosedIntervalSet,
    FinitePointSet,
    OpenIntervalSet,
    boundary,
    closure,
    complement_in,
    diamond,
    interior,
    intersect,
    is_regular_open,
    meets,
    normalize,
    regular_difference,
    union,
)

O = OpenIntervalSet
F = Fraction


def test_normalize_examples():
    assert normalize([(0, 2), (1, 3)]) == O([(0, 3)])
    assert normalize([(0, 1), (1, 2)]).intervals == ((0, 1), (1, 2))
    assert normalize([]) == O()
    assert not normalize([])


def test_normalize_rejects_degenerate():
    with pytest.raises(ValueError):
        normalize([(1, 1)])
    with pytest.raises(ValueError):
        normalize([(2, 1)])


def test_touch_then_overlap_merges():
    assert O([(0, 1), (1, 2), (F(1, 2), F(3, 2))]) == O([(0, 2)])
    assert O([(0, 1), (1, 2), (1, 3)]).intervals == ((0, 1), (1, 3))


def test_diamond_examples():
    assert diamond(O([(0, 1), (1, 2)])) == O([(0, 2)])
    assert diamond(O([(0, 1)])) == O([(0, 1)])
    assert diamond(O([(0, 1), (2, 3)])) == O([(0, 1), (2, 3)])


def test_closure_interior_boundary_examples():
    assert closure(O([(0, 1), (1, 2)])) == ClosedIntervalSet([(0, 2)])
    assert interior(ClosedIntervalSet([(0, 1), (2, 2)])) == O([(0, 1)])
    assert boundary(O([(0, 1)])) == FinitePointSet([0, 1])


def test_boolean_examples():
    assert intersect(O([(0, 2)]), O([(1, 3)])) == O([(1, 2)])
    assert complement_in(O([(0, 1)]), ClosedIntervalSet([(0, 2)])) == O([(1, 2)])
    assert union(O([(0, 1)]), O([(1, 2)])).intervals == ((0, 1), (1, 2))


def test_regular_difference_examples():
    assert regular_difference(O([(0, 2)]), O([(0, 1)])) == O([(1, 2)])
    assert regular_difference(O([(0, 2)]), O([(0, 2)])) == O()
    assert regular_difference(O([(0, 1)]), O([(F(1, 4), F(1, 2))])) == O([(0, F(1, 4)), (F(1, 2), 1)])


def test_meets_examples():
    assert not meets(O([(0, 1)]), O([(1, 2)]))
    assert meets(O([(0, 1), (1, 2)]), O([(F(1, 2), F(3, 2))]))
    assert not meets(O(), O([(0, 5)]))


def test_membership_and_subset():
    a = O([(0, 1), (1, 2)])
    assert F(1, 2) in a
    assert 1 not in a
    assert 0 not in a
    assert O([(F(1, 4), F(3, 4))]) <= a
    assert not O([(F(1, 2), F(3, 2))]) <= a
    assert O([(F(1, 2), F(3, 2))]) <= diamond(a)


def test_json_round_trip():
    a = O([(F(-1, 3), 0), (0, F(7, 5))])
    data = a.to_json()
    assert data == [["-1/3", "0"], ["0", "7/5"]]
    assert O.from_json(data) == a


# properties ------------------------------------------------------------------

grid = st.integers(min_value=0, max_value=16).map(lambda k: Fraction(k, 8))


@st.composite
def open_sets(draw, max_size=6):
    pairs = draw(st.lists(st.tuples(grid, grid).filter(lambda p: p[0] != p[1]), max_size=max_size))
    return O((min(p), max(p)) for p in pairs)


@st.composite
def raw_intervals(draw):
    pairs = draw(st.lists(st.tuples(grid, grid).filter(lambda p: p[0] != p[1]), max_size=6))
    return [(min(p), max(p)) for p in pairs]


def points_of(o):
    """Dense probe: every multiple of 1/32 in [-1, 3]."""
    return [Fraction(k, 32) for k in range(-32, 97)]


@given(raw_intervals())
def test_normalize_is_projection_and_preserves_points(raw):
    once = normalize(raw)
    assert normalize(once.intervals) == once
    for x in points_of(once):
        assert (x in once) == any(lo < x < hi for lo, hi in raw)


@given(open_sets())
def test_diamond_idempotent_and_extensive(o):
    d = diamond(o)
    assert diamond(d) == d
    assert o <= d
    assert is_regular_open(d)
    missing = [x for x in points_of(o) if x in d and x not in o]
    assert all(x in boundary(o) for x in missing)


@given(open_sets(), open_sets())
def test_intersection_of_regular_is_regular(a, b):
    assert diamond(intersect(diamond(a), diamond(b))) == intersect(diamond(a), diamond(b))


@given(open_sets())
def test_complement_is_regular(o):
    x = ClosedIntervalSet([(0, 2)])
    c = complement_in(o, x)
    assert diamond(c) == c
    assert not meets(c, o)


@given(open_sets(), open_sets())
def test_meets_invariant_under_diamond(a, b):
    assert meets(a, b) == meets(diamond(a), diamond(b)) == meets(a, diamond(b))


@given(open_sets(), open_sets())
def test_union_and_intersection_pointwise(a, b):
    u, i = union(a, b), intersect(a, b)
    for x in points_of(a):
        assert (x in u) == (x in a or x in b)
        assert (x in i) == (x in a and x in b)


@settings(max_examples=200)
@given(open_sets(), open_sets())
def test_regular_difference_nonempty_on_proper_subset(a, b):
    o1, o2 = diamond(a), diamond(union(a, b))
    diff = regular_difference(o2, o1)
    assert diamond(diff) == diff
    if o1 != o2:
        assert diff


@given(open_sets())
def test_boundary_size_bound(o):
    assert len(boundary(o)) <= 2 * len(o)
