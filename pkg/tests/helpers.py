"""Shared generators for randomized models and interval sets."""
import random
from fractions import Fraction

from pmdecomp.pwmap import PiecewiseAffineMap, validate
from pmdecomp.ratset import ClosedIntervalSet, OpenIntervalSet

TENT_LIKE_DENOMINATORS = (2, 3, 4, 6, 8, 12, 16)


def random_rational(rng, lo=Fraction(0), hi=Fraction(1), denominators=TENT_LIKE_DENOMINATORS):
    q = rng.choice(denominators)
    a = int(lo * q) + (0 if lo * q == int(lo * q) else 1)
    b = int(hi * q)
    return Fraction(rng.randint(a, b), q)


def random_open_set(rng, lo=Fraction(0), hi=Fraction(2), max_intervals=5, denominators=(2, 4, 8)):
    """Random canonical open set; small denominators make exact touches common."""
    pairs = []
    for _ in range(rng.randint(0, max_intervals)):
        a = random_rational(rng, lo, hi, denominators)
        b = random_rational(rng, lo, hi, denominators)
        if a != b:
            pairs.append((min(a, b), max(a, b)))
    return OpenIntervalSet(pairs)


def random_closed_set(rng, lo=Fraction(0), hi=Fraction(2), max_intervals=5, denominators=(2, 4, 8)):
    pairs = []
    for _ in range(rng.randint(0, max_intervals)):
        a = random_rational(rng, lo, hi, denominators)
        b = random_rational(rng, lo, hi, denominators)
        pairs.append((min(a, b), max(a, b)))
    return ClosedIntervalSet(pairs)


def random_model(rng, max_p=6, extra=True):
    """Random piecewise affine self-map of [0, 1] with up to max_p interior breakpoints."""
    p = rng.randint(0, max_p)
    inner = set()
    while len(inner) < p:
        x = Fraction(rng.randint(1, 23), 24)
        inner.add(x)
    bps = [Fraction(0), *sorted(inner), Fraction(1)]
    pieces = []
    for u, v in zip(bps, bps[1:]):
        while True:
            y0 = random_rational(rng)
            y1 = random_rational(rng)
            if y0 != y1:
                break
        slope = (y1 - y0) / (v - u)
        pieces.append((slope, y0 - slope * u))
    S = list(bps)
    if extra and rng.random() < 0.3:
        S.append(Fraction(rng.randint(1, 47), 48))
    return validate(PiecewiseAffineMap(tuple(bps), tuple(pieces)), S)
