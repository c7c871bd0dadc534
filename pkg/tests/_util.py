"""Shared generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from tropvertex.algebra import Monomial, TruncatedSeries, det, primitive_part
from tropvertex.scattering import DiagramError, two_wall_diagram
from tropvertex.tropical import check_generic

SMALL_DIRECTIONS = [(1, 0), (0, 1), (1, 1), (-1, 1), (1, -1), (2, 1), (1, 2), (-1, 2), (2, -1), (-1, 0), (0, -1)]


def wall_function(order: int, m, coeffs) -> TruncatedSeries:
    """``1 + sum_k coeffs[k-1] t^k z^(k m)``."""
    terms = [(Monomial((0, 0)), 1)]
    for k, c in enumerate(coeffs, 1):
        if c:
            terms.append((Monomial((k * m[0], k * m[1]), k), Fraction(c)))
    return TruncatedSeries(terms, order)


def random_pair(rng: random.Random):
    while True:
        m1, m2 = rng.sample(SMALL_DIRECTIONS, 2)
        if det(m1, m2) > 0 and abs(det(m1, m2)) <= 3:
            return m1, m2


def random_two_wall(rng: random.Random, order: int, depth: int = 2, offset: bool = True):
    """Two lines with functions in ``z^m1`` and ``z^m2``, nonzero at t^1."""
    m1, m2 = random_pair(rng)

    def coeffs():
        first = Fraction(rng.choice([-2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))
        return [first] + [Fraction(rng.randint(-2, 2), rng.choice([1, 3])) for _ in range(depth - 1)]

    base2 = (Fraction(rng.randint(-5, 5), 7), Fraction(rng.randint(-5, 5), 3)) if offset else None
    return two_wall_diagram(order, wall_function(order, m1, coeffs()), wall_function(order, m2, coeffs()),
                            m1, m2, (0, 0), base2)


def random_points(fan, k: int, rng: random.Random):
    while True:
        pts = [(Fraction(rng.randint(-40, 40), 13), Fraction(rng.randint(-40, 40), 11)) for _ in range(k)]
        try:
            check_generic(fan, pts)
            return pts
        except DiagramError:
            continue


def random_point_near(rng: random.Random, centre, spread: int = 4):
    return (centre[0] + Fraction(rng.randint(-60 * spread, 60 * spread), 61),
            centre[1] + Fraction(rng.randint(-60 * spread, 60 * spread), 59))


def strictly_inside(v, m1, m2) -> bool:
    """``v`` is a positive combination of ``m1`` and ``m2`` (with ``det(m1, m2) > 0``)."""
    return det(m1, v) > 0 and det(v, m2) > 0


def primitive(v):
    return primitive_part(v)[0]


# acceptance lines, echoed in the pytest terminal summary by conftest.py
RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    return line
