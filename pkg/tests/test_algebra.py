from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropvertex.algebra import (
    Monomial,
    SeriesError,
    TruncatedSeries,
    angle_key,
    from_text,
    normal,
    pair,
    pretty,
    primitive_part,
    to_text,
)

T = TruncatedSeries
ORDER = 5

monomials = st.builds(
    Monomial,
    st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
    st.integers(0, ORDER - 1),
    st.sets(st.integers(1, 3), max_size=2).map(lambda s: tuple(sorted(s))),
)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
series = st.lists(st.tuples(monomials, coeffs), max_size=6).map(lambda ts: T(ts, ORDER))
# nilpotent: every term carries t or a marker
nilpotent = series.map(lambda s: s.filter(lambda k: k.j > 0 or k.S))


def x(order=ORDER):
    return T.monomial(order, (1, 0))


def test_lattice_helpers():
    assert pair((1, 2), (3, -1)) == 1
    assert primitive_part((4, -6)) == ((2, -3), 2)
    assert normal((2, 3)) == (-3, 2)
    assert sorted([(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0)], key=angle_key) == [
        (1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1)
    ]


def test_truncation_drops_high_t():
    assert T.monomial(3, (0, 0), 3).is_zero()
    t = T.monomial(3, (0, 0), 1)
    assert (t * t).coefficient(Monomial((0, 0), 2)) == 1
    assert (t * t * t).is_zero()


def test_markers_are_squarefree():
    u1 = T.monomial(4, (1, 0), 0, (1,))
    u2 = T.monomial(4, (0, 1), 0, (2,))
    assert (u1 * u1).is_zero()
    prod = u1 * u2
    assert prod.terms == {Monomial((1, 1), 0, (1, 2)): 1}
    assert prod.min_filtration() == 2


def test_negative_power_of_unit():
    u1 = T.monomial(4, (1, 0), 0, (1,))
    assert (1 + u1) ** -2 == 1 - 2 * u1


def test_orders_must_match():
    with pytest.raises(SeriesError):
        T.monomial(3) + T.monomial(4)


def test_exp_and_log_domain():
    with pytest.raises(SeriesError):
        x().exp()
    with pytest.raises(SeriesError):
        (2 * x()).log()
    with pytest.raises(SeriesError):
        x().inverse()


def test_set_markers_zero():
    s = from_text("1 + t z^(1,0) + u{1} z^(0,1) + t u{2} z^(1,1)", 3)
    assert s.set_markers_zero() == from_text("1 + t z^(1,0)", 3)
    assert s.set_markers_zero([2]) == from_text("1 + t z^(1,0) + u{1} z^(0,1)", 3)


@given(nilpotent)
def test_exp_log_inverse(g):
    assert g.exp().log() == g
    f = 1 + g
    assert f.log().exp() == f


@given(nilpotent, nilpotent)
def test_exp_is_a_homomorphism(g, h):
    assert (g + h).exp() == g.exp() * h.exp()


@given(series, series, series)
@settings(max_examples=50)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(nilpotent)
def test_inverse(g):
    f = 1 + g
    assert f * f.inverse() == 1


@given(series)
def test_text_round_trip(s):
    assert from_text(to_text(s), ORDER) == s


def test_lenient_parser():
    s = from_text("1 + t^2 u{2,1} z^(1,1) + -1/2 t z^(0,1) + 3", 4)
    assert s.constant() == 4
    assert s.coefficient(Monomial((1, 1), 2, (1, 2))) == 1
    assert s.coefficient(Monomial((0, 1), 1)) == Fraction(-1, 2)


@pytest.mark.parametrize("bad", ["abc", "1 u{1,1}", "1 + ", "z^(1)"])
def test_parser_rejects(bad):
    with pytest.raises(SeriesError):
        from_text(bad, 3)


def test_pretty():
    assert pretty(from_text("1 z^(1,0) + 1 z^(0,1) + 1 t z^(-1,-1)", 2)) == "x + y + t/(xy)"
    assert pretty(from_text("-1/2 t^2 u{1} z^(-1,-2) + 3", 4)) == "3 - 1/2 t^2u1/(xy^2)"
    assert pretty(T.zero(3)) == "0"


@given(series, series)
def test_truncation_is_a_ring_homomorphism(a, b):
    lo = 3
    assert (a * b).truncate(lo) == a.truncate(lo) * b.truncate(lo)
    assert (a + b).truncate(lo) == a.truncate(lo) + b.truncate(lo)


@given(series, series)
def test_products_stay_squarefree(a, b):
    for k, _ in (a * b).items():
        assert len(set(k.S)) == len(k.S)
