from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropvertex.algebra import Monomial, SeriesError, TruncatedSeries, from_text, normal
from tropvertex.vertexgroup import (
    Automorphism,
    LieElement,
    LieTerm,
    automorphism_to_text,
    bch,
    bracket,
    compose,
    compose_all,
    exp_action,
    invert,
    lie_from_text,
    lie_to_text,
    log_derivation,
)

ORDER = 4
nonzero = st.tuples(st.integers(-2, 2), st.integers(-2, 2)).filter(lambda m: m != (0, 0))
coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool)


def h_elements(min_j=1):
    term = st.tuples(coeffs, nonzero, st.integers(min_j, ORDER - 1), st.sets(st.integers(1, 2), max_size=1))
    return st.lists(term, min_size=1, max_size=4).map(
        lambda ts: LieElement.from_terms(
            [LieTerm(c, Monomial(m, j, tuple(S)), normal(m)) for c, m, j, S in ts], ORDER
        )
    )


# general derivations, n arbitrary; exponents in an open half plane so no
# bracket lands on z^0, which is not a valid term
upper = nonzero.filter(lambda m: m[1] > 0 or (m[1] == 0 and m[0] > 0))
g_elements = st.lists(
    st.tuples(coeffs, upper, st.integers(1, ORDER - 1), nonzero), min_size=1, max_size=3
).map(lambda ts: LieElement.from_terms([LieTerm(c, Monomial(m, j), n) for c, m, j, n in ts], ORDER))

series = st.lists(
    st.tuples(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(0, ORDER - 1), coeffs), max_size=4
).map(lambda ts: TruncatedSeries([(Monomial(m, j), c) for m, j, c in ts], ORDER))

ZERO = LieElement.zero(ORDER)


@given(g_elements, g_elements)
def test_antisymmetry(x, y):
    assert bracket(x, y) == -bracket(y, x)


@given(g_elements, g_elements, g_elements)
@settings(max_examples=40)
def test_jacobi(x, y, z):
    jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
    assert jac == ZERO


@given(h_elements(), h_elements())
def test_h_is_closed(x, y):
    assert bracket(x, y).in_h()


@given(g_elements, g_elements, series)
@settings(max_examples=40)
def test_bracket_is_commutator(x, y, f):
    assert bracket(x, y).apply(f) == x.apply(y.apply(f)) - y.apply(x.apply(f))


@given(g_elements, series, series)
def test_leibniz(x, f, g):
    assert x.apply(f * g) == x.apply(f) * g + f * x.apply(g)


@given(h_elements())
def test_exp_log_inverse(x):
    assert log_derivation(exp_action(x)) == x


@given(h_elements())
def test_invert(x):
    theta = exp_action(x)
    assert compose(theta, invert(theta)).is_identity()
    assert invert(theta) == exp_action(-x)


@given(h_elements(), h_elements())
@settings(max_examples=60)
def test_bch_matches_composition(x, y):
    # four-fold brackets vanish mod t^4 since every term carries t
    assert exp_action(bch(x, y)) == compose(exp_action(x), exp_action(y))


def test_zero_exponent_bracket_is_rejected():
    x = LieElement.from_terms([LieTerm(Fraction(1), Monomial((2, 0), 1), (0, 1))], ORDER)
    y = LieElement.from_terms([LieTerm(Fraction(1), Monomial((-2, 0), 1), (1, 0))], ORDER)
    with pytest.raises(SeriesError):
        bracket(x, y)


def test_known_bracket_examples():
    a = LieElement.from_terms([LieTerm(Fraction(1), Monomial((1, 0), 1), (0, 1))], 3)
    b = LieElement.from_terms([LieTerm(Fraction(1), Monomial((0, 1), 1), (-1, 0))], 3)
    c = LieElement.from_terms([LieTerm(Fraction(1), Monomial((2, 0), 1), (0, 1))], 3)
    assert bracket(a, b) == LieElement.from_terms([LieTerm(Fraction(1), Monomial((1, 1), 2), (-1, 1))], 3)
    assert bracket(a, c) == LieElement.zero(3)
    assert bracket(a, a) == LieElement.zero(3)


@given(h_elements(), st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_automorphisms_are_multiplicative(x, m, m2):
    theta = exp_action(x)
    assert theta.image_of((m[0] + m2[0], m[1] + m2[1])) == theta.image_of(m) * theta.image_of(m2)


def test_exp_rejects_elements_outside_h():
    x = LieElement.from_terms([LieTerm(Fraction(1), Monomial((1, 0), 1), (1, 0))], ORDER)
    with pytest.raises(SeriesError):
        exp_action(x)


def test_wall_automorphism_is_exp_of_log():
    f = from_text("1 + 2 t z^(1,0) + -1 t^2 z^(2,0)", ORDER)
    n = normal((1, 0))
    theta = Automorphism.from_wall_function(f, n)
    assert theta == exp_action(LieElement.from_function(f.log(), n))
    assert theta.image_of((0, 1)) == f.shift((0, 1))
    assert Automorphism.from_wall_function(f, n, -1) == invert(theta)


def test_compose_all_puts_later_on_the_left():
    a = Automorphism.from_wall_function(from_text("1 + t z^(1,0)", 3), (0, 1))
    b = Automorphism.from_wall_function(from_text("1 + t z^(0,1)", 3), (-1, 0))
    assert compose_all([a, b], 3) == compose(b, a)
    assert compose_all([], 3).is_identity()


@given(h_elements())
def test_lie_text_round_trip(x):
    assert lie_from_text(lie_to_text(x), ORDER) == x


def test_text_forms():
    x = LieElement.from_terms([LieTerm(Fraction(-1), Monomial((1, 1), 2), (-1, 1))], 3)
    assert lie_to_text(x) == "-1 t^2 u{} z^(1,1) d(-1,1)"
    assert lie_to_text(LieElement.zero(3)) == "0"
    assert automorphism_to_text(Automorphism.identity(2)) == "z1 -> 1 t^0 u{} z^(1,0); z2 -> 1 t^0 u{} z^(0,1)"
