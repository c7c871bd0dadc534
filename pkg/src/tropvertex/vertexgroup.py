"""The tropical vertex Lie algebra and its exponentiated automorphisms.

A Lie element is stored as a map ``Monomial -> v`` with ``v`` a rational
vector in N; the term ``z^m t^j u_S`` with vector ``v`` is the derivation
``z^m t^j u_S d_v`` acting by ``d_v z^m' = <m', v> z^m'``.  Automorphisms
are stored by the images of ``z^(1,0)`` and ``z^(0,1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import (
    Monomial,
    SeriesError,
    TruncatedSeries,
    _frac_text,
    from_text,
    monomial_text,
    normal,
    pair,
    primitive_part,
    to_text,
)

E1 = (1, 0)
E2 = (0, 1)


def _vec(v) -> tuple[Fraction, Fraction]:
    return (Fraction(v[0]), Fraction(v[1]))


@dataclass(frozen=True)
class LieTerm:
    """``coeff * z^m t^j u_S d_n``."""

    coeff: Fraction
    mono: Monomial
    n: tuple[int, int]

    @property
    def in_h(self) -> bool:
        return pair(self.mono.m, self.n) == 0


def _term_from_vector(mono: Monomial, v) -> LieTerm:
    # canonical primitive n: the oriented normal for h-terms, else positive coeff
    m = mono.m
    if m != (0, 0) and pair(m, v) == 0:
        n = normal(m)
        c = v[0] / n[0] if n[0] else v[1] / n[1]
        return LieTerm(Fraction(c), mono, n)
    den = 1
    for x in v:
        den = den * x.denominator // _gcd(den, x.denominator)
    iv = (int(v[0] * den), int(v[1] * den))
    n, g = primitive_part(iv)
    return LieTerm(Fraction(g, den), mono, n)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


class LieElement:
    """Immutable element of the Lie algebra, truncated at ``t^order``."""

    __slots__ = ("order", "_terms")

    def __init__(self, terms: Mapping[Monomial, tuple] | Iterable = (), order: int = 1):
        self.order = order
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, tuple[Fraction, Fraction]] = {}
        for mono, v in items:
            if mono.j >= order:
                continue
            if mono.m == (0, 0):
                raise SeriesError("Lie terms need a nonzero exponent m")
            if not (mono.j > 0 or mono.S):
                raise SeriesError("Lie terms need positive filtration order")
            v = _vec(v)
            old = clean.get(mono, (0, 0))
            clean[mono] = (old[0] + v[0], old[1] + v[1])
        self._terms = {k: v for k, v in clean.items() if v[0] or v[1]}

    @classmethod
    def _raw(cls, terms, order):
        x = object.__new__(cls)
        x.order = order
        x._terms = terms
        return x

    @classmethod
    def zero(cls, order: int) -> "LieElement":
        return cls._raw({}, order)

    @classmethod
    def from_function(cls, f: TruncatedSeries, n) -> "LieElement":
        """``f d_n``."""
        n = _vec(n)
        return cls(((k, (c * n[0], c * n[1])) for k, c in f.terms.items()), f.order)

    @classmethod
    def from_terms(cls, terms: Iterable[LieTerm], order: int) -> "LieElement":
        return cls(((t.mono, (t.coeff * t.n[0], t.coeff * t.n[1])) for t in terms), order)

    # -- access --------------------------------------------------------------

    @property
    def vectors(self) -> dict[Monomial, tuple[Fraction, Fraction]]:
        return dict(self._terms)

    def terms(self) -> list[LieTerm]:
        return [_term_from_vector(k, self._terms[k]) for k in sorted(self._terms, key=Monomial.sort_key)]

    def is_zero(self) -> bool:
        return not self._terms

    def in_h(self) -> bool:
        return all(pair(k.m, v) == 0 for k, v in self._terms.items())

    def min_filtration(self) -> int | None:
        return min((k.filtration for k in self._terms), default=None)

    def homogeneous(self, filtration: int) -> "LieElement":
        return LieElement._raw({k: v for k, v in self._terms.items() if k.filtration == filtration}, self.order)

    def filter(self, pred) -> "LieElement":
        return LieElement._raw({k: v for k, v in self._terms.items() if pred(k)}, self.order)

    def by_direction(self) -> dict[tuple[int, int], "LieElement"]:
        """Split into parts whose exponents share a primitive direction."""
        out: dict[tuple[int, int], dict] = {}
        for k, v in self._terms.items():
            out.setdefault(primitive_part(k.m)[0], {})[k] = v
        return {d: LieElement._raw(t, self.order) for d, t in out.items()}

    def function_along(self, n) -> TruncatedSeries:
        """The series ``f`` with ``self == f d_n`` (every vector parallel to ``n``)."""
        out = {}
        for k, v in self._terms.items():
            if v[0] * n[1] - v[1] * n[0] != 0:
                raise SeriesError(f"term {monomial_text(k)} is not along d_{n}")
            out[k] = v[0] / n[0] if n[0] else v[1] / n[1]
        return TruncatedSeries(out, self.order)

    # -- linear structure ------------------------------------------------------

    def _check(self, other: "LieElement"):
        if not isinstance(other, LieElement):
            raise TypeError("expected a LieElement")
        if other.order != self.order:
            raise SeriesError(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            a = out.get(k, (0, 0))
            s = (a[0] + v[0], a[1] + v[1])
            if s[0] or s[1]:
                out[k] = s
            else:
                out.pop(k, None)
        return LieElement._raw(out, self.order)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LieElement":
        c = Fraction(c)
        if not c:
            return LieElement.zero(self.order)
        return LieElement._raw({k: (v[0] * c, v[1] * c) for k, v in self._terms.items()}, self.order)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.order == other.order and self._terms == other._terms

    def __hash__(self):
        return hash((self.order, frozenset(self._terms.items())))

    def __repr__(self):
        return f"LieElement({lie_to_text(self)!r}, order={self.order})"

    # -- action on functions -----------------------------------------------------

    def apply(self, g: TruncatedSeries) -> TruncatedSeries:
        """The derivation applied to a series."""
        if g.order != self.order:
            raise SeriesError("truncation orders differ")
        order = self.order
        out: dict[Monomial, Fraction] = {}
        for k2, c2 in g.terms.items():
            for k1, v in self._terms.items():
                if k1.j + k2.j >= order:
                    continue
                w = k2.m[0] * v[0] + k2.m[1] * v[1]
                if not w:
                    continue
                k = k1.times(k2)
                if k is None:
                    continue
                out[k] = out.get(k, 0) + w * c2
        return TruncatedSeries(out, order)


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """``[z^m d_n, z^m' d_n'] = z^(m+m') d_(<m',n> n' - <m,n'> n)``, bilinearly."""
    x._check(y)
    order = x.order
    out: dict[Monomial, list] = {}
    for k1, n1 in x._terms.items():
        for k2, n2 in y._terms.items():
            if k1.j + k2.j >= order:
                continue
            k = k1.times(k2)
            if k is None:
                continue
            a = k2.m[0] * n1[0] + k2.m[1] * n1[1]
            b = k1.m[0] * n2[0] + k1.m[1] * n2[1]
            v0 = a * n2[0] - b * n1[0]
            v1 = a * n2[1] - b * n1[1]
            if not (v0 or v1):
                continue
            acc = out.setdefault(k, [0, 0])
            acc[0] += v0
            acc[1] += v1
    terms = {}
    for k, v in out.items():
        if v[0] or v[1]:
            if k.m == (0, 0):
                raise SeriesError("bracket produced a term with zero exponent")
            terms[k] = (Fraction(v[0]), Fraction(v[1]))
    return LieElement._raw(terms, order)


def bch(x: LieElement, y: LieElement) -> LieElement:
    """Baker-Campbell-Hausdorff through triple brackets."""
    xy = bracket(x, y)
    return (
        x
        + y
        + xy.scale(Fraction(1, 2))
        + (bracket(x, xy) - bracket(y, xy)).scale(Fraction(1, 12))
    )


# ------------------------------------------------------------------------------
# automorphisms


class Automorphism:
    """Ring automorphism fixed by the images of ``z^(1,0)`` and ``z^(0,1)``."""

    __slots__ = ("order", "images", "_units", "_powers")

    def __init__(self, images: tuple[TruncatedSeries, TruncatedSeries]):
        s1, s2 = images
        if s1.order != s2.order:
            raise SeriesError("image orders differ")
        self.order = s1.order
        self.images = (s1, s2)
        units = (s1.shift((-1, 0)), s2.shift((0, -1)))
        for u in units:
            if u.constant() != 1 or not (u - 1).is_nilpotent():
                raise SeriesError("automorphism is not trivial modulo filtration order 1")
        self._units = units
        self._powers: dict[tuple[int, int], TruncatedSeries] = {}

    @classmethod
    def identity(cls, order: int) -> "Automorphism":
        return cls(
            (TruncatedSeries.monomial(order, E1), TruncatedSeries.monomial(order, E2))
        )

    @classmethod
    def from_wall_function(cls, f: TruncatedSeries, n, power: int = 1) -> "Automorphism":
        """``z^m' -> z^m' f^(power * <m', n>)``."""
        imgs = []
        for e in (E1, E2):
            imgs.append((f ** (power * pair(e, n))).shift(e))
        return cls(tuple(imgs))

    def _unit_power(self, i: int, k: int) -> TruncatedSeries:
        key = (i, k)
        p = self._powers.get(key)
        if p is None:
            p = self._units[i] ** k
            self._powers[key] = p
        return p

    def image_of(self, m) -> TruncatedSeries:
        """Image of ``z^m``."""
        u = self._unit_power(0, m[0]) * self._unit_power(1, m[1])
        return u.shift(m)

    def apply(self, g: TruncatedSeries) -> TruncatedSeries:
        if g.order != self.order:
            raise SeriesError("truncation orders differ")
        by_m: dict[tuple[int, int], dict] = {}
        for k, c in g.terms.items():
            by_m.setdefault(k.m, {})[Monomial((0, 0), k.j, k.S)] = c
        out = TruncatedSeries.zero(self.order)
        for m, coeffs in by_m.items():
            out = out + TruncatedSeries._raw(coeffs, self.order) * self.image_of(m)
        return out

    def is_identity(self) -> bool:
        return self == Automorphism.identity(self.order)

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Automorphism({automorphism_to_text(self)!r})"


def exp_action(x: LieElement) -> Automorphism:
    """``exp(x)`` as an automorphism; ``x`` must lie in h."""
    if not x.in_h():
        raise SeriesError("exp_action is only defined on h (need <m, n> = 0 for every term)")
    return _exp_derivation(x)


def _exp_derivation(x: LieElement) -> Automorphism:
    imgs = []
    for e in (E1, E2):
        term = TruncatedSeries.monomial(x.order, e)
        total = term
        k = 1
        while True:
            term = x.apply(term).scale(Fraction(1, k))
            if term.is_zero():
                break
            total = total + term
            k += 1
        imgs.append(total)
    return Automorphism(tuple(imgs))


def compose(a: Automorphism, b: Automorphism) -> Automorphism:
    """``a`` after ``b``."""
    if a.order != b.order:
        raise SeriesError("truncation orders differ")
    return Automorphism((a.apply(b.images[0]), a.apply(b.images[1])))


def compose_all(thetas: Iterable[Automorphism], order: int) -> Automorphism:
    """``thetas[-1]`` after ... after ``thetas[0]``."""
    imgs = None
    for th in thetas:
        if imgs is None:
            imgs = th.images
        else:
            imgs = (th.apply(imgs[0]), th.apply(imgs[1]))
    return Automorphism(imgs) if imgs is not None else Automorphism.identity(order)


def _minus_id_power_series(theta: Automorphism, g: TruncatedSeries):
    # (theta - Id)^k g for k = 1, 2, ... until zero
    p = g
    k = 0
    while True:
        p = theta.apply(p) - p
        k += 1
        if p.is_zero():
            return
        yield k, p


def invert(theta: Automorphism) -> Automorphism:
    """Inverse via the Neumann series ``sum_k (Id - theta)^k``."""
    imgs = []
    for e in (E1, E2):
        z = TruncatedSeries.monomial(theta.order, e)
        total = z
        for k, p in _minus_id_power_series(theta, z):
            total = total + (p if k % 2 == 0 else -p)
        imgs.append(total)
    return Automorphism(tuple(imgs))


def log_derivation(theta: Automorphism) -> LieElement:
    """The derivation ``x`` with ``exp(x) == theta``."""
    rows = []
    for e in (E1, E2):
        z = TruncatedSeries.monomial(theta.order, e)
        total = TruncatedSeries.zero(theta.order)
        for k, p in _minus_id_power_series(theta, z):
            total = total + p.scale(Fraction(1 if k % 2 else -1, k))
        rows.append(total.shift((-e[0], -e[1])))
    keys = set(rows[0].terms) | set(rows[1].terms)
    return LieElement(((k, (rows[0].coefficient(k), rows[1].coefficient(k))) for k in keys), theta.order)


# ------------------------------------------------------------------------------
# text forms


def lie_to_text(x: LieElement) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for t in x.terms():
        parts.append(f"{_frac_text(t.coeff)} {monomial_text(t.mono)} d({t.n[0]},{t.n[1]})")
    return " + ".join(parts)


def lie_from_text(text: str, order: int) -> LieElement:
    text = text.strip()
    if text == "0":
        return LieElement.zero(order)
    terms = []
    for chunk in text.split(" + "):
        body, _, d = chunk.rpartition(" d(")
        a, b = d.rstrip(")").split(",")
        s = from_text(body, order)
        (mono, c), = s.terms.items()
        terms.append(LieTerm(c, mono, (int(a), int(b))))
    return LieElement.from_terms(terms, order)


def automorphism_to_text(theta: Automorphism) -> str:
    return f"z1 -> {to_text(theta.images[0])}; z2 -> {to_text(theta.images[1])}"
