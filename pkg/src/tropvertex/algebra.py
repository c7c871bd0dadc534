"""Exact lattice arithmetic and truncated formal series.

A series lives in Q[M] with a deformation parameter ``t`` truncated at
``t^order`` and squarefree marker variables ``u_i`` (``u_i**2 == 0``).
Coefficients are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial, gcd
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

Vec = tuple  # (int, int) lattice vector, or (Fraction, Fraction) point
Scalar = Union[int, Fraction]


class SeriesError(ValueError):
    """Raised on malformed series or violated preconditions."""


# --------------------------------------------------------------------------
# lattice helpers


def pair(m: Vec, n: Vec) -> int:
    """The pairing between M and N = Hom(M, Z)."""
    return m[0] * n[0] + m[1] * n[1]


def det(u: Vec, v: Vec):
    return u[0] * v[1] - u[1] * v[0]


def primitive_part(m: Vec) -> tuple[tuple[int, int], int]:
    """Split ``m = g * m0`` with ``m0`` primitive and ``g > 0``."""
    a, b = int(m[0]), int(m[1])
    g = gcd(a, b)
    if g == 0:
        raise SeriesError("the zero vector has no primitive part")
    return (a // g, b // g), g


def normal(m: Vec) -> tuple[int, int]:
    """Primitive normal ``n`` with ``{m, n}`` positively oriented."""
    (a, b), _ = primitive_part(m)
    return (-b, a)


def half_plane(v: Vec) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def angle_key(v: Vec):
    """Exact sort key by counterclockwise angle from the positive x-axis.

    The zero vector sorts first.
    """
    if v[0] == 0 and v[1] == 0:
        return (-1, 0)
    # within a half plane the slope-like ratio is monotone in angle
    h = half_plane(v)
    x, y = Fraction(v[0]), Fraction(v[1])
    if h == 1:
        x, y = -x, -y
    # angle in [0, pi): order by -cot, i.e. by -x/y with y == 0 first
    if y == 0:
        return (h, 0, Fraction(0))
    return (h, 1, -x / y)


# --------------------------------------------------------------------------
# monomials


class Monomial(NamedTuple):
    """``z^m t^j u_S``."""

    m: tuple[int, int] = (0, 0)
    j: int = 0
    S: tuple[int, ...] = ()

    @property
    def filtration(self) -> int:
        return self.j + len(self.S)

    def times(self, other: "Monomial") -> "Monomial | None":
        """Product, or ``None`` when a marker repeats."""
        if self.S and other.S and not set(self.S).isdisjoint(other.S):
            return None
        S = tuple(sorted(self.S + other.S)) if other.S else self.S
        return Monomial((self.m[0] + other.m[0], self.m[1] + other.m[1]), self.j + other.j, S)

    def shift(self, m: Vec) -> "Monomial":
        return Monomial((self.m[0] + m[0], self.m[1] + m[1]), self.j, self.S)

    def sort_key(self):
        return (self.j, len(self.S), self.S, angle_key(self.m), self.m)


ONE = Monomial()


def _check_monomial(mono: Monomial) -> Monomial:
    if not isinstance(mono, Monomial):
        mono = Monomial(tuple(mono[0]), mono[1], tuple(mono[2]))
    if len(set(mono.S)) != len(mono.S):
        raise SeriesError(f"repeated marker in {mono.S}")
    if list(mono.S) != sorted(mono.S):
        mono = mono._replace(S=tuple(sorted(mono.S)))
    if mono.j < 0:
        raise SeriesError("negative t-degree")
    return mono


# --------------------------------------------------------------------------
# series


class TruncatedSeries:
    """Immutable exact series truncated at ``t^order``."""

    __slots__ = ("order", "_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable = (), order: int = 1):
        if order < 1:
            raise SeriesError("truncation order must be positive")
        self.order = order
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Fraction] = {}
        for mono, c in items:
            mono = _check_monomial(mono)
            if mono.j >= order:
                continue
            c = Fraction(c)
            if c:
                clean[mono] = clean.get(mono, 0) + c
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, order: int) -> "TruncatedSeries":
        # trusted constructor: terms already clean
        s = object.__new__(cls)
        s.order = order
        s._terms = terms
        s._hash = None
        return s

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls._raw({}, order)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls.monomial(order)

    @classmethod
    def monomial(cls, order: int, m: Vec = (0, 0), j: int = 0, S: Iterable[int] = (), coeff: Scalar = 1):
        return cls({Monomial(tuple(m), j, tuple(sorted(S))): coeff}, order)

    # -- access ------------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical order."""
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def constant(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    def min_filtration(self) -> int | None:
        if not self._terms:
            return None
        return min(k.filtration for k in self._terms)

    def markers(self) -> set[int]:
        return {i for k in self._terms for i in k.S}

    def is_nilpotent(self) -> bool:
        """True when every term has positive filtration order."""
        return all(k.j > 0 or k.S for k in self._terms)

    def homogeneous(self, filtration: int) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            {k: v for k, v in self._terms.items() if k.filtration == filtration}, self.order
        )

    def filter(self, pred) -> "TruncatedSeries":
        return TruncatedSeries._raw({k: v for k, v in self._terms.items() if pred(k)}, self.order)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries._raw({k: v for k, v in self._terms.items() if k.j < order}, order)

    def shift(self, m: Vec) -> "TruncatedSeries":
        """Multiply by ``z^m``."""
        return TruncatedSeries._raw({k.shift(m): v for k, v in self._terms.items()}, self.order)

    def set_markers_zero(self, markers: Iterable[int] | None = None) -> "TruncatedSeries":
        drop = None if markers is None else set(markers)
        if drop is None:
            return self.filter(lambda k: not k.S)
        return self.filter(lambda k: drop.isdisjoint(k.S))

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise SeriesError(f"truncation orders differ: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.monomial(self.order, coeff=other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return TruncatedSeries._raw(out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw({k: -v for k, v in self._terms.items()}, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "TruncatedSeries":
        c = Fraction(c)
        if not c:
            return TruncatedSeries.zero(self.order)
        return TruncatedSeries._raw({k: v * c for k, v in self._terms.items()}, self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = self.order
        out: dict[Monomial, Fraction] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                if k1.j + k2.j >= order:
                    continue
                k = k1.times(k2)
                if k is None:
                    continue
                s = out.get(k, 0) + v1 * v2
                if s:
                    out[k] = s
                else:
                    del out[k]
        return TruncatedSeries._raw(out, order)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncatedSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _nilpotent_powers(self, h: "TruncatedSeries") -> Iterator[tuple[int, "TruncatedSeries"]]:
        # h**i for i >= 1 until it vanishes; termination from the filtration
        p = h
        i = 1
        while not p.is_zero():
            yield i, p
            p = p * h
            i += 1

    def unit_split(self) -> tuple[Fraction, "TruncatedSeries"]:
        """Write ``self = c * (1 + h)`` with ``h`` nilpotent."""
        c = self.constant()
        if not c:
            raise SeriesError("series is not a unit (zero constant term)")
        h = self.scale(1 / c) - 1
        if not h.is_nilpotent():
            raise SeriesError("series is not a unit: non-constant term of filtration order zero")
        return c, h

    def inverse(self) -> "TruncatedSeries":
        c, h = self.unit_split()
        result = TruncatedSeries.one(self.order)
        for i, p in self._nilpotent_powers(h):
            result = result + (p if i % 2 == 0 else -p)
        return result.scale(1 / c)

    def exp(self) -> "TruncatedSeries":
        return series_exp(self)

    def log(self) -> "TruncatedSeries":
        return series_log(self)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.monomial(self.order, coeff=other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"TruncatedSeries({to_text(self)!r}, order={self.order})"

    def __str__(self):
        return to_text(self)


def series_add(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    return s1 + s2


def series_mul(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    return s1 * s2


def series_scale(s: TruncatedSeries, c: Scalar) -> TruncatedSeries:
    return s.scale(c)


def series_exp(f: TruncatedSeries) -> TruncatedSeries:
    """``exp(f)`` for ``f`` without terms of filtration order zero."""
    if not f.is_nilpotent():
        raise SeriesError("exp needs every term to carry t or a marker")
    result = TruncatedSeries.one(f.order)
    for i, p in f._nilpotent_powers(f):
        result = result + p.scale(Fraction(1, factorial(i)))
    return result


def series_log(g: TruncatedSeries) -> TruncatedSeries:
    """``log(g)`` for ``g = 1 + (terms of positive filtration order)``."""
    if g.constant() != 1:
        raise SeriesError("log needs constant term 1")
    h = g - 1
    if not h.is_nilpotent():
        raise SeriesError("log needs g - 1 to carry t or a marker in every term")
    result = TruncatedSeries.zero(g.order)
    for i, p in g._nilpotent_powers(h):
        result = result + p.scale(Fraction(1 if i % 2 else -1, i))
    return result


# --------------------------------------------------------------------------
# canonical text form


def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def monomial_text(mono: Monomial) -> str:
    S = ",".join(str(i) for i in mono.S)
    return f"t^{mono.j} u{{{S}}} z^({mono.m[0]},{mono.m[1]})"


def to_text(s: TruncatedSeries) -> str:
    """Canonical serialization, e.g. ``1 t^0 u{} z^(0,0) + -1/2 t^2 u{1} z^(1,1)``."""
    if s.is_zero():
        return "0"
    return " + ".join(f"{_frac_text(c)} {monomial_text(k)}" for k, c in s.items())


_TERM_RE = re.compile(
    r"^\s*(?P<c>-?\d+(?:/\d+)?)?"
    r"\s*(?:t(?:\^(?P<j>\d+))?)?"
    r"\s*(?:u\{(?P<S>[\d,\s]*)\})?"
    r"\s*(?:z\^\(\s*(?P<a>-?\d+)\s*,\s*(?P<b>-?\d+)\s*\))?\s*$"
)


def from_text(text: str, order: int) -> TruncatedSeries:
    """Inverse of :func:`to_text`.

    Missing parts default to coefficient 1, ``t^0``, no markers and ``z^(0,0)``,
    so ``"1 + t^1 z^(1,0)"`` is accepted too.
    """
    text = text.strip()
    if text == "0":
        return TruncatedSeries.zero(order)
    terms = []
    for chunk in text.split(" + "):
        mt = _TERM_RE.match(chunk)
        if not chunk.strip() or not mt:
            raise SeriesError(f"cannot parse series term {chunk!r}")
        has_t = "t" in chunk
        j = int(mt["j"]) if mt["j"] else (1 if has_t else 0)
        S = tuple(int(x) for x in (mt["S"] or "").replace(" ", "").split(",") if x)
        if len(set(S)) != len(S):
            raise SeriesError(f"repeated marker in {chunk!r}")
        m = (int(mt["a"]), int(mt["b"])) if mt["a"] is not None else (0, 0)
        c = Fraction(mt["c"]) if mt["c"] else Fraction(1)
        terms.append((Monomial(m, j, tuple(sorted(S))), c))
    return TruncatedSeries(terms, order)


def pretty(s: TruncatedSeries, names: tuple[str, str] = ("x", "y")) -> str:
    """Human form such as ``x + y + t/(xy)``."""
    if s.is_zero():
        return "0"
    out = []
    for k, c in s.items():
        num, den = [], []
        if k.j:
            num.append("t" if k.j == 1 else f"t^{k.j}")
        num.extend(f"u{i}" for i in k.S)
        for name, e in zip(names, k.m):
            if e:
                sym = name if abs(e) == 1 else f"{name}^{abs(e)}"
                (num if e > 0 else den).append(sym)
        body = "".join(num) if num else "1"
        if den:
            d = "".join(den)
            body += "/" + (d if len(den) == 1 else f"({d})")
        if abs(c) != 1:
            body = f"{_frac_text(abs(c))}" + ("" if body == "1" else " " + body)
        sign = "-" if c < 0 else "+"
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text
