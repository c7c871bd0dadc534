"""Leading-order Maurer-Cartan solver: the sum over trivalent trees.

Every term of the solution is ``c z^m t^j u_S d_{n(m)}`` (always in the
tropical vertex Lie algebra) attached to a support: a line, a ray or a point.
Two terms on transversal supports bracket at their intersection point, with
the orientation sign ``sign det(m_a, m_b)`` of the wedge of their bump forms;
the propagator pushes a point-supported term onto the ray from that point in
its monomial direction.  The fixed point of

    Phi = Pi - 1/2 * sum over ordered pairs propagate(bracket(a, b))

is the solution, and each ray group ``g d_n`` becomes the wall ``exp(sigma g)``.
``sigma`` is not fixed by the bracket alone; :func:`pin_wall_sign` recovers it
from the two-line example and :data:`WALL_SIGN` records the result.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .algebra import (
    Monomial,
    TruncatedSeries,
    angle_key,
    det,
    normal,
    pair,
    primitive_part,
)
from .scattering import (
    INCOMING,
    LINE,
    OUTGOING,
    RAY,
    InvariantError,
    ScatteringDiagram,
    Wall,
    as_point,
    complete,
    two_wall_diagram,
)
from .vertexgroup import LieElement, LieTerm, bracket

POINT = "point"

# wall factor exp(WALL_SIGN * g) for a ray group g d_n; checked by pin_wall_sign()
WALL_SIGN = -1


class MCError(ValueError):
    """Malformed solver input or a misaligned correction."""


@dataclass(frozen=True)
class SupportLabel:
    kind: str  # line, ray or point
    base: tuple[Fraction, Fraction]
    direction: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base))
        if self.kind == POINT:
            if self.direction is not None:
                raise MCError("a point support has no direction")
            return
        if self.kind not in (LINE, RAY):
            raise MCError(f"unknown support kind {self.kind!r}")
        d, g = primitive_part(self.direction)
        if g != 1:
            raise MCError(f"support direction {self.direction} is not primitive")
        object.__setattr__(self, "direction", d)

    def __str__(self):
        b = f"({_q(self.base[0])},{_q(self.base[1])})"
        if self.kind == POINT:
            return f"Point{b}"
        name = "Line" if self.kind == LINE else "Ray"
        return f"{name}({b},({self.direction[0]},{self.direction[1]}))"

    def sort_key(self):
        return ({LINE: 0, RAY: 1, POINT: 2}[self.kind], self.base,
                angle_key(self.direction) if self.direction else ())


def Line(base, direction) -> SupportLabel:
    return SupportLabel(LINE, base, tuple(direction))


def Ray(base, direction) -> SupportLabel:
    return SupportLabel(RAY, base, tuple(direction))


def Point(location) -> SupportLabel:
    return SupportLabel(POINT, location)


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SupportedTerm:
    lie: LieTerm
    support: SupportLabel

    def __post_init__(self):
        m = self.lie.mono.m
        if m == (0, 0):
            raise MCError("supported terms need a nonzero exponent")
        if not self.lie.in_h:
            raise MCError("supported terms must lie in the tropical vertex Lie algebra")
        if self.support.kind != POINT and det(m, self.support.direction) != 0:
            raise MCError(f"exponent {m} is not parallel to the support direction")

    @classmethod
    def make(cls, coeff, mono: Monomial, support: SupportLabel) -> "SupportedTerm":
        """``coeff z^m ... d_{n(m)}`` with the oriented normal of ``m``."""
        if mono.m == (0, 0):
            raise MCError("supported terms need a nonzero exponent")
        return cls(LieTerm(Fraction(coeff), mono, normal(mono.m)), support)

    @property
    def mono(self) -> Monomial:
        return self.lie.mono

    @property
    def coeff(self) -> Fraction:
        # coefficient against the oriented normal of the exponent
        n = normal(self.lie.mono.m)
        return self.lie.coeff if self.lie.n == n else -self.lie.coeff

    def element(self, order: int) -> LieElement:
        return LieElement.from_terms([self.lie], order)

    def to_text(self) -> str:
        k = self.mono
        S = ",".join(str(i) for i in k.S)
        n = normal(k.m)
        return (f"{_q(self.coeff)} t^{k.j} u{{{S}}} z^({k.m[0]},{k.m[1]}) "
                f"d({n[0]},{n[1]}) on {self.support}")


# ------------------------------------------------------------------------------
# bracket and propagator


def _param(s: SupportLabel, p) -> Fraction:
    d = s.direction
    return (p[0] - s.base[0]) * d[0] + (p[1] - s.base[1]) * d[1]


def _meet(a: SupportLabel, b: SupportLabel):
    """Transversal intersection point of two line/ray supports, or None.

    A ray meets only through its interior: touching at the endpoint is not
    a transversal crossing.
    """
    if POINT in (a.kind, b.kind):
        return None
    dd = det(a.direction, b.direction)
    if dd == 0:
        return None
    diff = (b.base[0] - a.base[0], b.base[1] - a.base[1])
    s = Fraction(det(diff, b.direction), dd)
    p = (a.base[0] + s * a.direction[0], a.base[1] + s * a.direction[1])
    for sup in (a, b):
        if sup.kind == RAY and _param(sup, p) <= 0:
            return None
    return p


def orientation(a: SupportedTerm, b: SupportedTerm) -> int:
    d = det(a.mono.m, b.mono.m)
    return (d > 0) - (d < 0)


def bracket_supported(a: SupportedTerm, b: SupportedTerm, order: int) -> SupportedTerm | None:
    """Graded bracket ``sign det(m_a, m_b) [x_a, x_b]`` at the meeting point."""
    p = _meet(a.support, b.support)
    if p is None:
        return None
    x = bracket(a.element(order), b.element(order))
    terms = x.terms()
    if not terms:
        return None
    (t,) = terms
    eps = orientation(a, b)
    return SupportedTerm(LieTerm(t.coeff * eps, t.mono, t.n), Point(p))


def propagate(term: SupportedTerm) -> SupportedTerm:
    """Move a point-supported term onto the ray in its monomial direction."""
    if term.support.kind != POINT:
        raise MCError("propagate expects a point-supported term")
    d, _ = primitive_part(term.mono.m)
    return SupportedTerm(term.lie, Ray(term.support.base, d))


# ------------------------------------------------------------------------------
# solving


def _key(t: SupportedTerm):
    return (t.support, t.mono)


def _collect(pairs: Iterable[tuple[tuple, Fraction]]) -> dict:
    acc: dict = defaultdict(Fraction)
    for k, c in pairs:
        acc[k] += c
    return {k: c for k, c in acc.items() if c}


def _terms(acc: dict) -> list[SupportedTerm]:
    out = [SupportedTerm.make(c, mono, sup) for (sup, mono), c in acc.items()]
    out.sort(key=lambda t: (t.mono.filtration, t.support.sort_key(), t.mono.sort_key()))
    return out


@dataclass
class MCSolution:
    order: int
    input: list[SupportedTerm]
    corrections: dict[int, list[SupportedTerm]] = field(default_factory=dict)

    def all_corrections(self) -> list[SupportedTerm]:
        return [t for k in sorted(self.corrections) for t in self.corrections[k]]

    def terms(self) -> list[SupportedTerm]:
        return list(self.input) + self.all_corrections()

    def to_text(self) -> str:
        lines = [f"order {self.order}", "input:"]
        lines += [f"  {t.to_text()}" for t in self.input]
        if not self.corrections:
            lines.append("no corrections")
        for k in sorted(self.corrections):
            lines.append(f"filtration {k}:")
            lines += [f"  {t.to_text()}" for t in self.corrections[k]]
        return "\n".join(lines) + "\n"


def _pair_sum(terms: Sequence[SupportedTerm], order: int) -> dict:
    """``-1/2 sum_{ordered} propagate(bracket)``; self pairs vanish on parallel supports."""
    out = []
    for a, b in combinations(terms, 2):
        r = bracket_supported(a, b, order)
        if r is None:
            continue
        r = propagate(r)
        # the ordered pairs (a, b) and (b, a) give the same graded bracket
        out.append((_key(r), -r.coeff))
    return _collect(out)


def solve(inputs: Sequence[SupportedTerm], order: int) -> MCSolution:
    """Fixed point of ``Phi = Pi - 1/2 H[Phi, Phi]`` modulo ``t^order``."""
    for t in inputs:
        if t.support.kind == POINT:
            raise MCError("input terms must be supported on lines or rays")
        if t.mono.filtration < 1:
            raise MCError("input terms need positive filtration order")
    pi = _collect((_key(t), t.coeff) for t in inputs if t.mono.j < order)
    phi = dict(pi)
    while True:
        new = dict(pi)
        for k, c in _pair_sum(_terms(phi), order).items():
            new[k] = new.get(k, 0) + c
        new = {k: c for k, c in new.items() if c}
        if new == phi:
            break
        phi = new
    corr = {k: c - pi.get(k, 0) for k, c in phi.items()}
    by_order: dict[int, list] = defaultdict(list)
    for t in _terms({k: c for k, c in corr.items() if c}):
        by_order[t.mono.filtration].append(t)
    return MCSolution(order, _terms(pi), dict(by_order))


def input_from_diagram(d: ScatteringDiagram) -> list[SupportedTerm]:
    """``Pi``: the terms of ``log f d_{n(m)}`` on each wall's support."""
    out = []
    for w in d.walls:
        sup = SupportLabel(w.kind, w.base, w.m)
        for mono, c in w.fn.log().items():
            out.append(SupportedTerm.make(c, mono, sup))
    return out


def _input_walls(sol: MCSolution) -> list[Wall]:
    groups: dict[tuple, list] = defaultdict(list)
    for t in sol.input:
        sup = t.support
        align = OUTGOING if pair(t.mono.m, sup.direction) > 0 else INCOMING
        groups[(sup, align)].append((t.mono, t.coeff))
    walls = []
    for (sup, align), terms in groups.items():
        fn = TruncatedSeries(terms, sol.order).exp()
        walls.append(Wall(sup.direction, sup.base, sup.kind, align, fn))
    return walls


def diagram_of(sol: MCSolution, sign: int = WALL_SIGN) -> ScatteringDiagram:
    """Input walls plus one outgoing ray ``exp(sign * g)`` per ray group ``g d_n``."""
    groups: dict[SupportLabel, list] = defaultdict(list)
    for t in sol.all_corrections():
        sup = t.support
        if sup.kind != RAY:
            raise InvariantError(f"correction left on a {sup.kind} support")
        if pair(t.mono.m, sup.direction) <= 0 or det(t.mono.m, sup.direction) != 0:
            raise InvariantError(f"correction {t.to_text()} is not aligned with its ray")
        groups[sup].append((t.mono, t.coeff * sign))
    walls = _input_walls(sol)
    for sup in sorted(groups, key=SupportLabel.sort_key):
        fn = TruncatedSeries(groups[sup], sol.order).exp()
        if fn != 1:
            walls.append(Wall(sup.direction, sup.base, RAY, OUTGOING, fn))
    points = ()
    return ScatteringDiagram(sol.order, tuple(walls), points)


# ------------------------------------------------------------------------------
# explicit trees


@dataclass(frozen=True)
class Tree:
    """A leaf (``children`` empty, ``leaf`` the input index) or a trivalent vertex."""

    leaf: int | None = None
    children: tuple["Tree", "Tree"] | tuple = ()

    def describe(self, names: Sequence[str] | None = None) -> str:
        if self.leaf is not None:
            return names[self.leaf] if names else f"a{self.leaf}"
        l, r = self.children
        return f"[{l.describe(names)},{r.describe(names)}]"

    def leaves(self) -> list[int]:
        if self.leaf is not None:
            return [self.leaf]
        return self.children[0].leaves() + self.children[1].leaves()


def enumerate_trees(inputs: Sequence[SupportedTerm], order: int) -> list[tuple[str, SupportedTerm]]:
    """All trees with a nonzero value, leaves labelled by input terms.

    A vertex takes two distinct subtrees (unordered) and has value
    ``-propagate(bracket_supported(left, right))``; the ``1/2`` of the
    fixed-point formula cancels against the two orderings of its children.
    """
    inputs = [t for t in inputs if t.mono.j < order]
    # trees grouped by number of leaves, each with its value
    level: dict[int, list[tuple[Tree, SupportedTerm]]] = {
        1: [(Tree(leaf=i), t) for i, t in enumerate(inputs)]
    }
    seen: dict[int, list] = {1: level[1]}
    n = 1
    while True:
        n += 1
        new = []
        for k in range(1, n // 2 + 1):
            left_side, right_side = seen.get(k, []), seen.get(n - k, [])
            for i, (tl, vl) in enumerate(left_side):
                start = i + 1 if k == n - k else 0
                for tr, vr in right_side[start:]:
                    r = bracket_supported(vl, vr, order)
                    if r is None:
                        continue
                    r = propagate(r)
                    new.append((Tree(children=(tl, tr)),
                                SupportedTerm.make(-r.coeff, r.mono, r.support)))
        if not new:
            break
        seen[n] = new
    out = []
    for n in sorted(seen):
        for tree, value in seen[n]:
            out.append((tree.describe(), value))
    return out


def tree_totals(trees: Iterable[tuple[str, SupportedTerm]], inputs: Sequence[SupportedTerm]) -> dict:
    """Summed tree values by (support, monomial), leaves excluded."""
    leaf_names = {f"a{i}" for i in range(len(inputs))}
    return _collect((_key(v), v.coeff) for desc, v in trees if desc not in leaf_names)


def correction_totals(sol: MCSolution) -> dict:
    return _collect((_key(t), t.coeff) for t in sol.all_corrections())


# ------------------------------------------------------------------------------
# sign pinning


def pin_wall_sign() -> int:
    """The wall sign that makes the two-line example agree with completion at t^2."""
    x = TruncatedSeries(((Monomial((0, 0)), 1), (Monomial((1, 0), 1), 1)), 3)
    y = TruncatedSeries(((Monomial((0, 0)), 1), (Monomial((0, 1), 1), 1)), 3)
    d0 = two_wall_diagram(3, x, y)
    ray = complete(d0).walls[-1]
    target = ray.fn.log().coefficient(Monomial((1, 1), 2))
    (corr,) = solve(input_from_diagram(d0), 3).all_corrections()
    ratio = target / corr.coeff
    if ratio not in (1, -1):
        raise InvariantError(f"completion and tree expansion differ by {ratio}, not a sign")
    return int(ratio)


def solution_text(sol: MCSolution) -> str:
    return sol.to_text()


def compare_with_completion(d0: ScatteringDiagram, order: int = 3) -> tuple[bool, ScatteringDiagram, ScatteringDiagram]:
    """``diagram_of(solve(d0))`` against ``complete(d0)``, both truncated to ``order``."""
    d0 = d0.truncate(order)
    mc = diagram_of(solve(input_from_diagram(d0), order))
    full = complete(ScatteringDiagram(order, d0.walls, ()))
    return mc == full, mc, full


__all__ = [
    "WALL_SIGN", "SupportLabel", "SupportedTerm", "MCSolution", "Tree", "Line", "Ray", "Point",
    "bracket_supported", "propagate", "solve", "diagram_of", "enumerate_trees", "input_from_diagram",
    "pin_wall_sign", "compare_with_completion", "tree_totals", "correction_totals", "orientation",
]
