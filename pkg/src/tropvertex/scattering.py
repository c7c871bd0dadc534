"""Walls, scattering diagrams, path-ordered products and completion.

Conventions
-----------
A wall with primitive direction ``m`` has normal ``n = (-m_y, m_x)`` and
automorphism ``Theta(z^m') = z^m' f^<m', n>``.  A path crossing the wall
from the side where ``n`` is negative to the side where it is positive picks
up ``Theta``; the opposite crossing picks up ``Theta^-1``.  Crossings are
composed in the order they occur, later crossings acting last
(``Theta_gamma = Theta_r o ... o Theta_1``).  With these choices the
pentagon diagram is consistent.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .algebra import (
    SeriesError,
    TruncatedSeries,
    angle_key,
    det,
    from_text,
    normal,
    pair,
    primitive_part,
    to_text,
)
from .vertexgroup import (
    Automorphism,
    LieElement,
    compose_all,
    lie_to_text,
    log_derivation,
)

log = logging.getLogger(__name__)

LINE = "line"
RAY = "ray"
OUTGOING = "outgoing"
INCOMING = "incoming"

Point = tuple  # (Fraction, Fraction)


class InvariantError(RuntimeError):
    """An internal invariant failed; points at a bug rather than bad input."""


class DiagramError(ValueError):
    """Malformed diagram or a violated algorithmic invariant."""


def as_point(p) -> tuple[Fraction, Fraction]:
    return (Fraction(p[0]), Fraction(p[1]))


@lru_cache(maxsize=4096)
def _wall_automorphism(fn: TruncatedSeries, n: tuple[int, int], power: int) -> Automorphism:
    return Automorphism.from_wall_function(fn, n, power)


@dataclass(frozen=True)
class Wall:
    m: tuple[int, int]
    base: tuple[Fraction, Fraction]
    kind: str
    align: str
    fn: TruncatedSeries

    def __post_init__(self):
        m0, g = primitive_part(self.m)
        if g != 1:
            raise DiagramError(f"wall direction {self.m} is not primitive")
        object.__setattr__(self, "m", m0)
        object.__setattr__(self, "base", as_point(self.base))
        if self.kind not in (LINE, RAY):
            raise DiagramError(f"unknown wall kind {self.kind!r}")
        if self.align not in (OUTGOING, INCOMING):
            raise DiagramError(f"unknown wall alignment {self.align!r}")
        mono_dir = m0 if self.align == OUTGOING else (-m0[0], -m0[1])
        if self.fn.constant() != 1:
            raise DiagramError("wall function must have constant term 1")
        for k, _ in (self.fn - 1).items():
            if not (k.j > 0 or k.S):
                raise DiagramError("wall function terms need positive filtration order")
            if k.m == (0, 0):
                raise DiagramError("wall function terms need a nonzero exponent")
            d, _ = primitive_part(k.m)
            if d != mono_dir:
                raise DiagramError(
                    f"wall function exponent {k.m} is not a positive multiple of {mono_dir}"
                )

    @property
    def n(self) -> tuple[int, int]:
        return normal(self.m)

    @property
    def order(self) -> int:
        return self.fn.order

    def log(self) -> LieElement:
        """``log(f) d_n``."""
        return LieElement.from_function(self.fn.log(), self.n)

    def automorphism(self, power: int = 1) -> Automorphism:
        return _wall_automorphism(self.fn, self.n, power)

    def contains(self, p) -> bool:
        d = (p[0] - self.base[0], p[1] - self.base[1])
        if det(d, self.m) != 0:
            return False
        return self.kind == LINE or pair(d, self.m) >= 0

    def side(self, p) -> int:
        """Sign of ``p`` relative to the wall's line, measured along ``n``."""
        d = (p[0] - self.base[0], p[1] - self.base[1])
        s = pair(d, self.n)
        return (s > 0) - (s < 0)

    def sort_key(self):
        return (
            0 if self.kind == LINE else 1,
            self.base,
            angle_key(self.m),
            self.align,
            to_text(self.fn),
        )


def make_wall(m, base, fn, kind=LINE, align=OUTGOING) -> Wall:
    return Wall(tuple(m), as_point(base), kind, align, fn)


@dataclass(frozen=True)
class ScatteringDiagram:
    order: int
    walls: tuple[Wall, ...] = ()
    excluded: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "excluded", tuple(as_point(p) for p in self.excluded))
        for w in self.walls:
            if w.order != self.order:
                raise DiagramError(f"wall truncation order {w.order} != diagram order {self.order}")

    def canonical(self) -> "ScatteringDiagram":
        walls = tuple(sorted(self.walls, key=Wall.sort_key))
        return ScatteringDiagram(self.order, walls, tuple(sorted(set(self.excluded))))

    def with_walls(self, extra: Iterable[Wall]) -> "ScatteringDiagram":
        return ScatteringDiagram(self.order, self.walls + tuple(extra), self.excluded)

    def markers(self) -> set[int]:
        out: set[int] = set()
        for w in self.walls:
            out |= w.fn.markers()
        return out

    def truncate(self, order: int) -> "ScatteringDiagram":
        walls = []
        for w in self.walls:
            f = w.fn.truncate(order)
            if f != 1:
                walls.append(Wall(w.m, w.base, w.kind, w.align, f))
        return ScatteringDiagram(order, tuple(walls), self.excluded)

    def merged(self) -> "ScatteringDiagram":
        """Multiply together walls with identical support and alignment."""
        groups: dict[tuple, TruncatedSeries] = {}
        for w in self.walls:
            kind, base, m = _support_key(w)
            align = w.align
            if m != w.m:
                # a line read backwards: same automorphism, opposite alignment
                align = INCOMING if align == OUTGOING else OUTGOING
            key = (kind, base, m, align)
            groups[key] = groups[key] * w.fn if key in groups else w.fn
        walls = []
        for (kind, base, m, align), f in groups.items():
            if f != 1:
                walls.append(Wall(m, base, kind, align, f))
        return ScatteringDiagram(self.order, tuple(walls), self.excluded).canonical()

    def __eq__(self, other):
        if not isinstance(other, ScatteringDiagram):
            return NotImplemented
        a, b = self.merged(), other.merged()
        return a.order == b.order and a.walls == b.walls and a.excluded == b.excluded

    def __hash__(self):
        m = self.merged()
        return hash((m.order, m.walls, m.excluded))


def _support_key(w: Wall):
    if w.kind == RAY:
        return (RAY, w.base, w.m)
    # lines: direction up to sign, base moved to the foot of the perpendicular from 0
    m = w.m if (w.m[0] > 0 or (w.m[0] == 0 and w.m[1] > 0)) else (-w.m[0], -w.m[1])
    b = w.base
    s = Fraction(pair(b, m), pair(m, m))
    return (LINE, (b[0] - s * m[0], b[1] - s * m[1]), m)


# ------------------------------------------------------------------------------
# geometry


def intersect(w1: Wall, w2: Wall):
    """Transversal intersection point of two supports, or ``None``."""
    dd = det(w1.m, w2.m)
    if dd == 0:
        return None
    diff = (w2.base[0] - w1.base[0], w2.base[1] - w1.base[1])
    s = Fraction(det(diff, w2.m), dd)
    r = Fraction(det(diff, w1.m), dd)
    if w1.kind == RAY and s < 0:
        return None
    if w2.kind == RAY and r < 0:
        return None
    return (w1.base[0] + s * w1.m[0], w1.base[1] + s * w1.m[1])


def support(d: ScatteringDiagram) -> list[tuple]:
    """Supports as ``(kind, base, direction)``, deduplicated."""
    return sorted({_support_key(w) for w in d.walls}, key=lambda k: (k[0], k[1], angle_key(k[2])))


def singular_points(d: ScatteringDiagram) -> list[tuple[Fraction, Fraction]]:
    """Ray endpoints together with transversal pairwise intersections."""
    pts = set()
    walls = d.walls
    for w in walls:
        if w.kind == RAY:
            pts.add(w.base)
    for i, w1 in enumerate(walls):
        for w2 in walls[i + 1:]:
            p = intersect(w1, w2)
            if p is not None:
                pts.add(p)
    return sorted(pts)


def _half_lines(d: ScatteringDiagram, p):
    out = []
    for w in d.walls:
        if not w.contains(p):
            continue
        neg = (-w.m[0], -w.m[1])
        if w.kind == RAY and w.base == p:
            out.append((w.m, w))
        else:
            out.append((w.m, w))
            out.append((neg, w))
    return out


def generic_base_direction(directions: Iterable[tuple]) -> tuple[int, int]:
    """A direction just clockwise of the positive x-axis, avoiding ``directions``."""
    dirs = list(directions)
    k = 1000
    while any(det((k, -1), v) == 0 for v in dirs):
        k += 1
    return (k, -1)


def crossing_sequence(d: ScatteringDiagram, p, base_direction=None) -> list[tuple[Wall, int]]:
    """Walls met by a small counterclockwise loop around ``p``, with signs.

    The sign is +1 when the loop passes from the n-negative to the
    n-positive side of the wall.
    """
    p = as_point(p)
    if p not in set(singular_points(d)):
        raise DiagramError(f"{_fmt_point(p)} is not a singular point of the diagram")
    half = _half_lines(d, p)
    if base_direction is None:
        base_direction = generic_base_direction(h for h, _ in half)
    elif any(det(base_direction, h) == 0 and pair(base_direction, h) > 0 for h, _ in half):
        raise DiagramError("base direction lies on a wall")
    b = angle_key(base_direction)

    def key(item):
        h, w = item
        a = angle_key(h)
        return (0 if a > b else 1, a, w.sort_key())

    out = []
    for h, w in sorted(half, key=key):
        rot = (-h[1], h[0])
        s = pair(rot, w.n)
        out.append((w, 1 if s > 0 else -1))
    return out


def path_ordered_product(d: ScatteringDiagram, p, base_direction=None) -> Automorphism:
    seq = crossing_sequence(d, p, base_direction)
    return compose_all((w.automorphism(s) for w, s in seq), d.order)


def crossings_along(d: ScatteringDiagram, start, end) -> list[tuple[Wall, int]]:
    """Walls crossed by the straight path ``start -> end`` in order, with signs."""
    start, end = as_point(start), as_point(end)
    v = (end[0] - start[0], end[1] - start[1])
    hits = []
    sing = set(singular_points(d))
    for w in d.walls:
        dd = det(v, w.m)
        if dd == 0:
            if w.contains(start) or w.contains(end):
                raise DiagramError("path runs along a wall")
            continue
        diff = (w.base[0] - start[0], w.base[1] - start[1])
        s = Fraction(det(diff, w.m), dd)  # parameter along the path
        if not (0 <= s <= 1):
            continue
        q = (start[0] + s * v[0], start[1] + s * v[1])
        if not w.contains(q):
            continue
        if s in (0, 1):
            raise DiagramError(f"path endpoint {_fmt_point(q)} lies on a wall")
        if q in sing:
            raise DiagramError(f"path passes through the singular point {_fmt_point(q)}")
        hits.append((s, w.sort_key(), w, 1 if pair(v, w.n) > 0 else -1))
    hits.sort(key=lambda h: (h[0], h[1]))
    return [(w, sgn) for _, _, w, sgn in hits]


def path_automorphism(d: ScatteringDiagram, start, end) -> Automorphism:
    """Path-ordered product along the straight path ``start -> end``."""
    return compose_all((w.automorphism(s) for w, s in crossings_along(d, start, end)), d.order)


# ------------------------------------------------------------------------------
# consistency


@dataclass
class Failure:
    point: tuple[Fraction, Fraction]
    log: LieElement
    first_order: int


@dataclass
class ConsistencyCertificate:
    consistent: bool
    failures: list[Failure] = field(default_factory=list)
    checked: list[tuple[Fraction, Fraction]] = field(default_factory=list)

    def to_text(self) -> str:
        lines = ["consistent" if self.consistent else "inconsistent"]
        lines.append(f"checked {len(self.checked)} singular point(s)")
        for f in self.failures:
            lines.append(
                f"failure at {_fmt_point(f.point)} (first order {f.first_order}): log = {lie_to_text(f.log)}"
            )
        return "\n".join(lines) + "\n"


def is_consistent(d: ScatteringDiagram, base_direction=None) -> ConsistencyCertificate:
    excluded = set(d.excluded)
    failures = []
    checked = []
    for p in singular_points(d):
        if p in excluded:
            continue
        checked.append(p)
        theta = path_ordered_product(d, p, base_direction)
        if theta.is_identity():
            continue
        x = log_derivation(theta)
        failures.append(Failure(p, x, x.min_filtration()))
    return ConsistencyCertificate(not failures, failures, checked)


def max_filtration(d: ScatteringDiagram) -> int:
    return d.order - 1 + len(d.markers())


def complete(d0: ScatteringDiagram) -> ScatteringDiagram:
    """Add outgoing rays until every non-excluded singular point is consistent.

    Works up the filtration (t-degree plus marker degree).  At each order
    the residual ``log Theta_gamma`` at every singular point is split by
    primitive exponent direction and cancelled by a ray in that direction.
    """
    excluded = set(d0.excluded)
    added: dict[tuple, TruncatedSeries] = {}
    one = TruncatedSeries.one(d0.order)
    top = max_filtration(d0)

    def current() -> ScatteringDiagram:
        rays = [Wall(m, p, RAY, OUTGOING, f) for (p, m), f in added.items() if f != 1]
        return d0.with_walls(rays)

    for k in range(1, top + 1):
        d = current()
        updates: dict[tuple, TruncatedSeries] = {}
        for p in singular_points(d):
            if p in excluded:
                continue
            theta = path_ordered_product(d, p)
            if theta.is_identity():
                continue
            x = log_derivation(theta)
            low = x.min_filtration()
            if low < k:
                raise InvariantError(
                    f"residual of order {low} < {k} at {_fmt_point(p)}; completion invariant broken"
                )
            residual = x.homogeneous(k)
            for direction, part in sorted(residual.by_direction().items(), key=lambda kv: angle_key(kv[0])):
                if not part.in_h():
                    raise InvariantError(
                        f"residual at {_fmt_point(p)} has a term with n not orthogonal to m: {lie_to_text(part)}"
                    )
                g = part.function_along(normal(direction))
                key = (p, direction)
                updates[key] = updates.get(key, one) * (one - g)
        for key, f in updates.items():
            added[key] = added.get(key, one) * f
        log.debug("order %d: %d ray update(s)", k, len(updates))

    out = current()
    return ScatteringDiagram(out.order, tuple(d0.walls) + tuple(
        sorted(out.walls[len(d0.walls):], key=Wall.sort_key)), d0.excluded)


def added_rays(d0: ScatteringDiagram, d: ScatteringDiagram) -> list[Wall]:
    """Walls of ``d`` beyond the initial ones of ``d0``."""
    return list(d.walls[len(d0.walls):])


# ------------------------------------------------------------------------------
# interchange format


def _fmt_frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_point(p) -> str:
    return f"({_fmt_frac(p[0])}, {_fmt_frac(p[1])})"


def diagram_to_dict(d: ScatteringDiagram) -> dict:
    d = d.canonical()
    return {
        "order": d.order,
        "excluded": [[_fmt_frac(x) for x in p] for p in d.excluded],
        "walls": [
            {
                "m": list(w.m),
                "base": [_fmt_frac(x) for x in w.base],
                "kind": w.kind,
                "align": w.align,
                "n": list(w.n),
                "fn": to_text(w.fn),
            }
            for w in d.walls
        ],
    }


def diagram_to_json(d: ScatteringDiagram) -> str:
    return json.dumps(diagram_to_dict(d), indent=2) + "\n"


def diagram_from_dict(data: dict) -> ScatteringDiagram:
    try:
        order = int(data["order"])
        if order < 1:
            raise DiagramError("order must be positive")
        excluded = tuple((Fraction(a), Fraction(b)) for a, b in data.get("excluded", []))
        walls = []
        for i, w in enumerate(data.get("walls", [])):
            try:
                fn = from_text(w["fn"], order)
                wall = Wall(
                    tuple(int(x) for x in w["m"]),
                    (Fraction(w["base"][0]), Fraction(w["base"][1])),
                    w.get("kind", LINE),
                    w.get("align", OUTGOING),
                    fn,
                )
            except (KeyError, TypeError, ValueError, SeriesError) as exc:
                raise DiagramError(f"wall {i}: {exc}") from exc
            if "n" in w and tuple(w["n"]) != wall.n:
                raise DiagramError(f"wall {i}: n = {w['n']} is not the oriented normal {wall.n}")
            walls.append(wall)
    except (KeyError, TypeError) as exc:
        raise DiagramError(f"missing or malformed field: {exc}") from exc
    return ScatteringDiagram(order, tuple(walls), excluded)


def diagram_from_json(text: str) -> ScatteringDiagram:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise DiagramError("top level must be an object")
    return diagram_from_dict(data)


def two_wall_diagram(order: int, f1: TruncatedSeries, f2: TruncatedSeries,
                     m1=(1, 0), m2=(0, 1), base=(0, 0), base2=None) -> ScatteringDiagram:
    """Two lines, the first through ``base`` and the second through ``base2``."""
    return ScatteringDiagram(
        order,
        (make_wall(m1, base, f1), make_wall(m2, base if base2 is None else base2, f2)),
    )


def pentagon(order: int = 8) -> ScatteringDiagram:
    one = TruncatedSeries.one(order)
    return two_wall_diagram(
        order,
        one + TruncatedSeries.monomial(order, (1, 0), 1),
        one + TruncatedSeries.monomial(order, (0, 1), 1),
    )
