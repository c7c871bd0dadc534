"""Toric fans, tropical disks and the perturbed superpotential.

``W_k(Q)`` is computed by monomial transport: broken lines come in from
infinity along a fan ray carrying ``t^lambda_j z^m_j`` and, at each wall they
cross, either pass straight or pick one term of the wall-crossing image of
their monomial.  A broken line carrying ``z^m`` travels in direction ``-m``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra import (
    Monomial,
    TruncatedSeries,
    angle_key,
    det,
    pair,
    primitive_part,
)
from .scattering import (
    INCOMING,
    RAY,
    DiagramError,
    InvariantError,
    ScatteringDiagram,
    Wall,
    as_point,
    complete,
    is_consistent,
    path_automorphism,
    singular_points,
)


log = logging.getLogger(__name__)


class GenericityError(DiagramError):
    """Input points or endpoints are not in generic position."""


# ------------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class Fan:
    rays: tuple[tuple[int, int], ...]
    support: tuple[int, ...]

    def __post_init__(self):
        if len(self.rays) != len(self.support):
            raise ValueError("one support number per ray is required")
        rays = []
        for r in self.rays:
            r0, g = primitive_part(r)
            if g != 1:
                raise ValueError(f"fan ray {tuple(r)} is not primitive")
            rays.append(r0)
        if any(lam < 0 for lam in self.support):
            raise ValueError("support numbers must be nonnegative")
        order = sorted(range(len(rays)), key=lambda i: angle_key(rays[i]))
        rays = [rays[i] for i in order]
        lam = [int(self.support[i]) for i in order]
        for a, b in combinations(rays, 2):
            if det(a, b) == 0 and pair(a, b) > 0:
                raise ValueError(f"fan rays {a} and {b} coincide")
        if len(rays) < 3 or any(det(rays[i], rays[(i + 1) % len(rays)]) <= 0 for i in range(len(rays))):
            raise ValueError("fan rays do not span a complete fan")
        object.__setattr__(self, "rays", tuple(rays))
        object.__setattr__(self, "support", tuple(lam))

    @classmethod
    def p2(cls) -> "Fan":
        return cls(((1, 0), (0, 1), (-1, -1)), (0, 0, 1))

    @classmethod
    def p1xp1(cls) -> "Fan":
        return cls(((1, 0), (0, 1), (-1, 0), (0, -1)), (0, 0, 1, 1))

    @classmethod
    def from_dict(cls, data: dict) -> "Fan":
        return cls(tuple(tuple(int(x) for x in r) for r in data["rays"]),
                   tuple(int(x) for x in data.get("support", [0] * len(data["rays"]))))

    def to_dict(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "support": list(self.support)}


def hori_vafa(fan: Fan, order: int) -> TruncatedSeries:
    """``sum_j t^lambda_j z^m_j``."""
    return TruncatedSeries(
        ((Monomial(m, lam, ()), 1) for m, lam in zip(fan.rays, fan.support)), order
    )


def log_derivatives(W: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """``(x dW/dx, y dW/dy)``: each term weighted by its exponent."""
    return (
        TruncatedSeries(((k, c * k.m[0]) for k, c in W.terms.items()), W.order),
        TruncatedSeries(((k, c * k.m[1]) for k, c in W.terms.items()), W.order),
    )


# ------------------------------------------------------------------------------
# tropical disks


@dataclass(frozen=True)
class Edge:
    start: str
    end: str | None  # None for an unbounded edge leaving ``start``
    direction: tuple[int, int]  # primitive, pointing from start
    weight: int
    marking: int | None = None


@dataclass
class TropicalDisk:
    vertices: dict[str, tuple[Fraction, Fraction]]
    edges: list[Edge]
    out: str  # the stop vertex V_out

    def __post_init__(self):
        for e in self.edges:
            if (e.weight == 0) != (e.marking is not None):
                raise ValueError("an edge has weight zero exactly when it is marked")
            if e.marking is not None and e.end is not None:
                raise ValueError("marked edges are unbounded and contracted")
            if e.end is not None:
                a, b = self.vertices[e.start], self.vertices[e.end]
                d = (b[0] - a[0], b[1] - a[1])
                if det(d, e.direction) != 0 or pair(d, e.direction) <= 0:
                    raise ValueError(f"edge {e.start}-{e.end} does not point along {e.direction}")


def check_balancing(disk: TropicalDisk) -> tuple[bool, dict[str, str]]:
    """Balancing at every vertex except ``V_out``."""
    sums: dict[str, list[int]] = {v: [0, 0] for v in disk.vertices}
    for e in disk.edges:
        sums[e.start][0] += e.weight * e.direction[0]
        sums[e.start][1] += e.weight * e.direction[1]
        if e.end is not None:
            sums[e.end][0] -= e.weight * e.direction[0]
            sums[e.end][1] -= e.weight * e.direction[1]
    report = {}
    for v, s in sorted(sums.items()):
        if v == disk.out:
            report[v] = "exempt"
        else:
            report[v] = "balanced" if s == [0, 0] else f"unbalanced {tuple(s)}"
    ok = all(r in ("balanced", "exempt") for r in report.values())
    return ok, report


def maslov_index(disk: TropicalDisk) -> int:
    """``2 (N - d)``."""
    N = sum(1 for e in disk.edges if e.end is None and e.weight > 0)
    d = sum(1 for e in disk.edges if e.marking is not None)
    return 2 * (N - d)


# ------------------------------------------------------------------------------
# the diagram of Maslov index 0 disks


def check_generic(fan: Fan, points: Sequence) -> None:
    pts = [as_point(p) for p in points]
    if len(set(pts)) != len(pts):
        raise GenericityError("marked points must be pairwise distinct")
    for (i, p), (j, q) in combinations(enumerate(pts, 1), 2):
        d = (q[0] - p[0], q[1] - p[1])
        for m in fan.rays:
            if det(d, m) == 0:
                raise GenericityError(f"P{i} and P{j} lie on a common line in fan direction {m}")


def initial_diagram(fan: Fan, points: Sequence, order: int) -> ScatteringDiagram:
    """Rays ``P_i - R_{>=0} m_j`` carrying ``1 + u_i t^lambda_j z^m_j``."""
    check_generic(fan, points)
    pts = [as_point(p) for p in points]
    walls = []
    for i, p in enumerate(pts, 1):
        for m, lam in zip(fan.rays, fan.support):
            if lam >= order:
                continue
            fn = TruncatedSeries(((Monomial((0, 0)), 1), (Monomial(m, lam, (i,)), 1)), order)
            walls.append(Wall((-m[0], -m[1]), p, RAY, INCOMING, fn))
    return ScatteringDiagram(order, tuple(walls), tuple(pts))


def drop_marker(d: ScatteringDiagram, i: int) -> ScatteringDiagram:
    """The diagram with ``u_i = 0``; walls that become trivial are removed."""
    walls = []
    for w in d.walls:
        f = TruncatedSeries(((k, c) for k, c in w.fn.terms.items() if i not in k.S), d.order)
        if f != 1:
            walls.append(Wall(w.m, w.base, w.kind, w.align, f))
    return ScatteringDiagram(d.order, tuple(walls), d.excluded)


def point_walls(fan: Fan, d: ScatteringDiagram, i: int) -> list[Wall]:
    """Walls emitted at ``P_i`` by disks whose stop edge runs through ``P_i``.

    Every term ``c z^m`` of ``W(P_i) - W_0`` (computed with ``u_i = 0``)
    marks a Maslov index 2 disk passing through ``P_i``; marking it there
    gives a Maslov index 0 disk whose stops fill the ray ``P_i - R_{>=0} m``.
    Terms with ``m = 0`` have no direction and are skipped.
    """
    P = d.excluded[i - 1]
    order = d.order
    W = potential_at(fan, drop_marker(d, i), P) - hori_vafa(fan, order)
    marker = Monomial((0, 0), 0, (i,))
    groups: dict[tuple[int, int], list] = {}
    for k, c in W.items():
        if k.m == (0, 0):
            log.debug("P%d: skipping direction-free term %s", i, k)
            continue
        mono = k.times(marker)
        if mono is None or mono.j >= order:
            continue
        m0, _ = primitive_part(k.m)
        groups.setdefault(m0, []).append((mono, c))
    walls = []
    for m0 in sorted(groups, key=angle_key):
        fn = TruncatedSeries([(Monomial((0, 0)), 1)] + groups[m0], order)
        walls.append(Wall((-m0[0], -m0[1]), P, RAY, INCOMING, fn))
    return walls


def scattering_diagram(fan: Fan, points: Sequence, order: int) -> ScatteringDiagram:
    """The diagram of Maslov index 0 disks, certified consistent away from the points.

    Starts from :func:`initial_diagram`, completes, then adds the walls
    emitted at each marked point (see :func:`point_walls`) and completes
    again.  Each round raises the marker degree of the new walls, so at
    most ``k`` rounds change anything.
    """
    d0 = initial_diagram(fan, points, order)
    d = complete(d0)
    for _ in range(len(d0.excluded)):
        extra = [w for i in range(1, len(d0.excluded) + 1) for w in point_walls(fan, d, i)]
        nd = complete(d0.with_walls(extra))
        if nd == d:
            break
        d = nd
    cert = is_consistent(d)
    if not cert.consistent:
        raise InvariantError("completed diagram failed certification:\n" + cert.to_text())
    return d


# ------------------------------------------------------------------------------
# broken lines


@dataclass(frozen=True)
class Bend:
    wall: int  # index into the diagram's walls
    term: Monomial  # selected term of the wall-crossing factor
    coeff: Fraction
    point: tuple[Fraction, Fraction] | None = None


@dataclass(frozen=True)
class BrokenLine:
    ray: int  # index of the fan ray it comes in along
    monomials: tuple[tuple[Monomial, Fraction], ...]  # carried term on each segment
    bends: tuple[Bend, ...]
    endpoint: tuple[Fraction, Fraction]

    @property
    def final(self) -> tuple[Monomial, Fraction]:
        return self.monomials[-1]

    def segments(self):
        """``(term, start, end)`` per segment, ``start`` None for the unbounded one."""
        pts = [None] + [b.point for b in self.bends] + [self.endpoint]
        return [(self.monomials[i], pts[i], pts[i + 1]) for i in range(len(self.monomials))]


def _bend_options(wall: Wall, m, order: int, cache: dict):
    """Terms of ``Theta^s(z^m) / z^m - 1`` for the crossing made travelling along ``-m``."""
    e = pair(m, wall.n)
    if e == 0:
        return ()
    s = 1 if -e > 0 else -1
    key = (id(wall), s * e)
    opts = cache.get(key)
    if opts is None:
        opts = tuple((wall.fn ** (s * e) - 1).items())
        cache[key] = opts
    return opts


def _hit(x, m, wall: Wall):
    """First parameter ``s > 0`` with ``x + s m`` on the wall, and the point."""
    dd = det(m, wall.m)
    if dd == 0:
        return None
    diff = (wall.base[0] - x[0], wall.base[1] - x[1])
    s = Fraction(det(diff, wall.m), dd)
    if s <= 0:
        return None
    q = (x[0] + s * m[0], x[1] + s * m[1])
    if not wall.contains(q):
        return None
    return q


def _on_segment(p, a, b) -> bool:
    d = (b[0] - a[0], b[1] - a[1])
    e = (p[0] - a[0], p[1] - a[1])
    if det(d, e) != 0:
        return False
    t = pair(e, d)
    return 0 <= t <= pair(d, d)


def _realize(d: ScatteringDiagram, Q, chain, sing) -> list | None:
    """Trace a bend sequence backwards from ``Q``; bend points or None."""
    x = Q
    pts = []
    for (m, _), wi in reversed(chain):
        q = _hit(x, m, d.walls[wi])
        if q is None:
            return None
        if q in sing:
            raise GenericityError("a broken line bends at a singular point; move the endpoint")
        for p in sing:
            if p != q and _on_segment(p, q, x):
                raise GenericityError("a broken line passes through a singular point; move the endpoint")
        pts.append(q)
        x = q
    return pts[::-1]


def broken_lines(fan: Fan, d: ScatteringDiagram, Q) -> list[BrokenLine]:
    """All broken lines ending at ``Q``, modulo the diagram's truncation."""
    Q = as_point(Q)
    if any(w.contains(Q) for w in d.walls):
        raise GenericityError(f"endpoint {Q} lies on the support of the diagram")
    order = d.order
    sing = set(singular_points(d))
    cache: dict = {}
    found: list[BrokenLine] = []

    def visit(ray, mono, coeff, chain):
        monos = [(Monomial(fan.rays[ray], fan.support[ray], ()), Fraction(1))]
        for step in chain:
            monos.append(step[2])
        # the segment leaving bend i carries monos[i + 1]
        pts = _realize(d, Q, [((monos[i + 1][0].m, None), chain[i][0]) for i in range(len(chain))], sing) if chain else []
        if pts is not None:
            bends = tuple(Bend(c[0], c[1][0], c[1][1], p) for c, p in zip(chain, pts))
            found.append(BrokenLine(ray, tuple(monos), bends, Q))
        for wi, wall in enumerate(d.walls):
            for term, c in _bend_options(wall, mono.m, order, cache):
                if mono.j + term.j >= order:
                    continue
                new = mono.times(term)
                if new is None:
                    continue
                visit(ray, new, coeff * c, chain + [(wi, (term, c), (new, coeff * c))])

    for r, (m, lam) in enumerate(zip(fan.rays, fan.support)):
        if lam >= order:
            continue
        visit(r, Monomial(m, lam, ()), Fraction(1), [])
    found.sort(key=lambda b: (b.ray, b.final[0].sort_key(), [(x.wall, x.term.sort_key()) for x in b.bends]))
    return found


def potential_from_lines(lines: Sequence[BrokenLine], order: int) -> TruncatedSeries:
    return TruncatedSeries((b.final for b in lines), order)


def potential_at(fan: Fan, d: ScatteringDiagram, Q) -> TruncatedSeries:
    return potential_from_lines(broken_lines(fan, d, Q), d.order)


def perturbed_potential(fan: Fan, points: Sequence, Q, order: int) -> TruncatedSeries:
    """``W_k(Q)``: sum of the final monomials of all broken lines ending at ``Q``."""
    return potential_at(fan, scattering_diagram(fan, points, order), Q)


@dataclass
class WallCrossingReport:
    holds: bool
    direct: TruncatedSeries  # W(Q-)
    transported: TruncatedSeries  # Theta_gamma(W(Q+))
    crossings: int = 0


def wall_crossing_report(fan: Fan, d: ScatteringDiagram, q_plus, q_minus) -> WallCrossingReport:
    from .scattering import crossings_along

    q_plus, q_minus = as_point(q_plus), as_point(q_minus)
    w_plus = potential_at(fan, d, q_plus)
    w_minus = potential_at(fan, d, q_minus)
    if q_plus == q_minus:
        return WallCrossingReport(True, w_minus, w_plus, 0)
    theta = path_automorphism(d, q_plus, q_minus)
    moved = theta.apply(w_plus)
    return WallCrossingReport(moved == w_minus, w_minus, moved, len(crossings_along(d, q_plus, q_minus)))


def wall_crossing_check(fan: Fan, points: Sequence, q_plus, q_minus, order: int) -> bool:
    """``W_k(Q-) == Theta_gamma(W_k(Q+))`` along the straight path ``Q+ -> Q-``."""
    d = scattering_diagram(fan, points, order)
    return wall_crossing_report(fan, d, q_plus, q_minus).holds


# ------------------------------------------------------------------------------
# disks behind broken lines


def _marker_decomposition(fan: Fan, term: Monomial) -> list[int] | None:
    """Fan rays, one per marker, summing to the term's exponent and t-degree."""
    S = term.S
    def search(i, m, j, acc):
        if i == len(S):
            return acc if (m == (0, 0) and j == 0) else None
        for r, (ray, lam) in enumerate(zip(fan.rays, fan.support)):
            if lam <= j:
                out = search(i + 1, (m[0] - ray[0], m[1] - ray[1]), j - lam, acc + [r])
                if out is not None:
                    return out
        return None
    return search(0, term.m, term.j, [])


def disk_counts(fan: Fan, line: BrokenLine) -> tuple[int, int]:
    """``(N, d)`` of the disk obtained by attaching Maslov index 0 trees at the bends.

    Each marker in a selected bend term stands for one marked point and one
    unbounded edge of the attached tree; the decomposition into fan rays is
    checked.
    """
    N, dd = 1, 0
    for b in line.bends:
        if not b.term.S:
            raise DiagramError("bend term without markers has no disk interpretation")
        if _marker_decomposition(fan, b.term) is None:
            raise DiagramError(f"bend term {b.term} is not a sum of fan rays")
        N += len(b.term.S)
        dd += len(b.term.S)
    return N, dd


def disk_of(fan: Fan, d: ScatteringDiagram, line: BrokenLine) -> TropicalDisk:
    """Explicit disk for a broken line bending only on initial walls."""
    verts: dict[str, tuple] = {"Q": line.endpoint}
    edges: list[Edge] = []
    prev = "Q"
    segs = line.segments()
    for i in range(len(segs) - 1, -1, -1):
        (mono, _), start, end = segs[i]
        prim, g = primitive_part(mono.m)
        if start is None:
            edges.append(Edge(prev, None, prim, g))
            break
        name = f"B{i}"
        verts[name] = start
        edges.append(Edge(prev, name, prim, g))
        bend = line.bends[i - 1]
        wall = d.walls[bend.wall]
        if len(bend.term.S) != 1 or wall.base not in d.excluded:
            raise DiagramError("explicit disks are only built for bends on initial walls")
        (marker,) = bend.term.S
        pname = f"P{marker}"
        verts[pname] = wall.base
        back = (-wall.m[0], -wall.m[1])
        edges.append(Edge(name, pname, back, 1))
        edges.append(Edge(pname, None, back, 1))
        edges.append(Edge(pname, None, (1, 0), 0, marking=marker))
        prev = name
    return TropicalDisk(verts, edges, "Q")
