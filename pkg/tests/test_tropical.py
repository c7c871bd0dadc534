import random
from fractions import Fraction

import pytest
from _util import random_point_near, random_points

from tropvertex.algebra import Monomial, from_text
from tropvertex.scattering import INCOMING, RAY, DiagramError, crossings_along, is_consistent
from tropvertex.tropical import (
    Edge,
    Fan,
    GenericityError,
    TropicalDisk,
    broken_lines,
    check_balancing,
    check_generic,
    disk_counts,
    disk_of,
    drop_marker,
    hori_vafa,
    initial_diagram,
    log_derivatives,
    maslov_index,
    perturbed_potential,
    point_walls,
    potential_at,
    scattering_diagram,
    wall_crossing_check,
    wall_crossing_report,
)

P2 = Fan.p2()


def test_fan_normalises_and_validates():
    fan = Fan(((-1, -1), (0, 1), (1, 0)), (1, 0, 0))
    assert fan == P2
    assert Fan.from_dict(P2.to_dict()) == P2
    assert Fan.p1xp1().rays == ((1, 0), (0, 1), (-1, 0), (0, -1))
    with pytest.raises(ValueError):
        Fan(((2, 0), (0, 1), (-1, -1)), (0, 0, 0))
    with pytest.raises(ValueError):
        Fan(((1, 0), (0, 1), (1, 1)), (0, 0, 0))  # not complete
    with pytest.raises(ValueError):
        Fan(((1, 0), (1, 0), (0, 1), (-1, -1)), (0, 0, 0, 0))
    with pytest.raises(ValueError):
        Fan(((1, 0), (0, 1)), (0,))


def test_hori_vafa_and_jacobian_generators():
    W = hori_vafa(P2, 3)
    assert W == from_text("z^(1,0) + z^(0,1) + t z^(-1,-1)", 3)
    xw, yw = log_derivatives(W)
    assert xw == from_text("z^(1,0) + -1 t z^(-1,-1)", 3)
    assert yw == from_text("z^(0,1) + -1 t z^(-1,-1)", 3)


def test_genericity():
    with pytest.raises(GenericityError):
        check_generic(P2, [(0, 0), (0, 0)])
    with pytest.raises(GenericityError):
        check_generic(P2, [(0, 0), (3, 0)])
    with pytest.raises(GenericityError):
        check_generic(P2, [(0, 0), (2, 2)])  # common line in direction (-1,-1)
    check_generic(P2, [(0, 0), (1, 2)])


def test_initial_diagram():
    d = initial_diagram(P2, [(0, 0), (1, 2)], 3)
    assert len(d.walls) == 6
    assert d.excluded == ((0, 0), (1, 2))
    for w in d.walls:
        assert w.kind == RAY and w.align == INCOMING
        (term,) = [k for k, _ in w.fn.items() if k.m != (0, 0)]
        assert len(term.S) == 1
        assert w.m == (-term.m[0], -term.m[1])
        assert w.base == d.excluded[term.S[0] - 1]
    # t^1 exceeds order 1, so the (-1,-1) walls are dropped
    assert len(initial_diagram(P2, [(0, 0)], 1).walls) == 2


def test_disk_validation_and_balancing():
    with pytest.raises(ValueError):
        TropicalDisk({"A": (0, 0)}, [Edge("A", None, (1, 0), 0)], "A")
    with pytest.raises(ValueError):
        TropicalDisk({"A": (0, 0), "B": (1, 0)}, [Edge("A", "B", (0, 1), 1)], "A")
    disk = TropicalDisk(
        {"Q": (0, 0), "V": (1, 1)},
        [Edge("Q", "V", (1, 1), 1), Edge("V", None, (1, 0), 1), Edge("V", None, (0, 1), 2)],
        "Q",
    )
    ok, report = check_balancing(disk)
    assert not ok and report["V"].startswith("unbalanced")
    bal = TropicalDisk(
        {"Q": (0, 0), "V": (-1, -1)},
        [Edge("Q", "V", (-1, -1), 1), Edge("V", None, (1, 0), 1), Edge("V", None, (0, 1), 1),
         Edge("V", None, (-1, -1), 2)],
        "Q",
    )
    ok, report = check_balancing(bal)
    assert ok and report == {"Q": "exempt", "V": "balanced"}
    assert maslov_index(bal) == 6


@pytest.mark.parametrize("Q", [(1, 2), (-3, Fraction(1, 2)), (0, -5)])
def test_unperturbed_potential(Q):
    assert perturbed_potential(P2, [], Q, 4) == hori_vafa(P2, 4)
    assert perturbed_potential(Fan.p1xp1(), [], Q, 4) == hori_vafa(Fan.p1xp1(), 4)


def test_endpoint_on_a_wall_is_rejected():
    d = scattering_diagram(P2, [(0, 0)], 3)
    with pytest.raises(GenericityError):
        broken_lines(P2, d, (-2, 0))


def test_one_point_diagram_has_no_scattering():
    d = scattering_diagram(P2, [(0, 0)], 4)
    assert d == initial_diagram(P2, [(0, 0)], 4)
    assert point_walls(P2, d, 1) == []


def test_two_points_emit_walls():
    pts = [(0, 0), (Fraction(3, 2), Fraction(1, 3))]
    d = scattering_diagram(P2, pts, 4)
    assert is_consistent(d).consistent
    assert len(d.walls) > 6
    assert drop_marker(drop_marker(d, 1), 2).walls == ()


@pytest.mark.parametrize("seed", range(3))
def test_one_point_potential(seed):
    rng = random.Random(seed)
    pts = random_points(P2, 1, rng)
    d = scattering_diagram(P2, pts, 4)
    for _ in range(5):
        Q = random_point_near(rng, pts[0])
        try:
            W = potential_at(P2, d, Q)
        except DiagramError:
            continue
        assert W.set_markers_zero() == hori_vafa(P2, 4)
        assert all(len(k.S) <= 1 for k, _ in W.items())


@pytest.mark.parametrize("fan", [Fan.p2(), Fan.p1xp1()], ids=["P2", "P1xP1"])
def test_wall_crossing_two_points(fan):
    rng = random.Random(11)
    pts = random_points(fan, 2, rng)
    d = scattering_diagram(fan, pts, 4)
    done = 0
    while done < 6:
        a, b = random_point_near(rng, pts[0], 3), random_point_near(rng, pts[1], 3)
        try:
            r = wall_crossing_report(fan, d, a, b)
        except DiagramError:
            continue
        assert r.holds, (a, b)
        done += 1


def test_wall_crossing_check_wrapper():
    assert wall_crossing_check(P2, [(0, 0)], (Fraction(1, 3), 5), (5, Fraction(-1, 3)), 4)


def test_crossing_an_initial_wall_changes_the_potential():
    d = scattering_diagram(P2, [(0, 0)], 3)
    a, b = (-2, Fraction(1, 3)), (-2, Fraction(-1, 3))
    assert len(crossings_along(d, a, b)) == 1
    assert potential_at(P2, d, a) != potential_at(P2, d, b)


def test_disks_behind_broken_lines():
    pts = [(0, 0), (Fraction(3, 2), Fraction(1, 3))]
    d = scattering_diagram(P2, pts, 4)
    lines = broken_lines(P2, d, (Fraction(-7, 5), Fraction(-2, 7)))
    explicit = 0
    for bl in lines:
        N, dd = disk_counts(P2, bl)
        assert N - dd == 1
        assert N == 1 + sum(len(b.term.S) for b in bl.bends)
        try:
            disk = disk_of(P2, d, bl)
        except DiagramError:
            continue
        explicit += 1
        assert maslov_index(disk) == 2
        assert check_balancing(disk)[0]
        assert disk.vertices["Q"] == bl.endpoint
    assert explicit >= 3


def test_broken_line_segments():
    d = scattering_diagram(P2, [(0, 0)], 3)
    Q = (-2, Fraction(-1, 3))
    bent = [bl for bl in broken_lines(P2, d, Q) if bl.bends]
    assert bent
    for bl in bent:
        segs = bl.segments()
        assert segs[0][1] is None and segs[-1][2] == Q
        assert len(segs) == len(bl.bends) + 1
        assert bl.final == bl.monomials[-1]
        assert bl.final[0].S


def test_terms_are_filtered_by_order():
    d = scattering_diagram(P2, [(0, 0)], 2)
    W = potential_at(P2, d, (Fraction(1, 3), 5))
    assert all(k.j < 2 for k, _ in W.items())
    assert W.coefficient(Monomial((-1, -1), 1)) == 1


def test_unbalanced_vertex_reports_the_residual():
    # 2(1,1) + (-1,0) + (0,-1) = (1,1)
    disk = TropicalDisk(
        {"Q": (0, 0), "V": (1, 0)},
        [Edge("Q", "V", (1, 0), 1), Edge("V", None, (1, 1), 2), Edge("V", None, (0, -1), 1)],
        "Q",
    )
    ok, report = check_balancing(disk)
    assert not ok and report["V"] == "unbalanced (1, 1)"


def test_log_derivatives_of_a_constant():
    assert log_derivatives(from_text("3 + t", 3)) == (from_text("0", 3), from_text("0", 3))


def test_one_point_diagram_shape():
    d = initial_diagram(P2, [(0, 0)], 3)
    assert sorted(w.m for w in d.walls) == [(-1, 0), (0, -1), (1, 1)]
