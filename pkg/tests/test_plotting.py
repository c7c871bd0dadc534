import pytest

from tropvertex.plotting import PlotError, _chambers, _clip, amoeba_points, amoeba_svg, diagram_svg, parse_laurent
from tropvertex.scattering import LINE, RAY, complete, pentagon


def test_clip():
    assert _clip((0, 0), (1, 1), RAY, (-2, -2, 2, 2)) == ((0.0, 0.0), (2.0, 2.0))
    assert _clip((0, 0), (1, 0), LINE, (-2, -2, 2, 2)) == ((-2.0, 0.0), (2.0, 0.0))
    assert _clip((5, 5), (1, 0), RAY, (-2, -2, 2, 2)) is None


def test_pentagon_has_five_chambers():
    d = complete(pentagon(3))
    segs = [_clip(w.base, w.m, w.kind, (-3, -3, 3, 3)) for w in d.walls]
    assert len(_chambers(segs, (-3, -3, 3, 3))) == 5
    svg = diagram_svg(d, (-3, -3, 3, 3))
    assert svg.count("<polygon") == 5
    assert "1 + t^2xy" in svg


def test_parse_laurent():
    assert parse_laurent("1 + x + y") == {(0, 0): 1, (1, 0): 1, (0, 1): 1}
    assert parse_laurent("x**-1*y + 2*y**2 + 1") == {(-1, 1): 1, (0, 2): 2, (0, 0): 1}
    with pytest.raises(PlotError):
        parse_laurent("1 + x")
    with pytest.raises(PlotError):
        parse_laurent("1 + x + y**(1/2)")


def test_amoeba_of_a_line_hugs_the_tropical_line():
    # far from the origin the amoeba of 1 + x + y is close to max(0, u, v) being attained twice
    pts = amoeba_points(parse_laurent("1 + x + y"), 1000.0, (-3, -3, 3, 3), samples=400, seed=1)
    assert pts
    for u, v in pts:
        top = sorted([0.0, u, v])
        assert top[2] - top[1] < 0.2


def test_amoeba_is_deterministic():
    assert amoeba_svg("1 + x + y", 2.0, samples=100, seed=3) == amoeba_svg("1 + x + y", 2.0, samples=100, seed=3)
