import random
from fractions import Fraction

import pytest

from entropylab.errors import ConstraintViolation, DomainError, PreconditionError
from entropylab.maps import (PiecewiseAffineMap, Shape, build_stunted, eval_sawtooth,
                             family_member, make_geometry, polynomial_map, sawtooth_map, stunted)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_sawtooth_geometry(d):
    g = make_geometry(d)
    lam = d + 2
    assert g.lam == lam
    assert g.e == Fraction(d * lam, lam - 1)
    assert g.turning_points == tuple(Fraction(-d - 1 + 2 * i) for i in range(1, d + 1))
    # turning values are ±lambda, outside [-e, e]
    for i, c in enumerate(g.turning_points):
        assert eval_sawtooth(g, c) == (lam if g.is_max(i) else -lam)
        assert abs(eval_sawtooth(g, c)) > g.e
    # endpoints are fixed or swapped into the interval
    assert eval_sawtooth(g, -g.e) == -g.e
    assert abs(eval_sawtooth(g, g.e)) == g.e


def test_sawtooth_slopes_and_inverse_branches():
    g = make_geometry(3)
    S = sawtooth_map(g)
    assert {abs(s) for s in S.slopes()} == {g.lam}
    for j in range(4):
        lo, hi = g.lap_bounds(j)
        y = Fraction(1, 7)
        x = g.inverse_branch(j, y)
        assert lo <= x <= hi
        assert eval_sawtooth(g, x) == y


def test_minus_shape_mirrors_plus():
    plus, minus = make_geometry(2, "+"), make_geometry(2, "-")
    for x in (Fraction(-1), Fraction(1, 3), Fraction(2)):
        assert eval_sawtooth(minus, x) == -eval_sawtooth(plus, x)


def test_eval_outside_domain():
    with pytest.raises(DomainError):
        eval_sawtooth(make_geometry(1), 2)


def test_stunted_plateaus():
    p = stunted(2, ["1/2", "1/2"])
    g, T = p.geometry, build_stunted(p)
    lam = g.lam
    for i, (c, z) in enumerate(zip(g.turning_points, p.zeta)):
        value = z if g.is_max(i) else -z
        half = 1 - z / lam
        for x in (c - half, c, c + half):
            assert T(x) == value
        # outside the plateau T agrees with S
        x = c + half + Fraction(1, 100)
        assert T(x) == eval_sawtooth(g, x)


def test_full_stunted_map_is_sawtooth_clipped():
    g = make_geometry(2)
    T = build_stunted(stunted(2, [g.e, g.e]))
    for k in range(41):
        x = -g.e + 2 * g.e * Fraction(k, 40)
        assert T(x) == max(-g.e, min(g.e, eval_sawtooth(g, x)))


@pytest.mark.parametrize("zeta", [["2"], ["-2"]])
def test_box_constraint(zeta):
    with pytest.raises(ConstraintViolation):
        stunted(1, zeta)


def test_touching_constraint():
    with pytest.raises(ConstraintViolation):
        stunted(2, ["1/2", "-1"])
    stunted(2, ["1/2", "-1/2"])  # plateaus touch


def test_piecewise_affine_basics():
    F = PiecewiseAffineMap.from_points([(0, 0), (Fraction(1, 2), 1), (1, 0)])
    assert F.domain == (0, 1)
    assert F(Fraction(1, 4)) == Fraction(1, 2)
    assert F.slopes() == [2, -2]
    assert len(F.laps()) == 2
    assert F.image(Fraction(1, 4), Fraction(3, 4)) == (Fraction(1, 2), 1)


def test_piecewise_affine_matches_interpolation():
    rng = random.Random(3)
    xs = sorted({Fraction(rng.randint(0, 100), 100) for _ in range(8)} | {Fraction(0), Fraction(1)})
    ys = [Fraction(rng.randint(0, 100), 100) for _ in xs]
    F = PiecewiseAffineMap.from_points(list(zip(xs, ys)))
    for a, b, ya, yb in zip(xs, xs[1:], ys, ys[1:]):
        m = (a + b) / 2
        assert F(m) == (ya + yb) / 2


def test_logistic_family():
    f = family_member("logistic", {"lambda": 4})
    assert f.d == 1 and f.shape is Shape.PLUS
    assert f.critical_points[0] == pytest.approx(0.5, abs=1e-12)
    assert f(0.5) == pytest.approx(1.0)


def test_chebyshev_critical_points():
    f = family_member("chebyshev-3")
    assert f.d == 2
    assert f.critical_points == pytest.approx((-0.5, 0.5), abs=1e-15)


def test_cubic_family_is_anchored_self_map():
    f = family_member("cubic-fig4", {"b": 0.8})
    lo, hi = f.domain
    assert f.anchored
    assert f(lo) == pytest.approx(lo, abs=1e-9) or f(lo) == pytest.approx(hi, abs=1e-9)
    for c in f.critical_points:
        assert lo - 1e-9 <= f(c) <= hi + 1e-9


def test_polynomial_validation():
    with pytest.raises(PreconditionError):
        polynomial_map([0.0, 1.0], (0, 1))
    with pytest.raises(DomainError):
        polynomial_map([0.0, 5.0, -5.0], (0, 1))
    with pytest.raises(DomainError):
        family_member("nope")
