import math
from fractions import Fraction

import pytest

from entropylab.entropy.census import brute_force_laps, lap_census, lap_counts_from
from entropylab.errors import CapExceeded
from entropylab.maps import PiecewiseAffineMap, build_stunted, make_geometry, sawtooth_map, stunted


def test_census_matches_piece_propagation(random_maps):
    for p in random_maps[:25]:
        T = build_stunted(p)
        assert list(lap_census(T, 6).counts) == brute_force_laps(T, 6)


def test_census_on_subinterval():
    T = build_stunted(stunted(2, ["3/2", "5/4"]))
    J = (Fraction(-1), Fraction(7, 3))
    assert list(lap_census(T, 5, J).counts) == brute_force_laps(T, 5, J)
    assert lap_counts_from(T, *J, 5)[1:] == brute_force_laps(T, 5, J)
    assert lap_counts_from(T, *J, 0) == [1]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sawtooth_restricted_counts(d):
    # the full stunted map has d+1 monotone laps and d plateaus
    g = make_geometry(d)
    census = lap_census(build_stunted(stunted(d, [g.e] * d)), 6)
    assert census.counts[0] == 2 * d + 1
    assert census.monotone_counts == tuple((d + 1) ** k for k in range(1, 7))
    assert census.monotone_upper_bound() == pytest.approx(math.log(d + 1))


def test_zero_corner_is_constant():
    g = make_geometry(1)
    census = lap_census(build_stunted(stunted(1, [-g.e])), 8)
    assert set(census.counts[1:]) == {census.counts[1]}
    assert census.monotone_upper_bound() >= 0


def test_tent_doubling():
    F = PiecewiseAffineMap.from_points([(0, 0), (Fraction(1, 2), 1), (1, 0)])
    assert lap_census(F, 10).counts == tuple(2 ** k for k in range(1, 11))


def test_cap():
    T = build_stunted(stunted(2, ["1/3", "7/5"]))
    lap_census(T, 20, cap=100)
    with pytest.raises(CapExceeded):
        lap_census(T, 20, cap=10)


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        lap_census(sawtooth_map(make_geometry(1)), 0)
