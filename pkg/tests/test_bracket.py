import math

import pytest

from entropylab.entropy.bracket import (EntropyEstimate, entropy_bracket, entropy_lap,
                                        entropy_poly, entropy_poly_direct, partition_bracket)
from entropylab.errors import NoConvergence
from entropylab.maps import build_stunted, family_member, make_geometry, stunted

GOLDEN = (1 + 5 ** 0.5) / 2


@pytest.mark.parametrize("d", [1, 2, 3])
def test_top_corner(d):
    e = make_geometry(d).e
    est = entropy_lap(build_stunted(stunted(d, [e] * d)), n_max=20, tol=1e-6)
    assert abs(est.value - math.log(d + 1)) < 1e-6
    assert est.lower <= math.log(d + 1) <= est.upper


def test_zero_corner():
    est = entropy_lap(build_stunted(stunted(1, ["-3/2"])))
    assert est.value == 0 and est.upper == 0


def test_golden_mean_plateau():
    # the plateau endpoint sits on a 3-cycle of S, giving the golden-mean graph
    est = entropy_lap(build_stunted(stunted(1, ["33/26"])))
    assert est.lower <= math.log(GOLDEN) <= est.upper
    assert est.width < 1e-6


def test_bracket_contains_census_rate(random_maps):
    for p in random_maps[:15]:
        est = entropy_bracket(build_stunted(p), 12)
        assert 0 <= est.lower <= est.value <= est.upper
        lo, hi = partition_bracket(build_stunted(p), 6)
        assert lo <= est.upper + 1e-12 and est.lower <= hi + 1e-12


def test_no_convergence_carries_estimate():
    # a non-Markov map converges slowly at small depth
    T = build_stunted(stunted(2, ["1/3", "7/5"]))
    try:
        est = entropy_lap(T, n_max=3, tol=1e-12)
    except NoConvergence as exc:
        assert isinstance(exc.estimate, EntropyEstimate)
        assert exc.estimate.width >= 1e-12
    else:
        assert est.width < 1e-12


def test_estimate_invariant():
    with pytest.raises(ValueError):
        EntropyEstimate(1.0, 0.0, 0.5, "x")


@pytest.mark.parametrize("lam, expected", [(2.0, 0.0), (3.2, 0.0), (4.0, math.log(2))])
def test_logistic_entropy(lam, expected):
    est = entropy_poly(family_member("logistic", {"lambda": lam}), depth=30, tol=1e-3)
    assert est.lower - 1e-9 <= expected <= est.upper + 1e-9


def test_logistic_period_three_window():
    f = family_member("logistic", {"lambda": 3.83})
    est = entropy_poly(f, depth=30, tol=1e-3)
    assert abs(est.value - math.log(GOLDEN)) < 1e-3
    direct = entropy_poly_direct(f)
    assert direct.lower <= est.upper + 1e-6 and est.lower <= direct.upper + 1e-6
