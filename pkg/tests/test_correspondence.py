from fractions import Fraction

import pytest

from entropylab.correspondence import (class_representative, critical_graph, is_nondegenerate,
                                       preplateau, st_map, st_report, w_component,
                                       wandering_pairs)
from entropylab.entropy.bracket import entropy_bracket, entropy_poly_direct
from entropylab.maps import build_stunted, family_member, make_geometry, stunted


def logistic(lam):
    return family_member("logistic", {"lambda": lam})


def test_st_attracting_fixed_point_left_of_turn():
    p = st_map(logistic(1.5))
    assert p.zeta == (-p.e,)


def test_st_logistic_three():
    # plateau endpoint p solves S(p) = p on the decreasing lap: 2e - 3p = p
    e = make_geometry(1).e
    p_fixed = 2 * e / 4
    rep = st_report(logistic(3.0), 30)
    # the kneading tail is periodic, so the realization is exact
    assert rep.params.zeta[0] == p_fixed == Fraction(3, 4)
    assert rep.errors == (0,)


def test_st_logistic_four_is_top_corner():
    p = st_map(logistic(4.0))
    assert abs(p.zeta[0] - p.e) <= 2 * p.e * Fraction(3) ** -29


@pytest.mark.parametrize("lam", [3.3, 3.6, 3.83, 3.9])
def test_st_preserves_entropy(lam):
    f = logistic(lam)
    model = entropy_bracket(build_stunted(st_map(f, 30)), 16)
    direct = entropy_poly_direct(f)
    assert direct.lower <= model.upper + 1e-3
    assert model.lower <= direct.upper + 1e-3


def test_preplateau_of_constant_map():
    p = stunted(1, ["-3/2"])
    pre = preplateau(p)
    assert pre.components == ((-p.e, p.e),)
    assert pre.complete


def test_preplateau_excludes_boundary_fixed_point():
    p = stunted(1, ["3/4"])
    pre = preplateau(p)
    assert pre.components == ((Fraction(-3, 4), Fraction(3, 4)),)
    T = build_stunted(p)
    assert T(Fraction(3, 4)) == Fraction(3, 4)
    assert w_component(p, "0") == (Fraction(-3, 4), Fraction(3, 4))
    assert w_component(p, Fraction(3, 4)) is None


def test_touching_plateaus_share_a_component():
    p = stunted(2, ["5/2", "-5/2"])
    pre = preplateau(p)
    assert len(pre.components) == 1
    assert pre.membership == (0, 0)


def test_components_are_disjoint(random_maps):
    for p in random_maps[:20]:
        pre = preplateau(p)
        comps = sorted(pre.components)
        assert all(a[1] <= b[0] for a, b in zip(comps, comps[1:]))
        for i in range(p.d):
            a, b = pre.component_of(i)
            lo, hi = p.plateau(i)
            assert a <= lo and hi <= b


def test_two_cycle_in_critical_graph():
    g = critical_graph(stunted(2, ["1/2", "1/2"]))
    assert {(a.source, a.target) for a in g.arrows} == {(0, 1), (1, 0)}
    assert all(a.kind == "interior" for a in g.arrows)
    assert "->" in g.to_dot()


def test_boundary_self_arrow_at_bottom_corner():
    g = critical_graph(stunted(1, ["-3/2"]))
    assert [(a.source, a.target, a.kind) for a in g.arrows] == [(0, 0, "boundary")]


def test_no_arrow_when_plateau_hits_fixed_boundary_from_outside():
    assert critical_graph(stunted(1, ["3/4"])).arrows == ()


def test_wandering_pairs_generic():
    assert wandering_pairs(stunted(2, ["1/2", "1/2"])).pairs == ()
    assert is_nondegenerate(stunted(2, ["1/2", "1/2"])) == "yes"


def test_wandering_pair_into_periodic_plateau():
    # Z_0 and Z_1 touch with common value 2 = c_2, and Z_2 is fixed since 2 lies in it
    rep = wandering_pairs(stunted(3, ["2", "-2", "2"]))
    assert rep.verdicts()[(0, 1)] == "degenerate-to-periodic-plateau"
    assert is_nondegenerate(stunted(3, ["2", "-2", "2"])) == "yes"


def test_wandering_pair_into_non_periodic_plateau():
    # raising Z_2 to the top sends its value to the fixed endpoint -e
    p = stunted(3, ["2", "-2", "15/4"])
    assert wandering_pairs(p).verdicts() == {(0, 1): "nondegenerate"}
    assert is_nondegenerate(p) == "no"


def test_budget_starved_is_unknown():
    p = stunted(3, ["2", "-2", "3"])
    assert is_nondegenerate(p, budget=2) == "unknown"
    assert is_nondegenerate(p) == "yes"


def test_representative_bottom_corner():
    assert class_representative(stunted(1, ["-3/2"])).zeta == (0,)


def test_representative_touching_block():
    rep = class_representative(stunted(2, ["5/2", "-5/2"]))
    assert rep.zeta == (0, 0)


@pytest.mark.parametrize("zeta", [["33/26"], ["1/2", "1/2"], ["-3/2"], ["5/2", "-5/2"]])
def test_representative_idempotent_and_same_w(zeta):
    p = stunted(len(zeta), zeta)
    rep = class_representative(p)
    assert class_representative(rep) == rep
    assert preplateau(rep).components == preplateau(p).components
