import math
import random
from fractions import Fraction

import pytest

from entropylab.entropy.census import lap_census
from entropylab.entropy.cycles import (constant_slope_map, cycle_bound_holds, lemma_period_bound,
                                       minimal_cycles, stun_at)
from entropylab.entropy.markov import certify_spectral_drop, markov_graph
from entropylab.errors import PreconditionError
from entropylab.maps import PiecewiseAffineMap


def tent(s):
    return PiecewiseAffineMap.from_points([(0, 0), (Fraction(1, 2), s / 2), (1, 0)])


def test_full_tent_has_one_cycle():
    dec = minimal_cycles(tent(2))
    assert dec.complete
    assert [c.components for c in dec.cycles] == [((0, 1),)]
    assert dec.residual == ()


def test_tent_core_without_renormalization():
    # slope 3/2 > sqrt 2: the core [F^2(c), F(c)] is the only minimal cycle
    F = tent(Fraction(3, 2))
    c = Fraction(1, 2)
    dec = minimal_cycles(F)
    assert dec.complete
    assert [(cyc.period, cyc.components) for cyc in dec.cycles] == [(1, ((F(F(c)), F(c)),))]


def test_tent_renormalizes_below_root_two():
    # slope 5/4: period-2 cycle [F^2 c, F^4 c] and [F^3 c, F c] around c = 1/2
    F = tent(Fraction(5, 4))
    orbit = [Fraction(1, 2)]
    for _ in range(4):
        orbit.append(F(orbit[-1]))
    dec = minimal_cycles(F)
    assert dec.complete and cycle_bound_holds(dec)
    assert len(dec.cycles) == 1
    cyc = dec.cycles[0]
    assert cyc.period == 2
    assert set(cyc.components) == {(orbit[2], orbit[4]), (orbit[3], orbit[1])}
    assert dec.residual == ((0, orbit[2]), (orbit[4], orbit[3]), (orbit[1], 1))


def test_cycle_components_are_invariant_and_disjoint():
    rng = random.Random(2)
    for _ in range(20):
        vals = [Fraction(rng.randint(0, 12), 12) for _ in range(rng.randint(3, 5))]
        if any(a == b for a, b in zip(vals, vals[1:])):
            continue
        F = constant_slope_map(vals)
        if sum(abs(b - a) for a, b in zip(vals, vals[1:])) <= 1:
            continue
        dec = minimal_cycles(F)
        assert dec.complete and cycle_bound_holds(dec)
        for cyc in dec.cycles:
            comps = list(cyc.components)
            u, v = comps[0]
            for _ in range(cyc.period):
                u, v = F.image(u, v)
            assert comps[0][0] <= u and v <= comps[0][1]
            ordered = sorted(comps)
            assert all(b[0] >= a[1] for a, b in zip(ordered, ordered[1:]))


def test_lemma_bound():
    assert lemma_period_bound(2.0, 1) == 1
    assert lemma_period_bound(2 ** 0.5, 1) == 2
    assert lemma_period_bound(1.5, 3) == math.floor(3 * math.log(2) / math.log(1.5))


def test_constant_slope_map():
    F = constant_slope_map([0, 1, Fraction(1, 4), 1])
    assert F.domain == (0, 1)
    assert {abs(s) for s in F.slopes()} == {Fraction(5, 2)}
    with pytest.raises(PreconditionError):
        constant_slope_map([0, 0, 1])


def test_slope_at_most_one_rejected():
    with pytest.raises(PreconditionError):
        minimal_cycles(tent(1))


def test_stun_at_makes_plateau():
    F = tent(2)
    G = stun_at(F, Fraction(1, 2), (Fraction(1, 4), Fraction(3, 4)))
    assert G(Fraction(1, 2)) == Fraction(1, 2)
    assert G(Fraction(1, 8)) == F(Fraction(1, 8))
    assert stun_at(F, Fraction(1, 2), (Fraction(1, 2), Fraction(1, 2))) is F
    with pytest.raises(PreconditionError):
        stun_at(F, Fraction(1, 2), (Fraction(1, 4), Fraction(1, 3)))
    with pytest.raises(PreconditionError):
        stun_at(F, Fraction(1, 2), (Fraction(1, 4), Fraction(7, 8)))


def test_stunting_lowers_lap_growth():
    F = tent(2)
    G = stun_at(F, Fraction(1, 2), (Fraction(3, 8), Fraction(5, 8)))
    before = certify_spectral_drop(markov_graph(G).matrix, markov_graph(F).matrix)
    assert before is not None
    assert lap_census(G, 10).monotone_counts[-1] < lap_census(F, 10).monotone_counts[-1]
