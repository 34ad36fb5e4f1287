"""Minimal cycles of intervals of constant-slope maps, and local stunting."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import PreconditionError
from ..maps import PiecewiseAffineMap

# periods searched past the theoretical bound
EXTRA_PERIODS = 2


@dataclass(frozen=True)
class IntervalCycle:
    components: tuple
    period: int


@dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple
    theta: float
    turning_count: int
    residual: tuple
    complete: bool = True


def _slope_magnitude(F: PiecewiseAffineMap) -> float:
    mags = {abs(s) for s in F.slopes() if s != 0}
    if not mags:
        raise PreconditionError("map is constant")
    lo, hi = min(mags), max(mags)
    if float(hi - lo) > 1e-9 * float(hi):
        raise PreconditionError("slopes do not have constant magnitude")
    return float(hi)


def _image_k(F, u, v, k):
    for _ in range(k):
        u, v = F.image(u, v)
    return u, v


def _invariant_hull(F, c, k, tol, budget):
    """Smallest interval containing c and invariant under F^k (None if over budget)."""
    y = _image_k(F, c, c, k)[0]
    u, v = min(c, y), max(c, y)
    for _ in range(budget):
        a, b = _image_k(F, u, v, k)
        if a >= u - tol and b <= v + tol:
            return u, v
        u, v = min(u, a), max(v, b)
    return None


def _disjoint_interiors(intervals, tol):
    ordered = sorted(intervals)
    return all(b[0] >= a[1] - tol for a, b in zip(ordered, ordered[1:]))


def _rotations_equal(a: IntervalCycle, b: IntervalCycle):
    return a.period == b.period and set(a.components) == set(b.components)


def minimal_cycles(F: PiecewiseAffineMap, budget: int = 200, max_period: int | None = None,
                   tol=0) -> CycleDecomposition:
    """Minimal cycles of intervals of a map with slopes ±theta, theta > 1.

    A minimal cycle has a component containing a turning point c, and that
    component is the smallest F^k-invariant interval containing c.  Every
    (c, k) with k <= max_period is tried, the F^j-images are checked for
    disjoint interiors, and cycles containing a smaller cycle are dropped.
    By default periods are searched a little beyond the bound theta^k <= 2^d,
    so the bound is checked rather than assumed.  Keep tol = 0 for exact
    data; a float tol turns the comparisons into float ones.
    """
    theta = _slope_magnitude(F)
    if theta <= 1:
        raise PreconditionError(f"slope {theta} must exceed 1")
    turns = F.turning_points
    if max_period is None:
        max_period = lemma_period_bound(theta, len(turns)) + EXTRA_PERIODS
    found, complete = [], True
    for k in range(1, max_period + 1):
        for c in turns:
            hull = _invariant_hull(F, c, k, tol, budget)
            if hull is None:
                complete = False
                continue
            comps = [hull]
            for _ in range(k - 1):
                comps.append(F.image(*comps[-1]))
            if any(b - a <= tol for a, b in comps):
                continue
            if not _disjoint_interiors(comps, tol):
                continue
            cyc = IntervalCycle(tuple(comps), k)
            if not any(_rotations_equal(cyc, f) for f in found):
                found.append(cyc)
    minimal = [c for c in found if not any(_strictly_inside(o, c, tol) for o in found if o is not c)]
    return CycleDecomposition(tuple(minimal), theta, len(turns), _gaps(F, minimal), complete)


def _strictly_inside(small: IntervalCycle, big: IntervalCycle, tol) -> bool:
    for a, b in small.components:
        for u, v in big.components:
            if u - tol <= a and b <= v + tol and (b - a) < (v - u) - tol:
                return True
    return False


def _gaps(F, cycles):
    lo, hi = F.domain
    covered = sorted(comp for c in cycles for comp in c.components)
    gaps, x = [], lo
    for a, b in covered:
        if a > x:
            gaps.append((x, a))
        x = max(x, b)
    if x < hi:
        gaps.append((x, hi))
    return tuple(gaps)


def cycle_bound_holds(dec: CycleDecomposition) -> bool:
    """theta^k <= 2^d for every returned cycle."""
    return all(dec.theta ** c.period <= 2 ** dec.turning_count * (1 + 1e-12)
               for c in dec.cycles)


def stun_at(F: PiecewiseAffineMap, c, J) -> PiecewiseAffineMap:
    """F made constant, equal to F(∂J), on the neighbourhood J of the turning point c."""
    a, b = J
    if a == b == c:
        return F
    if not a < c < b:
        raise PreconditionError("turning point must lie inside J")
    lo, hi = F.domain
    if a < lo or b > hi:
        raise PreconditionError("J must lie inside the domain")
    value = F(a)
    if F(b) != value:
        raise PreconditionError("F(∂J) must be a single point")
    pts = [(x, F(x)) for x in F.breakpoints if x < a]
    pts += [(a, value), (b, value)]
    pts += [(x, F(x)) for x in F.breakpoints if x > b]
    return PiecewiseAffineMap.from_points(pts)


def constant_slope_map(values, theta=None) -> PiecewiseAffineMap:
    """Map on [0, 1] through the given turning values with slopes ±theta.

    Lap lengths are |Δv|/theta with theta = Σ|Δv| by default, so that the laps
    fill [0, 1] exactly and rational values give an exact map.
    """
    vals = list(values)
    steps = [abs(b - a) for a, b in zip(vals, vals[1:])]
    if any(s == 0 for s in steps):
        raise PreconditionError("consecutive values must differ")
    theta = sum(steps) if theta is None else theta
    xs = [0 * theta]
    for s in steps:
        xs.append(xs[-1] + s / theta)
    return PiecewiseAffineMap(tuple(xs), tuple(vals))


def lemma_period_bound(theta: float, d: int) -> int:
    """Largest k with theta^k <= 2^d."""
    return int(math.floor(d * math.log(2) / math.log(theta) + 1e-12))
