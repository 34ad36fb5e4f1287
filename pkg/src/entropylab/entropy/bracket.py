"""Certified entropy brackets for piecewise affine and polynomial maps.

Upper bounds come from two sources: the lap census, where (1/k) log m_k is
valid for every k because non-constant lap counts are submultiplicative, and
the graph of a finite partition in which an arrow J -> K records that f(J)
meets the interior of K.  Paths in that graph dominate the laps of f^n, so its
spectral radius bounds exp(h) from above.  The lower bound is the spectral
radius of the covering graph (f(J) contains K), a union of horseshoes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import NoConvergence
from ..maps import PiecewiseAffineMap, PolynomialMap
from .census import lap_census
from .markov import partition_graph, spectral_bounds

# float spectral radii are widened by this relative amount before taking logs
SPECTRAL_SLACK = 1e-11


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    lower: float
    upper: float
    method: str
    depth: int = 0

    def __post_init__(self):
        if not self.lower <= self.value <= self.upper:
            raise ValueError(f"inconsistent bracket {self.lower} <= {self.value} <= {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def error(self) -> float:
        return 0.5 * self.width

    def as_record(self) -> dict:
        return asdict(self)


def _bracket(lower, upper, method, depth):
    # float logs may round inward; push both ends out by a few ulps
    if upper > 0:
        upper += 4 * math.ulp(upper)
    lower = max(0.0, min(lower - 4 * math.ulp(lower), upper))
    return EntropyEstimate(0.5 * (lower + upper), lower, upper, method, depth)


def _log_rho(matrix, widen: int) -> float:
    lo, hi = spectral_bounds(matrix) if len(matrix) else (0.0, 0.0)
    rho = (hi if widen > 0 else lo) * (1 + widen * SPECTRAL_SLACK)
    return math.log(rho) if rho > 1 else 0.0


def orbit_partition(f: PiecewiseAffineMap, depth: int):
    """Domain endpoints, breakpoints and their first `depth` images."""
    points = set(f.breakpoints)
    frontier = set(points)
    for _ in range(depth):
        frontier = {f(x) for x in frontier} - points
        if not frontier:
            break
        points |= frontier
    return sorted(points)


def partition_bracket(f: PiecewiseAffineMap, depth: int):
    """(lower, upper) entropy bounds from the partition by breakpoint orbits."""
    _, cover, meet = partition_graph(f, orbit_partition(f, depth))
    return _log_rho(cover, -1), _log_rho(meet, +1)


def _lap_bracket(f: PiecewiseAffineMap, n_max: int, tol: float) -> EntropyEstimate:
    census = lap_census(f, n_max)
    lower, upper = 0.0, census.monotone_upper_bound()
    depth = 1
    while True:
        lo, hi = partition_bracket(f, depth)
        lower, upper = max(lower, lo), min(upper, hi)
        if upper - lower < tol or depth >= n_max:
            break
        depth = min(2 * depth, n_max)
    return _bracket(lower, upper, "lap-growth", n_max)


def entropy_lap(f: PiecewiseAffineMap, n_max: int = 20, tol: float = 1e-6) -> EntropyEstimate:
    """Entropy bracket from lap growth and partitions refined to depth n_max.

    The partition depth doubles until the bracket is narrower than `tol`.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    est = _lap_bracket(f, n_max, tol)
    if est.width >= tol:
        raise NoConvergence(f"entropy bracket width {est.width:.3g} above tol {tol}", estimate=est)
    return est


def entropy_bracket(f: PiecewiseAffineMap, n_max: int = 20) -> EntropyEstimate:
    """Bracket refined all the way to depth n_max; never raises NoConvergence."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    return _lap_bracket(f, n_max, 0.0)


def entropy_poly(f: PolynomialMap, depth: int = 30, tol: float = 1e-3, n_max: int | None = None,
                 cross_check: bool = False) -> EntropyEstimate:
    """Entropy of a polynomial through its stunted sawtooth model.

    The kneading invariant to `depth` symbols is realized as ζ = ST(f); the
    ζ error from truncation is absorbed by widening the box to the two
    stunted maps bounding it, using monotonicity of entropy in ζ.
    """
    from ..correspondence import st_bracket_params

    lo_params, hi_params = st_bracket_params(f, depth)
    n = n_max or max(20, depth)
    from ..maps import build_stunted
    low = entropy_bracket(build_stunted(lo_params), n)
    high = low if hi_params == lo_params else entropy_bracket(build_stunted(hi_params), n)
    est = _bracket(low.lower, high.upper, "st-pipeline", depth)
    if cross_check:
        direct = entropy_poly_direct(f)
        if direct.upper < est.lower - 1e-9 or direct.lower > est.upper + 1e-9:
            raise NoConvergence("direct lap count disagrees with the stunted model", estimate=est)
    if est.width >= tol:
        raise NoConvergence(f"entropy bracket width {est.width:.3g} above tol {tol}", estimate=est)
    return est


def _float_partition_graphs(f: PolynomialMap, depth: int):
    lo, hi = f.domain
    points = {lo, hi, *f.critical_points}
    frontier = list(f.critical_points) + [lo, hi]
    for _ in range(depth):
        frontier = [min(max(f(x), lo), hi) for x in frontier]
        points.update(frontier)
    pts = np.array(sorted(points))
    a, b = pts[:-1], pts[1:]
    fa = np.array([min(max(f(x), lo), hi) for x in a])
    fb = np.array([min(max(f(x), lo), hi) for x in b])
    ilo, ihi = np.minimum(fa, fb)[:, None], np.maximum(fa, fb)[:, None]
    cover = (ilo <= a[None, :]) & (b[None, :] <= ihi) & (ilo < ihi)
    meet = (ilo < b[None, :]) & (a[None, :] < ihi)
    return cover.astype(float), meet.astype(float)


def entropy_poly_direct(f: PolynomialMap, depth: int = 120) -> EntropyEstimate:
    """Entropy bracket computed on f itself in floating point.

    Uses the covering and intersection graphs of the partition by float
    critical orbits, the same construction as for piecewise affine maps.  It
    is independent of kneading and ST, so it serves as a cross-check; float
    rounding makes it a heuristic rather than a certificate.
    """
    cover, meet = _float_partition_graphs(f, depth)
    return _bracket(_log_rho(cover, -1), _log_rho(meet, +1), "lap-growth", depth)
