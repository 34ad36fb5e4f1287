"""Map families: the sawtooth S, stunted sawtooth maps T_zeta, polynomials.

Piecewise affine maps are evaluated in exact rational arithmetic.  Plateau
and turning point indices are 0-based throughout the library, so the
turning point written c_1 in the usual notation is ``turning_points[0]``.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConstraintViolation, DomainError, PreconditionError
from .numbers import as_fraction


class Shape(enum.Enum):
    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value

    @classmethod
    def parse(cls, text) -> "Shape":
        if isinstance(text, Shape):
            return text
        key = str(text).strip().lower()
        if key in ("+", "plus", "+1", "1"):
            return cls.PLUS
        if key in ("-", "minus", "-1"):
            return cls.MINUS
        raise DomainError(f"unknown shape {text!r}")

    def __str__(self):
        return "+" if self is Shape.PLUS else "-"


def lap_orientation(shape: Shape, j: int) -> int:
    """Orientation (+1 increasing, -1 decreasing) of lap j of a shape-`shape` map."""
    return shape.sign * (1 if j % 2 == 0 else -1)


def is_maximum(shape: Shape, i: int) -> bool:
    """Whether turning point i (0-based) is a local maximum."""
    return lap_orientation(shape, i) == 1


@dataclass(frozen=True)
class SawtoothGeometry:
    d: int
    shape: Shape
    lam: Fraction = field(init=False)
    e: Fraction = field(init=False)
    turning_points: tuple = field(init=False)
    peak: Fraction = field(init=False)

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        lam = Fraction(self.d + 2)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "e", self.d * lam / (lam - 1))
        object.__setattr__(
            self, "turning_points",
            tuple(Fraction(-self.d - 1 + 2 * i) for i in range(1, self.d + 1)))
        object.__setattr__(self, "peak", lam)

    def lap_bounds(self, j: int):
        pts = (-self.e,) + self.turning_points + (self.e,)
        return pts[j], pts[j + 1]

    def orientation(self, j: int) -> int:
        return lap_orientation(self.shape, j)

    def is_max(self, i: int) -> bool:
        return is_maximum(self.shape, i)

    def left_value(self) -> Fraction:
        return -self.e if self.orientation(0) == 1 else self.e

    def lap_of(self, x) -> int:
        """Index of the lap containing x; turning points belong to the lap on their right."""
        return bisect.bisect_right(self.turning_points, x)

    def inverse_branch(self, j: int, y):
        """The point of lap j that S sends to y."""
        lo, _ = self.lap_bounds(j)
        return lo + (y - eval_sawtooth(self, lo)) / (self.orientation(j) * self.lam)


def make_geometry(d: int, shape=Shape.PLUS) -> SawtoothGeometry:
    return SawtoothGeometry(d, Shape.parse(shape))


def eval_sawtooth(g: SawtoothGeometry, x) -> Fraction:
    x = as_fraction(x)
    if x < -g.e or x > g.e:
        raise DomainError(f"{x} outside [-{g.e}, {g.e}]")
    # value at the left end of each lap, built by walking the laps
    value = g.left_value()
    lo = -g.e
    for j, c in enumerate(g.turning_points + (g.e,)):
        if x <= c:
            return value + g.orientation(j) * g.lam * (x - lo)
        value = value + g.orientation(j) * g.lam * (c - lo)
        lo = c
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class StuntedParams:
    geometry: SawtoothGeometry
    zeta: tuple

    def __post_init__(self):
        g = self.geometry
        zeta = tuple(as_fraction(z) for z in self.zeta)
        object.__setattr__(self, "zeta", zeta)
        if len(zeta) != g.d:
            raise ConstraintViolation(f"expected {g.d} parameters, got {len(zeta)}")
        for i, z in enumerate(zeta):
            if z < -g.e or z > g.e:
                raise ConstraintViolation(f"zeta[{i}]={z} outside [-{g.e}, {g.e}]", i)
        for i in range(g.d - 1):
            if zeta[i] < -zeta[i + 1]:
                raise ConstraintViolation(
                    f"zeta[{i}]={zeta[i]} < -zeta[{i + 1}]={-zeta[i + 1]}", i)

    @property
    def d(self) -> int:
        return self.geometry.d

    @property
    def e(self) -> Fraction:
        return self.geometry.e

    def half_width(self, i: int) -> Fraction:
        return 1 - self.zeta[i] / self.geometry.lam

    def plateau(self, i: int):
        c = self.geometry.turning_points[i]
        w = self.half_width(i)
        return c - w, c + w

    def plateau_value(self, i: int) -> Fraction:
        return self.zeta[i] if self.geometry.is_max(i) else -self.zeta[i]

    def touches(self, i: int) -> bool:
        """Whether plateaus i and i+1 share an endpoint."""
        return self.zeta[i] + self.zeta[i + 1] == 0

    def replace(self, zeta) -> "StuntedParams":
        return StuntedParams(self.geometry, tuple(zeta))


def stunted(d: int, zeta, shape=Shape.PLUS) -> StuntedParams:
    return StuntedParams(make_geometry(d, shape), tuple(as_fraction(z) for z in zeta))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class PiecewiseAffineMap:
    """Continuous piecewise affine interval map given by its graph's vertices.

    ``breakpoints`` must include both domain endpoints.  Values may be exact
    Fractions or floats; comparisons with floats are used verbatim.
    """

    breakpoints: tuple
    values: tuple
    turning_points: tuple = ()
    self_map: bool = True

    def __post_init__(self):
        bps, vals = tuple(self.breakpoints), tuple(self.values)
        if len(bps) != len(vals) or len(bps) < 2:
            raise DomainError("breakpoints and values must have equal length >= 2")
        if any(b >= a for a, b in zip(bps[1:], bps)):
            raise DomainError("breakpoints must be strictly increasing")
        lo, hi = bps[0], bps[-1]
        if self.self_map and (min(vals) < lo or max(vals) > hi):
            raise DomainError("map does not send its domain into itself")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if not self.turning_points:
            object.__setattr__(self, "turning_points", self._interior_turns())

    @classmethod
    def from_points(cls, points, turning_points=()):
        """Build from (x, y) vertices, dropping repeated x and collinear vertices."""
        xs, ys = [], []
        for x, y in points:
            if xs and x == xs[-1]:
                if y != ys[-1]:
                    raise DomainError(f"discontinuity at {x}")
                continue
            xs.append(x)
            ys.append(y)
        kx, ky = [xs[0]], [ys[0]]
        for k in range(1, len(xs) - 1):
            s_in = (ys[k] - ky[-1]) / (xs[k] - kx[-1])
            s_out = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])
            if s_in != s_out:
                kx.append(xs[k])
                ky.append(ys[k])
        kx.append(xs[-1])
        ky.append(ys[-1])
        return cls(tuple(kx), tuple(ky), tuple(turning_points))

    @property
    def domain(self):
        return self.breakpoints[0], self.breakpoints[-1]

    def __call__(self, x):
        lo, hi = self.domain
        if x < lo or x > hi:
            raise DomainError(f"{x} outside [{lo}, {hi}]")
        k = bisect.bisect_right(self.breakpoints, x) - 1
        if k >= len(self.breakpoints) - 1:
            return self.values[-1]
        a, b = self.breakpoints[k], self.breakpoints[k + 1]
        if x == a:
            return self.values[k]
        return self.values[k] + (self.values[k + 1] - self.values[k]) * (x - a) / (b - a)

    def segments(self):
        """Affine pieces as (left, right, slope)."""
        b, v = self.breakpoints, self.values
        return [(b[k], b[k + 1], (v[k + 1] - v[k]) / (b[k + 1] - b[k]))
                for k in range(len(b) - 1)]

    def slopes(self):
        return [s for _, _, s in self.segments()]

    def laps(self):
        """Maximal monotone pieces as (left, right, orientation); orientation 0 is constant."""
        out = []
        for a, b, s in self.segments():
            o = _sign(s)
            if out and out[-1][2] == o:
                out[-1] = (out[-1][0], b, o)
            else:
                out.append((a, b, o))
        return out

    def lap_breaks(self):
        return tuple(a for a, _, _ in self.laps()[1:])

    def _interior_turns(self):
        laps = self.laps()
        return tuple(laps[k][1] for k in range(len(laps) - 1)
                     if laps[k][2] * laps[k + 1][2] == -1)

    def orientation_near(self, x, side: int) -> int:
        """Orientation of the map just to the right (side=+1) or left (side=-1) of x."""
        b = self.breakpoints
        if side > 0:
            k = bisect.bisect_right(b, x) - 1
            if k >= len(b) - 1:
                return 0
        else:
            k = bisect.bisect_left(b, x) - 1
            if k < 0:
                return 0
        return _sign(self.values[k + 1] - self.values[k])

    def propagate_side(self, x, side: int) -> int:
        """Side of f(x) from which f(y) approaches as y tends to x from `side`."""
        if side == 0:
            return 0
        return side * self.orientation_near(x, side)

    def pieces_in(self, u, v):
        """Laps clipped to [u, v] as (left, right, orientation), left to right."""
        out = []
        for a, b, o in self.laps():
            lo, hi = max(a, u), min(b, v)
            if lo < hi:
                out.append((lo, hi, o))
        return out

    def image(self, u, v):
        """Closed image f([u, v]) as (min, max)."""
        pts = [u, v] + [x for x in self.breakpoints if u < x < v]
        ys = [self(x) for x in pts]
        return min(ys), max(ys)

    def next_breakpoint(self, x, direction: int):
        """Nearest breakpoint strictly beyond x in the given direction (or None)."""
        b = self.breakpoints
        if direction > 0:
            k = bisect.bisect_right(b, x)
            return b[k] if k < len(b) else None
        k = bisect.bisect_left(b, x) - 1
        return b[k] if k >= 0 else None

    def slope_near(self, x, side: int):
        b = self.breakpoints
        if side > 0:
            k = bisect.bisect_right(b, x) - 1
        else:
            k = bisect.bisect_left(b, x) - 1
        if k < 0 or k >= len(b) - 1:
            return None
        return (self.values[k + 1] - self.values[k]) / (b[k + 1] - b[k])


def sawtooth_map(g: SawtoothGeometry) -> PiecewiseAffineMap:
    """S as a piecewise affine map; its peaks leave [-e, e]."""
    xs = (-g.e,) + g.turning_points + (g.e,)
    return PiecewiseAffineMap(xs, tuple(eval_sawtooth(g, x) for x in xs),
                              g.turning_points, self_map=False)


def build_stunted(p: StuntedParams) -> PiecewiseAffineMap:
    g = p.geometry
    pts = [(-g.e, None)]
    for i in range(g.d):
        lo, hi = p.plateau(i)
        pts.append((lo, p.plateau_value(i)))
        pts.append((hi, p.plateau_value(i)))
    pts.append((g.e, None))
    resolved = []
    for x, y in pts:
        if y is None:
            y = eval_sawtooth(g, x)
            # an endpoint swallowed by an outer plateau takes the plateau value
            for i in range(g.d):
                lo, hi = p.plateau(i)
                if lo <= x <= hi:
                    y = p.plateau_value(i)
        resolved.append((x, y))
    for i in range(g.d):
        lo, hi = p.plateau(i)
        for x in (lo, hi):
            if eval_sawtooth(g, x) != p.plateau_value(i):
                raise AssertionError("plateau endpoint off the sawtooth graph")
    return PiecewiseAffineMap.from_points(resolved, g.turning_points)


# ---------------------------------------------------------------- polynomials

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class PolynomialMap:
    """Real polynomial map of an interval; coefficients in ascending degree."""

    coefficients: tuple
    domain: tuple
    shape: Shape
    critical_points: tuple
    anchored: bool = False

    @property
    def d(self) -> int:
        return len(self.critical_points)

    def __call__(self, x):
        return eval_poly(self, x)

    def derivative(self, x):
        acc = 0.0
        n = len(self.coefficients)
        for k in range(n - 1, 0, -1):
            acc = acc * x + k * self.coefficients[k]
        return acc

    def lap_of(self, x) -> int:
        return bisect.bisect_right(self.critical_points, x)


def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def eval_poly(f: PolynomialMap, x) -> float:
    lo, hi = f.domain
    span = hi - lo
    if x < lo - FLOAT_TOL * span or x > hi + FLOAT_TOL * span:
        raise DomainError(f"{x} outside [{lo}, {hi}]")
    return _horner(f.coefficients, x)


def _refine_root(dcoeffs, a, b, tol=1e-12):
    fa = _horner(dcoeffs, a)
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = _horner(dcoeffs, m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def polynomial_map(coefficients: Sequence[float], domain, anchored=False) -> PolynomialMap:
    """Validate a polynomial map and locate its critical points.

    Critical points are isolated from the roots of f' and refined by
    bisection to 1e-12; all of them must be simple, real and interior.
    """
    coeffs = tuple(float(c) for c in coefficients)
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs = coeffs[:-1]
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise DomainError("empty domain")
    degree = len(coeffs) - 1
    if degree < 2:
        raise PreconditionError("a d-modal map needs degree at least 2")
    dcoeffs = tuple(k * coeffs[k] for k in range(1, degree + 1))
    roots = np.roots(list(reversed(dcoeffs)))
    span = hi - lo
    crit = []
    for r in roots:
        if abs(r.imag) > 1e-9 * max(1.0, abs(r.real)):
            raise PreconditionError(f"non-real critical point {r}")
        crit.append(float(r.real))
    crit.sort()
    if any(b - a < 1e-9 * span for a, b in zip(crit, crit[1:])):
        raise PreconditionError("coincident critical points")
    if crit[0] <= lo or crit[-1] >= hi:
        raise PreconditionError("critical points must lie inside the domain")
    refined = []
    for c in crit:
        delta = max(1e-7 * span, 1e-12)
        a, b = max(lo, c - delta), min(hi, c + delta)
        if (_horner(dcoeffs, a) > 0) == (_horner(dcoeffs, b) > 0):
            refined.append(c)
        else:
            refined.append(_refine_root(dcoeffs, a, b))
    first = _horner(dcoeffs, 0.5 * (lo + refined[0]))
    shape = Shape.PLUS if first > 0 else Shape.MINUS
    f = PolynomialMap(coeffs, (lo, hi), shape, tuple(refined), anchored)
    values = [_horner(coeffs, x) for x in (lo, hi, *refined)]
    slack = FLOAT_TOL * span
    if min(values) < lo - slack or max(values) > hi + slack:
        raise DomainError("polynomial does not send its domain into itself")
    if anchored:
        for y in values[:2]:
            if min(abs(y - lo), abs(y - hi)) > 1e-7 * span:
                raise DomainError("anchored map must send endpoints to endpoints")
    return f


def _real_fixed_points(coeffs):
    shifted = list(coeffs)
    shifted[1] -= 1.0
    roots = np.roots(list(reversed(shifted)))
    return sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9)


def _polish_fixed_point(coeffs, x):
    for _ in range(50):
        fx = _horner(coeffs, x) - x
        dcoeffs = [k * coeffs[k] for k in range(1, len(coeffs))]
        step = fx / (_horner(dcoeffs, x) - 1.0)
        x -= step
        if abs(step) < 1e-16:
            break
    return x


FAMILIES = ("logistic", "cubic-fig4", "chebyshev-k")


def family_parameter(name: str) -> str | None:
    if name == "logistic":
        return "lambda"
    if name == "cubic-fig4":
        return "b"
    return None


def chebyshev_coefficients(k: int):
    # T_k by the three-term recurrence, ascending coefficients
    prev, cur = [1.0], [0.0, 1.0]
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0.0] + [2.0 * c for c in cur]
        for j, c in enumerate(prev):
            nxt[j] -= c
        prev, cur = cur, nxt
    return cur


def family_member(name: str, params=None) -> PolynomialMap:
    params = dict(params or {})
    if name == "logistic":
        lam = float(params.get("lambda", params.get("lam", 4.0)))
        if not 0.0 < lam <= 4.0:
            raise DomainError(f"logistic parameter {lam} outside (0, 4]")
        return polynomial_map((0.0, lam, -lam), (0.0, 1.0))
    if name == "cubic-fig4":
        b = float(params["b"])
        a = b - 0.515
        if a <= 0.0:
            raise PreconditionError(f"cubic-fig4 needs b > 0.515, got {b}")
        coeffs = (b, 0.0, -3.0 * a, 2.0 * a)
        # the domain runs between the outermost fixed points, both repelling
        fixed = _real_fixed_points(coeffs)
        lo = _polish_fixed_point(coeffs, fixed[0])
        hi = _polish_fixed_point(coeffs, fixed[-1])
        return polynomial_map(coeffs, (lo, hi), anchored=True)
    if name.startswith("chebyshev"):
        suffix = name[len("chebyshev"):].lstrip("-")
        k = int(params.get("k", suffix or 0))
        if k < 2:
            raise DomainError("chebyshev family needs k >= 2")
        f = polynomial_map(chebyshev_coefficients(k), (-1.0, 1.0), anchored=True)
        exact = tuple(0.0 if 2 * j == k else math.cos(math.pi * j / k)
                      for j in range(k - 1, 0, -1))
        return PolynomialMap(f.coefficients, f.domain, f.shape, exact, True)
    raise DomainError(f"unknown family {name!r}")
