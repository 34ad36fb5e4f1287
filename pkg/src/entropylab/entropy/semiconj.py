"""Semi-conjugacy of a positive-entropy map to a map of constant slope ±e^h.

The conjugating map is lambda(x) = Lambda([-e, x]) with Lambda(J) the ratio of
lap generating functions sum l(T^n|J) t^n / sum l(T^n|I) t^n as t rises to
exp(-h).  Only the pole at t = 1/theta matters in that limit, so dropping
finitely many terms leaves it unchanged.  The sums are taken over the window
N/2 < n <= N, which removes the transient of the first iterates, and
evaluated at t = (1 - eps)/theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import EntropyZero
from ..maps import PiecewiseAffineMap
from .census import _Transitions, lap_counts_from
from .markov import markov_graph


@dataclass(frozen=True)
class ConstantSlopeModel:
    theta: float
    F: PiecewiseAffineMap
    lambda_samples: tuple
    residual: float
    last_term: float
    t: float

    def slopes(self):
        return [float(s) for s in self.F.slopes()]


def _weights(t: float, n: int):
    return np.array([t ** k if 2 * k > n else 0.0 for k in range(n + 1)])


class _LapMeasure:
    def __init__(self, f: PiecewiseAffineMap, n: int, t: float):
        self.f, self.n = f, n
        self.w = _weights(t, n)
        self.trans = _Transitions(f)
        lo, hi = f.domain
        self.total = float(np.dot(self.w, lap_counts_from(f, lo, hi, n, transitions=self.trans)))
        self.cache = {}

    def __call__(self, x) -> float:
        if x not in self.cache:
            lo, hi = self.f.domain
            if x == lo:
                val = 0.0
            elif x == hi:
                val = 1.0
            else:
                counts = lap_counts_from(self.f, lo, x, self.n, transitions=self.trans)
                val = float(np.dot(self.w, counts)) / self.total
            self.cache[x] = val
        return self.cache[x]

    def last_term(self) -> float:
        lo, hi = self.f.domain
        counts = lap_counts_from(self.f, lo, hi, self.n, transitions=self.trans)
        return float(self.w[-1] * counts[-1]) / self.total


def constant_slope_model(f: PiecewiseAffineMap, h: float, N: int = 40, eps: float | None = None,
                         grid: int = 200) -> ConstantSlopeModel:
    """Constant-slope model F on [0, 1] with lambda o f ~ F o lambda.

    F interpolates lambda(f(b)) at lambda(b) over the breakpoints b of f.  The
    semi-conjugacy residual sup |lambda(f(x)) - F(lambda(x))| over a uniform
    grid is reported together with the share of the last series term in the
    sum, a heuristic for the truncation error.
    """
    if h <= 0:
        raise EntropyZero(f"entropy {h} is not positive")
    theta = math.exp(h)
    eps = 1.0 / N if eps is None else eps
    t = (1.0 - eps) / theta
    lam = _LapMeasure(f, N, t)
    pts = sorted({(lam(b), lam(f(b))) for b in f.breakpoints})
    F = _monotone_graph(pts)
    lo, hi = f.domain
    xs = [lo + (hi - lo) * Fraction(k, grid - 1) for k in range(grid)]
    samples = tuple((float(x), lam(x)) for x in xs)
    residual = max(abs(lam(f(x)) - F(lam(x))) for x in xs)
    return ConstantSlopeModel(theta, F, samples, residual, lam.last_term(), t)


def _monotone_graph(pts) -> PiecewiseAffineMap:
    # breakpoints inside a plateau share one lambda value and one image
    xs, ys = [], []
    for x, y in pts:
        if xs and x - xs[-1] <= 1e-15:
            continue
        xs.append(x)
        ys.append(y)
    return PiecewiseAffineMap(tuple(xs), tuple(ys), self_map=False)


def markov_lap_measure(f: PiecewiseAffineMap, budget: int = 200):
    """Exact-eigenvector semi-conjugacy for Markov maps, as a float oracle.

    Partition intervals get lengths from the right Perron vector of the
    covering matrix; returns (theta, breakpoints, lambda values).
    """
    g = markov_graph(f, budget)
    a = np.array(g.matrix, dtype=float)
    vals, vecs = np.linalg.eig(a)
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    v /= v.sum()
    cum = np.concatenate([[0.0], np.cumsum(v)])
    points = [g.vertices[0][0]] + [b for _, b in g.vertices]
    return float(vals[k].real), points, cum
