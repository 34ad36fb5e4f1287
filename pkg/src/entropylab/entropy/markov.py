"""Markov partitions, transition graphs, spectral radii and rome reduction."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import DomainError, NotMarkovWithinBudget, RomeInvalid
from ..maps import PiecewiseAffineMap

DEFAULT_BUDGET = 200


@dataclass(frozen=True)
class TransitionGraph:
    """Vertices are closed partition intervals; arrows follow the covering relation."""

    vertices: tuple
    arrows: tuple
    matrix: tuple

    @property
    def size(self) -> int:
        return len(self.vertices)

    def successors(self, v: int):
        return [w for w in range(self.size) if self.matrix[v][w]]

    def to_numpy(self):
        return np.array(self.matrix, dtype=float).reshape(self.size, self.size)


def graph_from_matrix(matrix) -> TransitionGraph:
    """Abstract transition graph on vertices 0..n-1 (no interval data)."""
    m = tuple(tuple(int(a) for a in row) for row in matrix)
    n = len(m)
    arrows = tuple((i, j) for i in range(n) for j in range(n) if m[i][j])
    return TransitionGraph(tuple(range(n)), arrows, m)


def breakpoint_orbits(f: PiecewiseAffineMap, budget: int):
    """Union of the forward orbits of all breakpoints, or None if some orbit is not
    periodic or preperiodic within `budget` steps."""
    points = set()
    for b in f.breakpoints:
        seen = {b}
        x = b
        for _ in range(budget):
            x = f(x)
            if x in seen or x in points:
                break
            seen.add(x)
        else:
            return None
        points |= seen
    return sorted(points)


def partition_graph(f: PiecewiseAffineMap, points):
    """Covering and interior-intersection matrices of the partition by `points`.

    The points must include every breakpoint so that f is monotone or constant
    on each element.  Constant elements have no outgoing arrows.
    """
    elems = list(zip(points, points[1:]))
    n = len(elems)
    cover = [[0] * n for _ in range(n)]
    meet = [[0] * n for _ in range(n)]
    for i, (a, b) in enumerate(elems):
        ya, yb = f(a), f(b)
        lo, hi = min(ya, yb), max(ya, yb)
        for j, (u, v) in enumerate(elems):
            if lo < hi:
                if lo <= u and v <= hi:
                    cover[i][j] = 1
                if lo < v and u < hi:
                    meet[i][j] = 1
            elif u < lo < v:
                meet[i][j] = 1
    return elems, cover, meet


def markov_graph(f: PiecewiseAffineMap, budget: int = DEFAULT_BUDGET) -> TransitionGraph:
    """Transition graph of the partition by breakpoint orbits, when they are finite."""
    points = breakpoint_orbits(f, budget)
    if points is None:
        raise NotMarkovWithinBudget(f"breakpoint orbits not finite within {budget} steps")
    elems, cover, _ = partition_graph(f, points)
    arrows = tuple((i, j) for i in range(len(elems)) for j in range(len(elems)) if cover[i][j])
    return TransitionGraph(tuple(elems), arrows, tuple(tuple(r) for r in cover))


# ------------------------------------------------------------- spectral radius

def _block_bounds(b, tol, max_iter):
    n = b.shape[0]
    if n == 1:
        return b[0, 0], b[0, 0]
    rows = b.sum(axis=1)
    if np.all(rows == rows[0]):
        return rows[0], rows[0]
    vals, vecs = np.linalg.eig(b)
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    lo, hi = 0.0, float(rows.max())
    shifted = b + np.eye(n)
    for _ in range(max_iter):
        if (v > 0).all():
            ratios = (b @ v) / v
            lo, hi = max(lo, ratios.min()), min(hi, ratios.max())
            if hi - lo <= tol * hi:
                break
        # the shift makes the irreducible block primitive
        v = shifted @ (v + 1e-300)
        v /= v.sum()
    return lo, hi


def spectral_bounds(matrix, tol: float = 1e-12, max_iter: int = 5000):
    """(lower, upper) bounds on the spectral radius of a nonnegative matrix.

    The radius is the largest over strongly connected blocks.  Single vertices
    and blocks with constant row sums are exact; other blocks get
    Collatz-Wielandt bounds min/max (Bv)_i/v_i from the Perron vector,
    tightened by power iteration on B + I if needed.
    """
    a = np.asarray(matrix, dtype=float)
    if a.size == 0 or not a.any():
        return 0.0, 0.0
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("matrix must be square")
    if (a < 0).any():
        raise DomainError("matrix must be nonnegative")
    _, labels = connected_components(csr_matrix(a), directed=True, connection="strong")
    lo = hi = 0.0
    for comp in np.unique(labels):
        idx = np.flatnonzero(labels == comp)
        blo, bhi = _block_bounds(a[np.ix_(idx, idx)], tol, max_iter)
        lo, hi = max(lo, blo), max(hi, bhi)
    return float(lo), float(hi)


def leading_eigenvalue(matrix, tol: float = 1e-12) -> float:
    """Spectral radius of a nonnegative square matrix (zero matrix gives 0)."""
    lo, hi = spectral_bounds(matrix, tol)
    return 0.5 * (lo + hi)


def char_poly(matrix):
    """Characteristic polynomial det(xI - A) of an integer or rational matrix."""
    x = sympy.Symbol("x")
    m = sympy.Matrix([[sympy.Rational(str(Fraction(a))) for a in row] for row in matrix])
    return sympy.Poly(m.charpoly(x).as_expr(), x)


def _largest_root_interval(p, eps=None):
    roots = p.intervals(eps=eps) if eps is not None else p.intervals()
    if not roots:
        return None
    (a, b), _ = max(roots, key=lambda r: r[0][1])
    return a, b


def certify_spectral_drop(after, before, max_refine: int = 60):
    """Rational q with rho(after) < q <= rho(before), decided exactly, or None.

    Spectral radii of nonnegative matrices are the largest real roots of their
    characteristic polynomials, which are isolated in rational intervals and
    compared by exact root counting.  None means rho(after) >= rho(before).
    """
    pa, pb = char_poly(after), char_poly(before)
    box = _largest_root_interval(pb)
    if box is None:
        return None
    g = sympy.gcd(pa, pb)
    if g.degree() > 0 and g.count_roots(*box) > 0:
        return None
    eps = sympy.Rational(1, 8)
    for _ in range(max_refine):
        a, b = _largest_root_interval(pb, eps)
        if pa.count_roots(a) == 0:
            return Fraction(int(a.p), int(a.q))
        if pa.count_roots(b) > 0:
            return None
        eps /= 16
    return None


# ------------------------------------------------------------------------ rome

@dataclass(frozen=True)
class RomeMatrix:
    """Entries a_ij(x) = sum over rome-to-rome paths p of x^(1 - len(p)).

    Each entry is a dict exponent -> coefficient (exponents are <= 0).
    """

    rome: tuple
    entries: tuple

    def evaluate(self, x):
        x = Fraction(x)
        if x == 0 and any(k < 0 for row in self.entries for e in row for k in e):
            raise DomainError("rome entries have negative powers; x must be nonzero")
        return [[sum((c * x ** k for k, c in e.items()), Fraction(0)) for e in row]
                for row in self.entries]


def _check_rome(graph: TransitionGraph, rome):
    outside = [v for v in range(graph.size) if v not in rome]
    state = {v: 0 for v in outside}

    def visit(v):
        state[v] = 1
        for w in graph.successors(v):
            if w in state:
                if state[w] == 1:
                    raise RomeInvalid(f"loop outside the rome through vertex {w}")
                if state[w] == 0:
                    visit(w)
        state[v] = 2

    for v in outside:
        if state[v] == 0:
            visit(v)


def rome_reduce(graph: TransitionGraph, rome) -> RomeMatrix:
    rome = tuple(sorted(set(rome)))
    if any(not 0 <= r < graph.size for r in rome):
        raise DomainError("rome vertex out of range")
    _check_rome(graph, rome)
    in_rome = set(rome)
    index = {r: k for k, r in enumerate(rome)}
    entries = [[defaultdict(int) for _ in rome] for _ in rome]

    # multiplicity of arrows matters, so paths are weighted by matrix entries
    def walk(start, v, length, weight):
        for w in graph.successors(v):
            wt = weight * graph.matrix[v][w]
            if w in in_rome:
                entries[index[start]][index[w]][1 - (length + 1)] += wt
            else:
                walk(start, w, length + 1, wt)

    for r in rome:
        walk(r, r, 0, 1)
    return RomeMatrix(rome, tuple(tuple(dict(e) for e in row) for row in entries))


def determinant(matrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = [[Fraction(a) for a in row] for row in matrix]
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign, prev = 1, Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rome_identity_sides(graph: TransitionGraph, rome, x):
    """Both sides of det(A - xI) = (-x)^(#G - #R) det(A_R(x) - xI)."""
    x = Fraction(x)
    n = graph.size
    left = determinant([[graph.matrix[i][j] - (x if i == j else 0) for j in range(n)]
                        for i in range(n)])
    reduced = rome_reduce(graph, rome)
    vals = reduced.evaluate(x)
    k = len(reduced.rome)
    right = (-x) ** (n - k) * determinant(
        [[vals[i][j] - (x if i == j else 0) for j in range(k)] for i in range(k)])
    return left, right


def rome_identity_check(graph: TransitionGraph, rome, x) -> bool:
    left, right = rome_identity_sides(graph, rome, x)
    return left == right


def entropy_from_graph(graph: TransitionGraph) -> float:
    rho = leading_eigenvalue(graph.matrix)
    return math.log(rho) if rho > 1 else 0.0
