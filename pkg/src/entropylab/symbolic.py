"""Itineraries, signed lexicographic order, kneading invariants.

Symbols use the alphabet I_0, c_1, I_1, ..., c_d, I_d: laps are numbered
from 0 and turning symbols from 1, so c_i sits between I_{i-1} and I_i.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import AmbiguousSymbol, DomainError, InadmissibleSequence
from .maps import (PiecewiseAffineMap, PolynomialMap, SawtoothGeometry, Shape,
                   eval_sawtooth, is_maximum, lap_orientation)

DEFAULT_RESOLUTION = 1e-10


@dataclass(frozen=True)
class Symbol:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("lap", "turn"):
            raise ValueError(f"bad symbol kind {self.kind!r}")
        if self.index < (0 if self.kind == "lap" else 1):
            raise ValueError(f"bad symbol index {self.index}")

    @property
    def position(self) -> int:
        """Rank in the spatial order I_0 < c_1 < I_1 < ... ."""
        return 2 * self.index if self.kind == "lap" else 2 * self.index - 1

    def orientation(self, shape: Shape) -> int:
        return lap_orientation(shape, self.index) if self.kind == "lap" else 1

    def __str__(self):
        return f"I{self.index}" if self.kind == "lap" else f"c{self.index}"

    @classmethod
    def parse(cls, text: str) -> "Symbol":
        m = re.fullmatch(r"\s*([Ic])(\d+)\s*", text)
        if not m:
            raise ValueError(f"bad symbol {text!r}")
        return cls("lap" if m.group(1) == "I" else "turn", int(m.group(2)))


def lap(j: int) -> Symbol:
    return Symbol("lap", j)


def turn(i: int) -> Symbol:
    return Symbol("turn", i)


@dataclass(frozen=True)
class SymbolSequence:
    """A finite prefix followed by an optional forever-repeating cycle."""

    symbols: tuple
    cycle: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.symbols and not self.cycle:
            raise ValueError("empty symbol sequence")

    @property
    def depth(self) -> int:
        return len(self.symbols) + len(self.cycle)

    @property
    def is_periodic(self) -> bool:
        return bool(self.cycle)

    def expand(self, n: int) -> tuple:
        if n <= len(self.symbols):
            return self.symbols[:n]
        if not self.cycle:
            raise ValueError(f"sequence has only {self.depth} symbols")
        extra = n - len(self.symbols)
        reps = -(-extra // len(self.cycle))
        return self.symbols + (self.cycle * reps)[:extra]

    def __getitem__(self, k: int) -> Symbol:
        return self.expand(k + 1)[k]

    def __str__(self):
        head = " ".join(str(s) for s in self.symbols)
        if not self.cycle:
            return head
        tail = "per(" + " ".join(str(s) for s in self.cycle) + ")"
        return f"{head} | {tail}" if head else f"| {tail}"

    @classmethod
    def parse(cls, text: str) -> "SymbolSequence":
        head, _, tail = text.partition("|")
        symbols = tuple(Symbol.parse(t) for t in head.split())
        cycle = ()
        if tail.strip():
            m = re.fullmatch(r"\s*per\((.*)\)\s*", tail)
            if not m:
                raise ValueError(f"bad periodic tail {tail!r}")
            cycle = tuple(Symbol.parse(t) for t in m.group(1).split())
        return cls(symbols, cycle)

    def canonical(self) -> "SymbolSequence":
        """Shortest prefix and primitive cycle describing the same sequence."""
        if not self.cycle:
            return self
        cyc = self.cycle
        for p in range(1, len(cyc) + 1):
            if len(cyc) % p == 0 and cyc == cyc[:p] * (len(cyc) // p):
                cyc = cyc[:p]
                break
        pre = list(self.symbols)
        while pre and pre[-1] == cyc[-1]:
            cyc = (pre.pop(),) + cyc[:-1]
        return SymbolSequence(tuple(pre), cyc)


def with_periodic_tail(symbols, min_repeats=3) -> SymbolSequence:
    """Fold a finite sequence whose tail repeats into prefix plus cycle.

    A tail of period p is accepted when it covers at least half of the
    sequence and repeats at least `min_repeats` times.
    """
    symbols = tuple(symbols)
    n = len(symbols)
    for p in range(1, n // min_repeats + 1):
        start = n - p
        while start > 0 and symbols[start - 1] == symbols[start - 1 + p]:
            start -= 1
        if n - start >= max(min_repeats * p, -(-n // 2)):
            return SymbolSequence(symbols[:start], symbols[start:start + p]).canonical()
    return SymbolSequence(symbols)


@dataclass(frozen=True)
class KneadingInvariant:
    nu: tuple
    shape: Shape
    depth: int

    def __post_init__(self):
        for seq in self.nu:
            if any(s.kind == "turn" for s in seq.symbols + seq.cycle):
                raise ValueError("kneading sequences never contain turning symbols")

    def __str__(self):
        return "; ".join(str(s) for s in self.nu)


def _critical_points(f):
    if isinstance(f, PolynomialMap):
        return f.critical_points
    return f.turning_points


def _point_symbol(f, x, resolution, exact):
    crit = _critical_points(f)
    for i, c in enumerate(crit):
        if x == c:
            return turn(i + 1)
        if not exact and abs(x - c) <= resolution * (f.domain[1] - f.domain[0]):
            return turn(i + 1)
    return lap(sum(1 for c in crit if c < x))


def itinerary(f, x, depth: int, resolution: float = DEFAULT_RESOLUTION) -> SymbolSequence:
    """Symbols of x, f(x), ..., f^{depth-1}(x)."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    exact = isinstance(f, PiecewiseAffineMap)
    lo, hi = f.domain
    out = []
    for _ in range(depth):
        if x < lo or x > hi:
            raise DomainError(f"orbit left the domain at {x}")
        out.append(_point_symbol(f, x, resolution, exact))
        if len(out) < depth:
            x = f(x)
    return SymbolSequence(tuple(out))


def _snap(y, lo, hi, tol):
    if abs(y - lo) <= tol:
        return lo
    if abs(y - hi) <= tol:
        return hi
    return min(max(y, lo), hi)


def kneading(f: PolynomialMap, depth: int, resolution: float = DEFAULT_RESOLUTION,
             min_repeats: int = 3) -> KneadingInvariant:
    """One-sided limit itineraries x -> c_i from the right, for every critical point.

    An orbit point equal to a critical point continues with the lap on the
    side the nearby orbit approaches from.  Periodic tails that are confirmed
    by a non-expanding float orbit are stored as exact cycles.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    crit = f.critical_points
    lo, hi = f.domain
    tol = resolution * (hi - lo)
    seqs = []
    for i, c in enumerate(crit):
        symbols = [lap(i + 1)]
        ys = []
        y = f(c)
        side = -1 if is_maximum(f.shape, i) else 1
        for k in range(1, depth):
            y = _snap(y, lo, hi, tol)
            ys.append(y)
            hit = next((j for j, cj in enumerate(crit) if y == cj), None)
            if hit is not None:
                symbols.append(lap(hit + 1 if side > 0 else hit))
                side = -1 if is_maximum(f.shape, hit) else 1
            else:
                near = next((j for j, cj in enumerate(crit) if abs(y - cj) <= tol), None)
                if near is not None:
                    raise AmbiguousSymbol(
                        f"orbit of c_{i + 1} passes within {resolution} of c_{near + 1}",
                        step=k, critical_index=near)
                j = f.lap_of(y)
                symbols.append(lap(j))
                side *= lap_orientation(f.shape, j)
            y = f(y)
        seq = with_periodic_tail(symbols, min_repeats)
        if seq.is_periodic and not _orbit_settles(ys, len(seq.symbols) - 1, len(seq.cycle)):
            seq = SymbolSequence(tuple(symbols))
        seqs.append(seq)
    return KneadingInvariant(tuple(seqs), f.shape, depth)


def _orbit_settles(ys, start, period):
    """Whether the float orbit along a periodic symbol tail is not drifting apart."""
    start = max(start, 0)
    gaps = [abs(ys[k + period] - ys[k]) for k in range(start, len(ys) - period)]
    if len(gaps) < 2:
        return True
    return gaps[-1] == 0.0 or gaps[-1] <= gaps[0] or gaps[-1] < 1e-12


def _common_length(s: SymbolSequence, t: SymbolSequence) -> int:
    if s.is_periodic and t.is_periodic:
        return max(len(s.symbols), len(t.symbols)) + math.lcm(len(s.cycle), len(t.cycle))
    if s.is_periodic:
        return t.depth
    if t.is_periodic:
        return s.depth
    return min(s.depth, t.depth)


def signed_lex_compare(s: SymbolSequence, t: SymbolSequence, shape) -> int:
    """-1, 0 or 1 as s is below, equal to or above t over their common depth."""
    shape = Shape.parse(shape)
    n = _common_length(s, t)
    sign = 1
    for a, b in zip(s.expand(n), t.expand(n)):
        if a != b:
            return sign if a.position > b.position else -sign
        sign *= a.orientation(shape)
    return 0


@dataclass(frozen=True)
class Realization:
    point: Fraction
    error: Fraction

    @property
    def exact(self) -> bool:
        return self.error == 0


def _branch(g: SawtoothGeometry, sym: Symbol, depth: int):
    if sym.kind != "lap" or sym.index > g.d:
        raise InadmissibleSequence(f"symbol {sym} cannot be realized", depth)
    lo, _ = g.lap_bounds(sym.index)
    slope = Fraction(g.orientation(sym.index)) / g.lam
    return slope, lo - slope * eval_sawtooth(g, lo)


def _compose(g, symbols, offset=0):
    """Affine map y -> a*y + b sending S^n-images back through the given branches."""
    a, b = Fraction(1), Fraction(0)
    for k in range(len(symbols) - 1, -1, -1):
        sa, sb = _branch(g, symbols[k], offset + k)
        a, b = sa * a, sa * b + sb
    return a, b


def realize_in_sawtooth(g: SawtoothGeometry, nu: SymbolSequence) -> Realization:
    """Point s of [-e, e] whose right-hand itinerary under S is nu.

    Periodic tails are solved exactly as fixed points of the composed inverse
    branches.  A finite sequence of depth n yields the left end of its
    cylinder, whose length is at most 2e/lambda^n.
    """
    if nu.is_periodic:
        a, b = _compose(g, nu.cycle, len(nu.symbols))
        y = b / (1 - a)
        if not -g.e <= y <= g.e:
            raise InadmissibleSequence("periodic tail has no fixed point in [-e, e]",
                                       len(nu.symbols))
        error = Fraction(0)
    else:
        a, _ = _compose(g, nu.symbols)
        y = -g.e if a > 0 else g.e
        error = 2 * g.e / g.lam ** len(nu.symbols)
    return Realization(_apply_prefix(g, nu.symbols, y), error)


def _apply_prefix(g, symbols, y):
    for k in range(len(symbols) - 1, -1, -1):
        sa, sb = _branch(g, symbols[k], k)
        y = sa * y + sb
        if not -g.e <= y <= g.e:
            raise InadmissibleSequence(f"inverse branch leaves [-e, e] at depth {k}", k)
    return y
