"""Exact lap counting for iterates of piecewise affine maps.

Instead of listing the laps of T^n one by one (there are exponentially many)
the census keeps a multiset of lap records.  A record is the image interval
T^n(L) of a lap L together with the orientation of T^n on L; laps with equal
records evolve identically, so only the multiplicities need storing.  Between
neighbouring laps sits a junction: the common endpoint's image together with
the side from which each neighbour approaches it.  Two constant laps of T^n
whose junction both sides collapse merge into one lap of T^{n+1}.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..errors import CapExceeded
from ..maps import PiecewiseAffineMap

DEFAULT_CAP = 10 ** 7


@dataclass(frozen=True)
class LapCensus:
    counts: tuple
    monotone_counts: tuple
    n: int

    def upper_bounds(self):
        """(1/k) log l(T^k) for k = 1..n."""
        return tuple(math.log(c) / k for k, c in enumerate(self.counts, start=1))

    def monotone_upper_bound(self) -> float:
        """Best bound min_k (1/k) log m_k from the non-constant lap counts."""
        best = math.inf
        for k, m in enumerate(self.monotone_counts, start=1):
            if m == 0:
                return 0.0
            best = min(best, math.log(m) / k)
        return best


class _Transitions:
    """Memoized one-step images of lap and junction records for one map."""

    def __init__(self, f: PiecewiseAffineMap):
        self.f = f
        self.laps = {}
        self.junctions = {}

    def lap(self, rec):
        out = self.laps.get(rec)
        if out is None:
            out = self.laps[rec] = self._lap(rec)
        return out

    def _lap(self, rec):
        f = self.f
        u, v, o = rec
        if o == 0:
            y = f(u)
            return ((y, y, 0),), ()
        pieces = f.pieces_in(u, v)
        laps = []
        for a, b, po in pieces:
            fa, fb = f(a), f(b)
            laps.append((fa, fa, 0) if po == 0 else (min(fa, fb), max(fa, fb), o * po))
        junctions = tuple((f(b), f.propagate_side(b, -o), f.propagate_side(b, o))
                          for (_, b, _) in pieces[:-1])
        return tuple(laps), junctions

    def junction(self, rec):
        out = self.junctions.get(rec)
        if out is None:
            f = self.f
            y, sl, sr = rec
            nl, nr = f.propagate_side(y, sl), f.propagate_side(y, sr)
            z = f(y)
            # two constant neighbours merge: one constant lap fewer
            out = self.junctions[rec] = ("merge", (z, z, 0)) if nl == 0 and nr == 0 \
                else ("keep", (z, nl, nr))
        return out


class _CensusState:
    def __init__(self, f: PiecewiseAffineMap, lo, hi, cap: int, transitions=None):
        self.trans = transitions or _Transitions(f)
        self.cap = cap
        self.laps = Counter()
        self.junctions = Counter()
        if lo < hi:
            self.laps[(lo, hi, 1)] = 1
        else:
            self.laps[(lo, lo, 0)] = 1

    def total(self) -> int:
        return sum(self.laps.values())

    def monotone(self) -> int:
        return sum(c for (_, _, o), c in self.laps.items() if o != 0)

    def step(self):
        laps, junctions = Counter(), Counter()
        for rec, c in self.laps.items():
            new_laps, new_junctions = self.trans.lap(rec)
            for r in new_laps:
                laps[r] += c
            for r in new_junctions:
                junctions[r] += c
        for rec, c in self.junctions.items():
            kind, r = self.trans.junction(rec)
            if kind == "merge":
                laps[r] -= c
            else:
                junctions[r] += c
        self.laps = +laps
        self.junctions = +junctions
        if len(self.laps) + len(self.junctions) > self.cap:
            raise CapExceeded(f"census records exceed cap {self.cap}")


def lap_census(f: PiecewiseAffineMap, n: int, interval=None, cap: int = DEFAULT_CAP) -> LapCensus:
    """Lap counts l(T^k|J) for k = 1..n, with J the whole domain by default.

    Constant pieces count as laps.  The non-constant counts m_k are recorded
    alongside; they are submultiplicative as well and give sharper bounds.
    """
    if n < 1:
        raise ValueError("depth must be at least 1")
    lo, hi = interval if interval is not None else f.domain
    state = _CensusState(f, lo, hi, cap)
    counts, mono = [], []
    for _ in range(n):
        state.step()
        counts.append(state.total())
        mono.append(state.monotone())
    return LapCensus(tuple(counts), tuple(mono), n)


def lap_counts_from(f: PiecewiseAffineMap, lo, hi, n: int, cap: int = DEFAULT_CAP,
                    transitions=None):
    """l(T^k|[lo, hi]) for k = 0..n (k = 0 gives 1).

    Pass the same `transitions` cache when counting many intervals of one map.
    """
    state = _CensusState(f, lo, hi, cap, transitions)
    out = [state.total()]
    for _ in range(n):
        state.step()
        out.append(state.total())
    return out


def brute_force_laps(f: PiecewiseAffineMap, n: int, interval=None):
    """Reference lap counts by explicit piece propagation (small n only)."""
    lo, hi = interval if interval is not None else f.domain
    # pieces of T^k as (a, b, T^k(a), T^k(b)); T^k is affine on each
    pieces = [(lo, hi, lo, hi)]
    out = []
    for _ in range(n):
        nxt = []
        for a, b, ya, yb in pieces:
            if ya == yb:
                y = f(ya)
                nxt.append((a, b, y, y))
                continue
            inc = yb > ya
            cuts = [y for y in f.breakpoints if min(ya, yb) < y < max(ya, yb)]
            cuts.sort(reverse=not inc)
            ys = [ya] + cuts + [yb]
            xs = [a + (y - ya) * (b - a) / (yb - ya) for y in ys]
            for k in range(len(ys) - 1):
                nxt.append((xs[k], xs[k + 1], f(ys[k]), f(ys[k + 1])))
        pieces = nxt
        out.append(_count_laps(pieces))
    return out


def _count_laps(pieces):
    laps = 0
    prev = None
    for a, b, ya, yb in pieces:
        if a == b:
            continue
        o = (yb > ya) - (yb < ya)
        if o != prev:
            laps += 1
            prev = o
    return laps
