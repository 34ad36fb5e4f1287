"""Parameter flows on stunted sawtooth maps.

All flows move each ζ_i at a rate in {-2e, 0, 2e} that is constant between
events, so event times solve linear equations with rational data and the
paths are exact.  A coordinate stops when its motion would leave [-e, e].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .correspondence import is_nondegenerate
from .entropy.bracket import EntropyEstimate, entropy_bracket
from .errors import EntropyAboveTarget, NotInSigma, PreconditionError, UnknownStructure
from .maps import StuntedParams, build_stunted, eval_sawtooth
from .numbers import as_fraction

EVENT_KINDS = ("clip-at-e", "touch", "sign-change", "block-merge", "flow-end")


@dataclass(frozen=True)
class FlowEvent:
    time: Fraction
    kind: str
    indices: tuple


@dataclass(frozen=True)
class FlowTrace:
    """Piecewise linear path t -> ζ(t); knots are (time, ζ) at every event."""

    start: StuntedParams
    knots: tuple
    events: tuple
    duration: Fraction

    def at(self, t) -> StuntedParams:
        t = as_fraction(t)
        if t < 0:
            raise PreconditionError("time must be nonnegative")
        knots = self.knots
        if t >= knots[-1][0]:
            return self.end
        for k in range(len(knots) - 1):
            if knots[k][0] <= t <= knots[k + 1][0]:
                (t0, z0), (t1, z1) = knots[k], knots[k + 1]
                s = (t - t0) / (t1 - t0)
                return self.start.replace(tuple(a + s * (b - a) for a, b in zip(z0, z1)))
        raise AssertionError("unreachable")

    @property
    def end(self) -> StuntedParams:
        return self.start.replace(self.knots[-1][1])

    def rows(self):
        """(time, ζ_1..ζ_d, event kinds) per knot, for CSV export."""
        kinds = {}
        for ev in self.events:
            kinds.setdefault(ev.time, []).append(ev.kind)
        return [(t, *z, "+".join(kinds.get(t, []))) for t, z in self.knots]


@dataclass(frozen=True)
class SignVector:
    sgn: tuple
    hsgn: tuple


# ------------------------------------------------------------------- signs

def blocks(params: StuntedParams):
    """Maximal runs of consecutive touching plateaus as (first, last) indices."""
    out, start = [], 0
    for i in range(params.d - 1):
        if not params.touches(i):
            out.append((start, i))
            start = i + 1
    out.append((start, params.d - 1))
    return out


def signs(params: StuntedParams) -> SignVector:
    sgn, hsgn = [0] * params.d, [0] * params.d
    for a, b in blocks(params):
        size = b - a + 1
        for i in range(a, b + 1):
            sgn[i] = 1 if size == 1 else 0
            if size % 2 == 1:
                hsgn[i] = 1 if (i - a) % 2 == 0 else -1
    return SignVector(tuple(sgn), tuple(hsgn))


# ---------------------------------------------------------------- gamma

def gamma(params: StuntedParams, t) -> StuntedParams:
    """Raise every ζ_i by 2e t, clipped at e."""
    t = as_fraction(t)
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    e = params.e
    return params.replace(tuple(min(z + 2 * e * t, e) for z in params.zeta))


@dataclass(frozen=True)
class GammaResult:
    params: StuntedParams
    t_max: Fraction
    estimate: EntropyEstimate
    resolved: bool


def _above(params, h0, n_max):
    est = entropy_bracket(build_stunted(params), n_max)
    return est.lower > h0, est


def Gamma(params: StuntedParams, t, h0: float, tol=Fraction(1, 1024), n_max: int = 20,
          h_tol: float = 1e-9) -> GammaResult:
    """γ_{t·t_max}(T) with t_max the largest s in [0, 1] with h(γ_s(T)) = h0.

    s is placed above t_max only when the entropy bracket of γ_s(T) lies
    strictly above h0, so t_max is found to within `tol` from above the
    certified part.  `resolved` is False when the final bracket still
    straddles h0 by more than h_tol.
    """
    t, tol = as_fraction(t), as_fraction(tol)
    above, est0 = _above(params, h0 + h_tol, n_max)
    if above:
        raise EntropyAboveTarget(f"entropy {est0.lower:.6g} above target {h0}")
    lo, hi = Fraction(0), Fraction(1)
    top_above, _ = _above(gamma(params, hi), h0, n_max)
    if not top_above:
        lo = hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _above(gamma(params, mid), h0, n_max)[0]:
            hi = mid
        else:
            lo = mid
    out = gamma(params, t * lo)
    est = entropy_bracket(build_stunted(gamma(params, lo)), n_max)
    resolved = est.upper - h0 <= h_tol or est.width <= h_tol
    return GammaResult(out, lo, est, resolved)


# -------------------------------------------------------- delta flows

def _effective(params, raw):
    e = params.e
    out = []
    for z, r in zip(params.zeta, raw):
        if (r < 0 and z <= -e) or (r > 0 and z >= e):
            r = 0
        out.append(r)
    return tuple(out)


def _next_event(params, rates):
    """Earliest positive time at which a coordinate clips or a pair touches."""
    e = params.e
    best = None
    for z, r in zip(params.zeta, rates):
        if r:
            tau = ((e if r > 0 else -e) - z) / r
            best = tau if best is None else min(best, tau)
    for i in range(params.d - 1):
        s = params.zeta[i] + params.zeta[i + 1]
        ds = rates[i] + rates[i + 1]
        if s > 0 and ds < 0:
            tau = s / -ds
            best = tau if best is None else min(best, tau)
    return best


def _classify(before, after, old_rates):
    events = []
    for i, (z0, z1) in enumerate(zip(before.zeta, after.zeta)):
        if old_rates[i] and abs(z1) == after.e and abs(z0) != after.e:
            events.append(("clip-at-e", (i,)))
    old = blocks(before)
    for i in range(after.d - 1):
        if after.touches(i) and not before.touches(i):
            a = next(b for b in old if b[0] <= i <= b[1])
            c = next(b for b in old if b[0] <= i + 1 <= b[1])
            grown = a[0] != a[1] or c[0] != c[1]
            events.append(("block-merge" if grown else "touch", (i, i + 1)))
    return events


def _run_flow(params: StuntedParams, t, sign_of) -> FlowTrace:
    t = as_fraction(t)
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    e = params.e
    now, cur = Fraction(0), params
    knots, events = [(now, cur.zeta)], []
    raw = tuple(-2 * e * s for s in sign_of(cur))
    rates = _effective(cur, raw)
    while now < t:
        if not any(rates):
            events.append(FlowEvent(now, "flow-end", ()))
            break
        tau = _next_event(cur, rates)
        step = t - now if tau is None else min(tau, t - now)
        nxt = cur.replace(tuple(z + r * step for z, r in zip(cur.zeta, rates)))
        now += step
        knots.append((now, nxt.zeta))
        for kind, idx in _classify(cur, nxt, rates):
            events.append(FlowEvent(now, kind, idx))
        old_signs = sign_of(cur)
        cur = nxt
        new_signs = sign_of(cur)
        if new_signs != old_signs:
            changed = tuple(i for i, (a, b) in enumerate(zip(old_signs, new_signs)) if a != b)
            events.append(FlowEvent(now, "sign-change", changed))
        rates = _effective(cur, tuple(-2 * e * s for s in new_signs))
    else:
        if not any(rates):
            events.append(FlowEvent(now, "flow-end", ()))
    return FlowTrace(params, tuple(knots), tuple(events), t)


def delta_flow(params: StuntedParams, t) -> FlowTrace:
    """Lower every plateau not touching another one at speed 2e."""
    return _run_flow(params, t, lambda p: signs(p).sgn)


def hat_delta_flow(params: StuntedParams, t) -> FlowTrace:
    """Move every odd block of plateaus towards flat, alternating within the block."""
    return _run_flow(params, t, lambda p: signs(p).hsgn)


def delta(params: StuntedParams, t) -> StuntedParams:
    return delta_flow(params, t).end


def hat_delta(params: StuntedParams, t) -> StuntedParams:
    return hat_delta_flow(params, t).end


# ------------------------------------------------------------------ retracts

def sigma_base(params: StuntedParams) -> StuntedParams:
    """Canonical map T_0: the constant map for odd d, else the simplex barycenter.

    For even d the set is {ζ_{2k} = -ζ_{2k-1}, -e <= ζ_1 <= ζ_3 <= ... <= e},
    a simplex in u_k = ζ_{2k-1} whose barycenter is u_k = e(2k - m - 1)/(m + 1).
    """
    d, e = params.d, params.e
    if d % 2:
        return params.replace(tuple(-e if i % 2 == 0 else e for i in range(d)))
    m = d // 2
    zeta = []
    for k in range(1, m + 1):
        u = e * (2 * k - m - 1) / (m + 1)
        zeta += [u, -u]
    return params.replace(tuple(zeta))


def in_sigma(params: StuntedParams) -> bool:
    if params.d % 2:
        return params.zeta == sigma_base(params).zeta
    return all(params.touches(i) for i in range(0, params.d, 2))


def sigma_retract(params: StuntedParams, t) -> StuntedParams:
    """Straight line from T to T_0 inside the convex set of flattened maps."""
    if not in_sigma(params):
        raise NotInSigma("map is neither constant nor monotone with paired plateaus")
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise PreconditionError("t must lie in [0, 1]")
    base = sigma_base(params)
    return params.replace(tuple(a + t * (b - a) for a, b in zip(params.zeta, base.zeta)))


def retract_zero(params: StuntedParams, t, tol: float = 1e-9, n_max: int = 20,
                 budget: int = 10_000) -> StuntedParams:
    """Retract of the zero-entropy maps: flatten with δ̂, then slide to T_0."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise PreconditionError("t must lie in [0, 1]")
    est = entropy_bracket(build_stunted(params), n_max)
    if est.upper > tol:
        raise PreconditionError(f"entropy not certified below {tol} (upper bound {est.upper:.3g})")
    if is_nondegenerate(params, budget) == "no":
        raise PreconditionError("map has a wandering pair avoiding periodic plateaus")
    if 2 * t <= 1:
        return hat_delta(params, 2 * t)
    return sigma_retract(hat_delta(params, 1), 2 * t - 1)


def plateau_periods(params: StuntedParams, budget: int = 10_000):
    """Periods of the plateau cycles, i.e. of the periodic plateaus."""
    T = build_stunted(params)
    flats = [params.plateau(i) for i in range(params.d)]
    out = set()
    for i, (a, b) in enumerate(flats):
        x = T(a)
        for n in range(1, budget + 1):
            if a <= x <= b:
                out.add(n)
                break
            x = T(x)
    return sorted(out)


# ------------------------------------------------------------------- beta

class _Lin:
    """Affine function v + dv*s of the flow time, compared at s = 0+."""

    __slots__ = ("v", "dv")

    def __init__(self, v, dv=0):
        self.v, self.dv = v, dv

    def __add__(self, o):
        return _Lin(self.v + o.v, self.dv + o.dv)

    def __sub__(self, o):
        return _Lin(self.v - o.v, self.dv - o.dv)

    def scale(self, k):
        return _Lin(self.v * k, self.dv * k)

    def key(self):
        return self.v, self.dv


class _Crossings:
    """Evaluates comparisons at s = 0+ and keeps the first time one flips."""

    def __init__(self):
        self.first = None

    def ge0(self, x: _Lin) -> bool:
        if x.v != 0 and x.dv != 0 and (x.v > 0) != (x.dv > 0):
            s = -x.v / x.dv
            self.first = s if self.first is None else min(self.first, s)
        return x.v > 0 or (x.v == 0 and x.dv >= 0)

    def le(self, a, b):
        return self.ge0(b - a)

    def lt(self, a, b):
        return not self.ge0(a - b)


class _MovingMap:
    def __init__(self, params: StuntedParams, rates, cmp: _Crossings):
        g = params.geometry
        self.g, self.p, self.cmp = g, params, cmp
        lam = g.lam
        self.flats, self.values = [], []
        for i, (z, r) in enumerate(zip(params.zeta, rates)):
            c = g.turning_points[i]
            self.flats.append((_Lin(c - 1 + z / lam, r / lam), _Lin(c + 1 - z / lam, -r / lam)))
            sign = 1 if g.is_max(i) else -1
            self.values.append(_Lin(sign * z, sign * r))
        ends = (-g.e,) + g.turning_points + (g.e,)
        self.laps = list(zip(ends, ends[1:]))

    def flat_of(self, x):
        cmp = self.cmp
        for k, (a, b) in enumerate(self.flats):
            if cmp.le(a, x) and cmp.le(x, b):
                return k
        return None

    def __call__(self, x: _Lin) -> _Lin:
        k = self.flat_of(x)
        if k is not None:
            return self.values[k]
        g = self.g
        for j, (lo, hi) in enumerate(self.laps):
            if j == len(self.laps) - 1 or self.cmp.lt(x, _Lin(hi)):
                slope = g.orientation(j) * g.lam
                return _Lin(eval_sawtooth(g, x.v), x.dv * slope)
        raise AssertionError("unreachable")

    def image(self, a, b):
        cmp = self.cmp
        cands = [self(a), self(b)]
        for k, (u, v) in enumerate(self.flats):
            if cmp.lt(a, v) and cmp.lt(u, b):
                cands.append(self.values[k])
        lo = hi = cands[0]
        for c in cands[1:]:
            if cmp.lt(c, lo):
                lo = c
            if cmp.lt(hi, c):
                hi = c
        return lo, hi

    def meets(self, k, a, b):
        u, v = self.flats[k]
        return self.cmp.le(a, v) and self.cmp.le(u, b)

    def inside(self, k, a, b, strict=False):
        u, v = self.flats[k]
        test = self.cmp.lt if strict else self.cmp.le
        return test(u, a) and test(b, v)


@dataclass(frozen=True)
class BetaSets:
    """I(T) as {i: (n_i, k(i))}, I°(T), and I_i(T) for i in I°."""

    landing: dict
    interior: frozenset
    crossed: dict

    def moving(self, d):
        out = set()
        for i in self.interior:
            out |= {i, i + 1}
        return tuple(1 if j in out else 0 for j in range(d))

    def key(self):
        return (tuple(sorted(self.landing.items())), tuple(sorted(self.interior)),
                tuple(sorted((i, tuple(sorted(s))) for i, s in self.crossed.items())))


def _periodic_flats(M: _MovingMap, budget):
    out = []
    for k in range(len(M.flats)):
        x, visited, seen = M.values[k], {k}, set()
        periodic = False
        for _ in range(budget):
            m = M.flat_of(x)
            if m is not None:
                if m == k:
                    periodic = True
                    break
                if m in visited:
                    break
                visited.add(m)
                x, seen = M.values[m], set()
                continue
            if x.v in seen:
                break
            seen.add(x.v)
            x = M(x)
        else:
            raise UnknownStructure(f"orbit of plateau {k} undecided within budget")
        out.append(periodic)
    return out


def beta_sets(params: StuntedParams, rates=None, budget: int = 2000, cmp=None) -> BetaSets:
    """The sets driving β, evaluated just after the present time under `rates`.

    Hull images are iterated exactly until they repeat.  A collapsed orbit
    whose exact values become periodic is taken to avoid plateaus forever;
    between events only that finite prefix is tracked.
    """
    d = params.d
    rates = rates or (0,) * d
    cmp = cmp or _Crossings()
    M = _MovingMap(params, rates, cmp)
    periodic = _periodic_flats(M, budget)
    landing, interior, crossed = {}, set(), {}
    for i in range(d - 1):
        a, b = M.flats[i][0], M.flats[i + 1][1]
        met, periodic_met, best, seen = set(), False, None, set()
        meets = []
        for u in range(budget):
            if u >= 1 and not periodic_met:
                for k in range(d):
                    if k not in met and M.inside(k, a, b):
                        best = (u, k, M.inside(k, a, b, strict=True))
                        break
            for k in range(d):
                if M.meets(k, a, b):
                    met.add(k)
                    meets.append((u, k))
                    periodic_met |= periodic[k]
            state = (a.v, b.v)
            if periodic_met or state in seen:
                break
            seen.add(state)
            a, b = M.image(a, b)
        else:
            raise UnknownStructure(f"hull of plateaus {i}, {i + 1} undecided within budget")
        if best is None:
            continue
        n, k, strict = best
        landing[i] = (n, k)
        if strict:
            interior.add(i)
            crossed[i] = frozenset(m for u, m in meets if 0 < u < n and not periodic[m])
    return BetaSets(landing, frozenset(interior), crossed)


def beta_flow(params: StuntedParams, t, budget: int = 2000, max_steps: int = 10_000) -> FlowTrace:
    """Raise the plateaus of hulls landing inside another plateau, until none does.

    Moving coordinates rise at speed 2e.  The next event is the first time one
    of the comparisons behind the sets flips, or a coordinate reaches e.
    """
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise PreconditionError("t must lie in [0, 1]")
    d, e = params.d, params.e
    now, cur = Fraction(0), params
    knots, events = [(now, cur.zeta)], []
    prev_move, regimes = None, 0
    for _ in range(max_steps):
        move = beta_sets(cur, None, budget).moving(d)
        cmp = _Crossings()
        plus = beta_sets(cur, tuple(2 * e * m for m in move), budget, cmp)
        if plus.moving(d) != move:
            move = plus.moving(d)
            cmp = _Crossings()
            plus = beta_sets(cur, tuple(2 * e * m for m in move), budget, cmp)
            if plus.moving(d) != move:
                raise UnknownStructure("moving set is not stable just after the present time")
        move = _effective(cur, move)
        if prev_move is not None and move != prev_move:
            regimes += 1
            if regimes > 2 * d:
                raise RuntimeError("more regime changes than the structure allows")
            changed = tuple(j for j in range(d) if move[j] != prev_move[j])
            events.append(FlowEvent(now, "sign-change", changed))
        prev_move = move
        if now >= t:
            break
        if not any(move):
            events.append(FlowEvent(now, "flow-end", ()))
            break
        steps = [t - now]
        if cmp.first is not None:
            steps.append(cmp.first)
        steps += [(e - z) / (2 * e) for z, m in zip(cur.zeta, move) if m]
        step = min(steps)
        cur = cur.replace(tuple(z + 2 * e * m * step for z, m in zip(cur.zeta, move)))
        now += step
        for j, m in enumerate(move):
            if m and cur.zeta[j] == e:
                events.append(FlowEvent(now, "clip-at-e", (j,)))
        if knots[-1][0] != now:
            knots.append((now, cur.zeta))
    else:
        raise UnknownStructure(f"no fixed regime within {max_steps} steps")
    return FlowTrace(params, _merge_collinear(knots), tuple(events), t)


def _merge_collinear(knots):
    out = [knots[0]]
    for k in range(1, len(knots) - 1):
        (t0, z0), (t1, z1), (t2, z2) = out[-1], knots[k], knots[k + 1]
        same = all((b - a) * (t2 - t1) == (c - b) * (t1 - t0) for a, b, c in zip(z0, z1, z2))
        if not same:
            out.append(knots[k])
    if len(knots) > 1:
        out.append(knots[-1])
    return tuple(out)


def observed_entropy_monotone(trace: FlowTrace, samples: int = 10, n_max: int = 12,
                              direction: int = -1) -> bool:
    """Bracket-aware check that entropy moves in `direction` along the trace."""
    times = [trace.duration * Fraction(k, samples - 1) for k in range(samples)]
    ests = [entropy_bracket(build_stunted(trace.at(s)), n_max) for s in times]
    for a, b in zip(ests, ests[1:]):
        if direction < 0 and b.lower > a.upper + 1e-12:
            return False
        if direction > 0 and a.lower > b.upper + 1e-12:
            return False
    return True
