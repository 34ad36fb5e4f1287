"""From polynomials to stunted sawtooth maps, and the structure of W(T).

W(T) is the set of points eventually mapped into the interior of a plateau.
Its components around the plateaus, the critical relations between them and
the collapse of plateau pairs are all decided with exact orbits.  Orbits of
rational points under T have bounded denominators, so they are eventually
periodic and every question here is decidable given enough budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConstraintViolation, UnknownStructure
from .maps import PolynomialMap, StuntedParams, build_stunted, make_geometry
from .numbers import as_fraction
from .symbolic import kneading, realize_in_sawtooth

DEFAULT_BUDGET = 10_000


# --------------------------------------------------------------------- ST map

@dataclass(frozen=True)
class StReport:
    params: StuntedParams
    errors: tuple
    kneading: object


def st_report(f: PolynomialMap, depth: int = 30) -> StReport:
    """ST(f) together with the per-coordinate truncation error."""
    g = make_geometry(f.d, f.shape)
    nu = kneading(f, depth)
    zeta, errors = [], []
    for i, seq in enumerate(nu.nu):
        r = realize_in_sawtooth(g, seq)
        w = r.point - g.turning_points[i]
        zeta.append(g.lam * (1 - w))
        errors.append(g.lam * r.error)
    zeta = [min(max(z, -g.e), g.e) for z in zeta]
    # truncation can leave a pair of nearly touching plateaus overlapping
    for i in range(g.d - 1):
        deficit = -(zeta[i] + zeta[i + 1])
        if deficit > 0:
            if deficit > errors[i] + errors[i + 1]:
                raise ConstraintViolation(f"realized plateaus {i} and {i + 1} overlap", i)
            zeta[i] += deficit / 2
            zeta[i + 1] += deficit / 2
    return StReport(StuntedParams(g, tuple(zeta)), tuple(errors), nu)


def st_map(f: PolynomialMap, depth: int = 30) -> StuntedParams:
    """The stunted sawtooth map with the same kneading invariant as f."""
    return st_report(f, depth).params


def st_bracket_params(f: PolynomialMap, depth: int = 30):
    """Admissible parameters below and above ST(f) within its truncation error."""
    rep = st_report(f, depth)
    p, err = rep.params, rep.errors
    if not any(err):
        return p, p
    e = p.e
    hi = tuple(min(z + r, e) for z, r in zip(p.zeta, err))
    slack = [p.zeta[i] + p.zeta[i + 1] for i in range(p.d - 1)]
    lo = []
    for i, (z, r) in enumerate(zip(p.zeta, err)):
        drop = r
        if i > 0:
            drop = min(drop, slack[i - 1] / 2)
        if i < p.d - 1:
            drop = min(drop, slack[i] / 2)
        lo.append(max(z - drop, -e))
    return p.replace(lo), p.replace(hi)


# ---------------------------------------------------------------- preplateau

class _Dynamics:
    """Exact orbit questions for a stunted map, with shared caches."""

    def __init__(self, params: StuntedParams, budget: int):
        self.params = params
        self.T = build_stunted(params)
        self.budget = budget
        self.used = 0
        self.undecided = False
        self.flats = [(a, b) for a, b, s in self.T.segments() if s == 0]
        self._member = {}

    def in_flat_interior(self, x) -> bool:
        return any(a < x < b for a, b in self.flats)

    def flat_containing(self, x):
        return next(((a, b) for a, b in self.flats if a <= x <= b), None)

    def orbit_tail(self, x, limit=None):
        """(orbit list, index where the cycle starts) or None if over budget."""
        limit = self.budget if limit is None else limit
        seen, orbit = {}, []
        while x not in seen:
            if len(orbit) > limit:
                return None
            seen[x] = len(orbit)
            orbit.append(x)
            x = self.T(x)
        self.used = max(self.used, len(orbit))
        return orbit, seen[x]

    def member(self, x):
        """Whether x lies in W(T); None if undecided within budget."""
        if x in self._member:
            return self._member[x]
        orbit = []
        y, verdict = x, None
        for _ in range(self.budget + 1):
            if y in self._member:
                verdict = self._member[y]
                break
            if self.in_flat_interior(y):
                verdict = True
                break
            if y in orbit:
                verdict = False
                break
            orbit.append(y)
            y = self.T(y)
        self.used = max(self.used, len(orbit))
        if verdict is None:
            self.undecided = True
            return None
        for z in orbit:
            self._member[z] = verdict
        return verdict


class _Extent:
    """E(x, dir): length of the maximal W-interval starting at x towards dir.

    Moving from x across an affine piece of slope s, the interval (x, x + t)
    lies in W while its image, an interval of length |s| t starting at T(x),
    does; so E(x) = E(T x)/|s| when that is shorter than the piece, and
    otherwise the piece plus whatever extends past its far end q.  E is the
    least fixed point of this monotone recursion.  Exact Kleene iterates
    suggest which branch each state takes; the resulting linear system is
    solved exactly, and it is the least fixed point as soon as its branch
    pattern agrees with the iterate below it.
    """

    def __init__(self, dyn: _Dynamics):
        self.dyn = dyn
        self.T = dyn.T
        self.rules = {}

    def _rule(self, state):
        x, d = state
        T = self.T
        lo, hi = T.domain
        if (d > 0 and x == hi) or (d < 0 and x == lo):
            return ("const", Fraction(0))
        q = T.next_breakpoint(x, d)
        dist = abs(q - x)
        slope = T.slope_near(x, d)
        far = (q, d) if self.dyn.member(q) else None
        if slope == 0:
            return ("flat", dist, far)
        s = 1 if slope > 0 else -1
        return ("affine", (T(x), d * s), abs(slope), dist, far)

    def _collect(self, roots):
        todo = list(roots)
        while todo:
            st = todo.pop()
            if st in self.rules:
                continue
            if len(self.rules) > self.dyn.budget:
                self.dyn.undecided = True
                raise _Budget()
            r = self.rules[st] = self._rule(st)
            deps = []
            if r[0] == "flat":
                deps = [r[2]]
            elif r[0] == "affine":
                deps = [r[1], r[4]]
            todo.extend(s for s in deps if s is not None and s not in self.rules)

    def _apply(self, E):
        out = {}
        for st, r in self.rules.items():
            out[st] = self._eval(r, E)[0]
        return out

    @staticmethod
    def _eval(r, E):
        if r[0] == "const":
            return r[1], None
        if r[0] == "flat":
            _, dist, far = r
            return dist + (E[far] if far else 0), "long"
        _, img, slope, dist, far = r
        short = E[img] / slope
        if short < dist:
            return short, "short"
        if short == dist and far is None:
            # both branches give the same value here
            return dist, "tie"
        return dist + (E[far] if far else 0), "long"

    def _solve_policy(self, policy):
        # every state depends on at most one other: follow chains to cycles
        coef = {}
        for st, r in self.rules.items():
            if r[0] == "const":
                coef[st] = (Fraction(0), r[1], None)
            elif r[0] == "flat" or policy[st] in ("long", "tie"):
                dist, far = (r[1], r[2]) if r[0] == "flat" else (r[3], r[4])
                coef[st] = (Fraction(1) if far else Fraction(0), dist, far)
            else:
                coef[st] = (1 / Fraction(r[2]), Fraction(0), r[1])
        value = {}
        for start in coef:
            path = []
            st = start
            while st is not None and st not in value and st not in path:
                path.append(st)
                st = coef[st][2]
            if st is None or st in value:
                acc = value[st] if st is not None else Fraction(0)
                for s in reversed(path):
                    a, b, _ = coef[s]
                    acc = a * acc + b
                    value[s] = acc
                continue
            # st closes a cycle inside path: solve the cycle's fixed point
            k = path.index(st)
            a_tot, b_tot = Fraction(1), Fraction(0)
            for s in reversed(path[k:]):
                a, b, _ = coef[s]
                a_tot, b_tot = a * a_tot, a * b_tot + b
            if a_tot == 1:
                raise AssertionError("cycle without contraction in extent recursion")
            acc = b_tot / (1 - a_tot)
            value[st] = acc
            for s in reversed(path[k + 1:]):
                a, b, _ = coef[s]
                acc = a * acc + b
                value[s] = acc
            acc = value[st]
            for s in reversed(path[:k]):
                a, b, _ = coef[s]
                acc = a * acc + b
                value[s] = acc
        return value

    def solve(self, roots):
        self._collect(roots)
        E = {st: Fraction(0) for st in self.rules}
        for _ in range(self.dyn.budget):
            policy = {st: self._eval(r, E)[1] for st, r in self.rules.items()}
            cand = self._solve_policy(policy)
            cand_policy = {st: self._eval(r, cand)[1] for st, r in self.rules.items()}
            agree = all(b == policy[st] or "tie" in (b, policy[st])
                        for st, b in cand_policy.items())
            if agree and all(cand[s] >= E[s] for s in E) and self._apply(cand) == cand:
                return cand
            E = self._apply(E)
        self.dyn.undecided = True
        raise _Budget()


class _Budget(Exception):
    pass


@dataclass(frozen=True)
class Preplateau:
    """Components of W(T) around the plateaus, as open intervals (a, b)."""

    components: tuple
    membership: tuple
    budget_used: int
    complete: bool = True
    blocks: tuple = field(default=(), compare=False)

    def component_of(self, i: int):
        return self.components[self.membership[i]]


def _blocks(dyn: _Dynamics):
    g = dyn.params.geometry
    out = []
    for c in g.turning_points:
        out.append(dyn.flat_containing(c))
    return out


def _analyze(params: StuntedParams, budget: int):
    dyn = _Dynamics(params, budget)
    ext = _Extent(dyn)
    blocks = _blocks(dyn)
    roots = []
    for lo, hi in set(blocks):
        if dyn.member(lo):
            roots.append((lo, -1))
        if dyn.member(hi):
            roots.append((hi, 1))
    try:
        E = ext.solve(roots) if roots else {}
    except _Budget:
        E = None
    return dyn, ext, blocks, E


def preplateau(params: StuntedParams, budget: int = DEFAULT_BUDGET) -> Preplateau:
    dyn, _, blocks, E = _analyze(params, budget)
    comps, membership = [], []
    for lo, hi in blocks:
        a, b = lo, hi
        if E is not None:
            if (lo, -1) in E and dyn.member(lo):
                a = lo - E[(lo, -1)]
            if (hi, 1) in E and dyn.member(hi):
                b = hi + E[(hi, 1)]
        comp = (a, b)
        # blocks joined through W share a component
        match = next((k for k, (u, v) in enumerate(comps) if u < b and a < v), None)
        if match is None:
            comps.append(comp)
            match = len(comps) - 1
        else:
            u, v = comps[match]
            comps[match] = (min(u, a), max(v, b))
        membership.append(match)
    return Preplateau(tuple(comps), tuple(membership), dyn.used,
                      complete=not dyn.undecided and E is not None, blocks=tuple(blocks))


def w_component(params: StuntedParams, y, budget: int = DEFAULT_BUDGET):
    """The component of W(T) containing y, or None when y is not in W."""
    y = as_fraction(y)
    dyn = _Dynamics(params, budget)
    m = dyn.member(y)
    if m is None:
        raise UnknownStructure(f"membership of {y} in W undecided within budget")
    if not m:
        return None
    if dyn.in_flat_interior(y):
        a, b = dyn.flat_containing(y)
        lo_state, hi_state = (a, -1), (b, 1)
        base = (a, b)
    else:
        lo_state, hi_state = (y, -1), (y, 1)
        base = (y, y)
    ext = _Extent(dyn)
    try:
        E = ext.solve([lo_state, hi_state])
    except _Budget as exc:
        raise UnknownStructure("component extent undecided within budget") from exc
    a = base[0] - (E[lo_state] if base[0] == y or dyn.member(base[0]) else 0)
    b = base[1] + (E[hi_state] if base[1] == y or dyn.member(base[1]) else 0)
    return a, b


# ------------------------------------------------------------ critical graph

@dataclass(frozen=True)
class CriticalArrow:
    source: int
    target: int
    kind: str
    steps: int


@dataclass(frozen=True)
class CriticalGraph:
    """Nodes are the components of W(T) containing plateaus (indices into
    ``preplateau.components``); each node has at most one outgoing arrow."""

    preplateau: Preplateau
    arrows: tuple
    undecided: tuple = ()

    @property
    def nodes(self):
        return tuple(range(len(self.preplateau.components)))

    def outgoing(self, node: int):
        return next((a for a in self.arrows if a.source == node), None)

    def to_dot(self) -> str:
        lines = ["digraph critical {"]
        for k, (a, b) in enumerate(self.preplateau.components):
            members = [i for i, m in enumerate(self.preplateau.membership) if m == k]
            label = ",".join(f"c{i + 1}" for i in members)
            lines.append(f'  W{k} [label="W{k} ({label}) ({a}, {b})"];')
        for ar in self.arrows:
            style = "solid" if ar.kind == "interior" else "dashed"
            lines.append(f'  W{ar.source} -> W{ar.target} [label="{ar.kind} n={ar.steps}", style={style}];')
        for k in self.undecided:
            lines.append(f'  W{k} -> unknown{k} [style=dotted];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _locate(comps, y):
    inside = [k for k, (a, b) in enumerate(comps) if a < y < b]
    on_edge = [(k, +1 if y == a else -1) for k, (a, b) in enumerate(comps) if y in (a, b)]
    return inside, on_edge


def critical_graph(params: StuntedParams, budget: int = DEFAULT_BUDGET) -> CriticalGraph:
    pre = preplateau(params, budget)
    dyn = _Dynamics(params, budget)
    T = dyn.T
    comps = pre.components
    arrows, undecided = [], []
    for k, (a, b) in enumerate(comps):
        blocks = [pre.blocks[i] for i, m in enumerate(pre.membership) if m == k]
        lo, hi = blocks[0]
        v = T(lo)
        collapsed = (a, b) == (lo, hi) and all(bl == blocks[0] for bl in blocks)
        # germs: the sides of T^n(W_k) from which images of nearby points approach
        germs = []
        if collapsed:
            dlo, dhi = T.domain
            if lo > dlo:
                germs.append(T.propagate_side(lo, -1))
            if hi < dhi:
                germs.append(T.propagate_side(hi, 1))
        y, arrow = v, None
        seen = set()
        for n in range(1, budget + 1):
            inside, on_edge = _locate(comps, y)
            if inside and not collapsed:
                arrow = CriticalArrow(k, inside[0], "interior", n)
                break
            if collapsed and on_edge:
                entering = [j for j, into in on_edge if any(s == into for s in germs)]
                clean = [j for j, _ in on_edge if j not in entering]
                if clean:
                    arrow = CriticalArrow(k, clean[0], "boundary", n)
                    break
                if entering:
                    arrow = "blocked"
                    break
            state = (y, tuple(germs))
            if state in seen:
                arrow = "none"
                break
            seen.add(state)
            germs = [T.propagate_side(y, s) for s in germs]
            y = T(y)
        if isinstance(arrow, CriticalArrow):
            arrows.append(arrow)
        elif arrow is None:
            undecided.append(k)
    return CriticalGraph(pre, tuple(arrows), tuple(undecided))


# ----------------------------------------------------------- wandering pairs

VERDICTS = ("degenerate-to-periodic-plateau", "nondegenerate", "unknown")


@dataclass(frozen=True)
class WanderingPairReport:
    pairs: tuple

    def verdicts(self):
        return {(i, j): v for i, j, _, v in self.pairs}


def _collapse_time(T, u, v, budget):
    seen = set()
    for n in range(1, budget + 1):
        u, v = T.image(u, v)
        if u == v:
            return n, u
        if (u, v) in seen:
            return None, "cycle"
        seen.add((u, v))
    return None, "budget"


def wandering_pairs(params: StuntedParams, budget: int = DEFAULT_BUDGET) -> WanderingPairReport:
    """Plateau pairs whose hull collapses to a point, with the fate of that point.

    Pairs whose hull images cycle without collapsing are not wandering and are
    omitted; pairs still undecided at the budget are listed as unknown.
    """
    dyn = _Dynamics(params, budget)
    T = dyn.T
    out = []
    for i in range(params.d):
        for j in range(i + 1, params.d):
            u, v = params.plateau(i)[0], params.plateau(j)[1]
            n, y = _collapse_time(T, u, v, budget)
            if n is None:
                if y == "budget":
                    out.append((i, j, None, "unknown"))
                continue
            tail = dyn.orbit_tail(y, max(budget - n, 0))
            if tail is None:
                out.append((i, j, n, "unknown"))
                continue
            orbit, start = tail
            cycle = orbit[start:]
            if any(dyn.flat_containing(x) is not None for x in cycle):
                out.append((i, j, n, "degenerate-to-periodic-plateau"))
            else:
                out.append((i, j, n, "nondegenerate"))
    return WanderingPairReport(tuple(out))


def is_nondegenerate(params: StuntedParams, budget: int = DEFAULT_BUDGET) -> str:
    """'yes', 'no' or 'unknown'."""
    verdicts = [p[3] for p in wandering_pairs(params, budget).pairs]
    if "nondegenerate" in verdicts:
        return "no"
    if "unknown" in verdicts:
        return "unknown"
    return "yes"


# ------------------------------------------------------- class representative

def class_representative(params: StuntedParams, budget: int = DEFAULT_BUDGET) -> StuntedParams:
    """Natural representative of the class of maps sharing W(T).

    A plateau whose value lies in a component of W(T) is re-aimed at that
    component's midpoint.  A plateau with a boundary critical relation has its
    value on the edge of a component of W(T): the one on the side that the
    relation's target is entered from.  It is re-aimed at that component's
    midpoint, which is where nearby maps of the same class send it.
    """
    graph = critical_graph(params, budget)
    if graph.undecided or not graph.preplateau.complete:
        raise UnknownStructure("critical graph has undecided arrows")
    T = build_stunted(params)
    g = params.geometry
    zeta = list(params.zeta)
    for i, c in enumerate(g.turning_points):
        v = T(c)
        comp = w_component(params, v, budget)
        if comp is None:
            arrow = graph.outgoing(graph.preplateau.membership[i])
            if arrow is None or arrow.kind != "boundary":
                continue
            comp = _entry_component(params, T, v, arrow, graph.preplateau, budget)
            if comp is None:
                continue
        mid = (comp[0] + comp[1]) / 2
        zeta[i] = mid if g.is_max(i) else -mid
    return params.replace(zeta)


def _entry_component(params, T, v, arrow, pre, budget):
    a, b = pre.components[arrow.target]
    lo, hi = T.domain
    for side in (-1, 1):
        if (side < 0 and v == lo) or (side > 0 and v == hi):
            continue
        y, s = v, side
        for _ in range(arrow.steps - 1):
            y, s = T(y), T.propagate_side(y, s)
        if (y == a and s > 0) or (y == b and s < 0):
            dyn = _Dynamics(params, budget)
            try:
                E = _Extent(dyn).solve([(v, side)])
            except _Budget as exc:
                raise UnknownStructure("component extent undecided within budget") from exc
            end = v + side * E[(v, side)]
            return (min(v, end), max(v, end))
    return None
