"""Choice of the branching variable (heuristic priorities 1-10).

All functions expect a reduced formula; :func:`select_branch_variable`
additionally expects every component to have at least 10 variables, which
the solver guarantees by solving smaller components exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .formula import Formula, VarGraph
from .measure import SIMPLE, WeightTable, expected_alternatives_scaled, gamma_scaled
from .reduction import ReductionTrace, reduce


class HeuristicError(RuntimeError):
    """No priority applies; the formula cannot be a reduced formula with scp."""


@dataclass(frozen=True)
class LimitedStructure:
    """A limited pair, sequence or cycle.

    ``members`` lists the vertices in chain order; a cycle does not repeat
    its first vertex at the end.
    """

    kind: str  # "pair" | "sequence" | "cycle"
    members: Tuple[int, ...]


@dataclass(frozen=True)
class PathStructure:
    kind: str  # "3path" | "4path"
    vertices: Tuple[int, ...]
    anchor: int

    @property
    def length(self) -> int:
        """l: number of path vertices inside N(anchor)."""
        return len(self.vertices) - 2 if self.kind == "3path" else len(self.vertices) - 1

    @property
    def is_lasso(self) -> bool:
        return self.kind == "3path" and self.vertices[0] == self.vertices[-1]


@dataclass
class BranchChoice:
    variable: int
    priority: int
    subcase: str
    regular: Optional[int] = None  # h when every vertex of N[v] has weight h
    lookahead: Dict[int, Tuple[Formula, ReductionTrace]] = field(default_factory=dict, repr=False)

    @property
    def regular_flag(self) -> bool:
        """h-regular branches with 4 <= h <= 6 are analysed together with their predecessor."""
        return self.regular is not None and 4 <= self.regular <= 6

    @property
    def tag(self) -> str:
        if self.regular is not None:
            return f"{self.subcase}/{self.regular}-regular"
        return self.subcase


class _Graph:
    """Weights and neighbourhoods of a formula's variable graph."""

    def __init__(self, formula: Formula):
        g = VarGraph.from_formula(formula)
        self.formula = formula
        self.g = g
        self.vars = sorted(g.vertices)
        self.w = {v: g.degree(v) for v in self.vars}
        self.N = {v: g.neighbors(v) for v in self.vars}
        self.nw = {v: sum(self.w[u] for u in self.N[v]) for v in self.vars}

    def closed(self, v):
        return self.N[v] | {v}

    def regular(self, v) -> Optional[int]:
        h = self.w[v]
        return h if all(self.w[u] == h for u in self.N[v]) else None

    def limited_partners(self, v) -> List[int]:
        if self.w[v] != 4:
            return []
        return sorted(u for u in self.N[v] if self.w[u] == 4 and self.g.multiplicity(v, u) == 2)


def preference_filter(candidates: Sequence[int], key: Callable[[int], bool]) -> List[int]:
    """Keep the candidates satisfying ``key`` if there are any, else all of them."""
    if not candidates:
        raise ValueError("preference_filter needs at least one candidate")
    kept = [c for c in candidates if key(c)]
    return kept if kept else list(candidates)


def find_limited(formula: Formula, _g: Optional[_Graph] = None) -> List[LimitedStructure]:
    """Maximal limited structures of a formula with maximum weight 4."""
    g = _g or _Graph(formula)
    partners = {v: g.limited_partners(v) for v in g.vars}
    seen = set()
    out = []
    for v in g.vars:
        if v in seen or not partners[v]:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in partners[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        ends = sorted(x for x in comp if len(partners[x]) == 1)
        if not ends:
            start = min(comp)
            order = _walk(start, partners)
            out.append(LimitedStructure("cycle", tuple(order)))
        else:
            order = tuple(_walk(ends[0], partners))
            out.append(LimitedStructure("pair" if len(order) == 2 else "sequence", order))
    return out


def _walk(start, partners):
    order, prev, cur = [start], None, start
    while True:
        nxt = [y for y in sorted(partners[cur]) if y != prev and y not in order]
        if not nxt:
            return order
        prev, cur = cur, nxt[0]
        order.append(cur)


def pending_triangle(formula: Formula, v: int, _g: Optional[_Graph] = None) -> Optional[Tuple[int, int, int]]:
    """A triangle (a, b, c) with a in N(v) and b, c outside N[v], if one exists."""
    g = _g or _Graph(formula)
    if g.w[v] != 3:
        raise ValueError(f"pending triangles are defined for weight-3 variables, #2({v}) = {g.w[v]}")
    closed = g.closed(v)
    for a in sorted(g.N[v]):
        for b in sorted(g.N[a] - closed):
            for c in sorted((g.N[a] & g.N[b]) - closed):
                if c > b:
                    return a, b, c
    return None


def find_paths(formula: Formula, v: int, _g: Optional[_Graph] = None) -> List[PathStructure]:
    """3-paths and 4-paths of a weight-4 vertex ``v``."""
    g = _g or _Graph(formula)
    n3 = {u for u in g.N[v] if g.w[u] == 3}
    closed = g.closed(v)
    out = []
    seen = set()
    for s in sorted(n3):
        if s in seen:
            continue
        comp, stack = set(), [s]
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend((g.N[x] & n3) - comp)
        seen |= comp
        inner_deg = {x: len(g.N[x] & comp) for x in comp}
        if len(comp) > 1 and all(d == 2 for d in inner_deg.values()):
            continue  # a cycle inside N(v) has no ends
        start = min(x for x in comp if inner_deg[x] <= 1)
        order = [start]
        while len(order) < len(comp):
            nxt = sorted((g.N[order[-1]] & comp) - set(order))
            if not nxt:
                break
            order.append(nxt[0])
        if len(order) != len(comp):
            continue
        if len(order) == 1:
            ends = sorted(g.N[order[0]] - {v})
            if len(ends) != 2:
                continue
            e0, e1 = ends
        else:
            e0s = sorted(g.N[order[0]] - comp - {v})
            e1s = sorted(g.N[order[-1]] - comp - {v})
            if len(e0s) != 1 or len(e1s) != 1:
                continue
            e0, e1 = e0s[0], e1s[0]
        out0, out1 = e0 not in closed, e1 not in closed
        four0 = e0 in g.N[v] and g.w[e0] == 4
        four1 = e1 in g.N[v] and g.w[e1] == 4
        if out0 and out1:
            out.append(PathStructure("3path", (e0, *order, e1), v))
        elif out0 and four1 and len(order) + 1 >= 2:
            out.append(PathStructure("4path", (e0, *order, e1), v))
        elif out1 and four0 and len(order) + 1 >= 2:
            out.append(PathStructure("4path", (e1, *reversed(order), e0), v))
    return out


def _branch_formulas(formula: Formula, v: int) -> Dict[int, Tuple[Formula, ReductionTrace]]:
    return {lit: reduce(formula.assign(lit)) for lit in (v, -v)}


def cubic_lookahead(
    formula: Formula, v: int, weights: WeightTable = SIMPLE, _cache: Optional[dict] = None
) -> Tuple[float, float]:
    """gamma reductions of reduce(F[v]) and reduce(F[-v]) relative to F."""
    branches = _branch_formulas(formula, v)
    if _cache is not None:
        _cache[v] = branches
    g0 = gamma_scaled(formula, weights)
    return tuple((g0 - gamma_scaled(branches[lit][0], weights)) / 100_000 for lit in (v, -v))


def _dominates(measured: Tuple[int, int], target: Tuple[int, ...]) -> bool:
    m = sorted(measured, reverse=True)
    return all(a >= b for a, b in zip(m, target))


def select_branch_variable(formula: Formula, weights: WeightTable = SIMPLE) -> BranchChoice:
    g = _Graph(formula)
    if not g.vars:
        raise HeuristicError("empty formula has nothing to branch on")
    choice = _select(g, formula, weights)
    choice.regular = g.regular(choice.variable)
    return choice


def _select(g: _Graph, formula: Formula, weights: WeightTable) -> BranchChoice:
    w, nw = g.w, g.nw
    maxw = max(w.values())

    if maxw >= 7:
        return BranchChoice(next(v for v in g.vars if w[v] >= 7), 1, "P1")
    if maxw == 6:
        cands = preference_filter([v for v in g.vars if w[v] == 6], lambda v: nw[v] < 36)
        return BranchChoice(cands[0], 2, "P2")
    if maxw == 5:
        cands = preference_filter([v for v in g.vars if w[v] == 5], lambda v: nw[v] < 25)
        return BranchChoice(cands[0], 3, "P3")

    if maxw == 4:
        structures = find_limited(formula, g)
        limited = {u for s in structures for u in s.members}
        for v in g.vars:
            if w[v] == 4 and v not in limited and g.N[v] & limited:
                return BranchChoice(v, 4, "P4")

        long = [s for s in structures if s.kind != "pair"]
        if long:
            return _priority5(g, long)

        pairs = [s for s in structures if s.kind == "pair"]
        if pairs:
            return _priority6(g, pairs)

        Y = [
            v
            for v in g.vars
            if w[v] == 4 and any(w[z] == 3 and not g.N[z] <= g.closed(v) for z in g.N[v])
        ]
        if Y:
            best = max(nw[v] for v in Y)
            v = preference_filter(Y, lambda v: nw[v] == best)[0]
            return BranchChoice(v, 7, _priority7_tag(formula, g, v))

        cands = preference_filter([v for v in g.vars if w[v] == 4], lambda v: nw[v] < 16)
        v = cands[0]
        if g.regular(v) == 4:
            tag = "P8-4-regular"
        else:
            k = sum(1 for u in g.N[v] if w[u] == 3)
            tag = f"P8-k{k}"
        return BranchChoice(v, 8, tag)

    if maxw == 3:
        for v in g.vars:
            if pending_triangle(formula, v, g) is not None:
                return BranchChoice(v, 9, "P9")
        return _priority10(g, formula, weights)

    raise HeuristicError(f"no heuristic priority applies (max weight {maxw}): {formula!r}")


def _priority5(g: _Graph, long: List[LimitedStructure]) -> BranchChoice:
    options = []
    for s in long:
        if s.kind == "cycle":
            options.append((0, min(s.members), "P5-cycle"))
            continue
        for end in sorted({s.members[0], s.members[-1]}):
            inside = set(s.members)
            outside_ok = all(g.w[u] == 3 for u in g.N[end] - inside)
            options.append((0 if outside_ok else 1, end, "P5-sequence"))
    options.sort()
    _, v, tag = options[0]
    return BranchChoice(v, 5, tag)


def _priority6(g: _Graph, pairs: List[LimitedStructure]) -> BranchChoice:
    u1 = min(u for s in pairs for u in s.members)
    u2 = next(u for u in g.limited_partners(u1))
    rest = sorted(g.N[u1] - {u2})
    N1 = g.N[u1]

    def s(c):
        return len((g.N[c] & N1) - {c, u1})

    subcase = "P6-other"
    if len(rest) == 2:
        y, z = rest
        closed1 = g.closed(u1)
        ky, kz = len(g.N[y] - closed1), len(g.N[z] - closed1)
        key = tuple(sorted((ky, kz)))
        if key == (0, 0):
            subcase = "P6-case1"
        elif key == (0, 1):
            subcase = "P6-case2"
        elif key == (1, 1):
            subcase = "P6-case3b" if z in g.N[y] else "P6-case3a"
        elif key == (1, 2):
            subcase = "P6-case4"
        elif key == (2, 2):
            subcase = "P6-case5"
        c = max(rest, key=lambda c: (s(c), -c))
        if s(c) > 0:
            return BranchChoice(next(x for x in rest if x != c), 6, subcase)
    return BranchChoice(u1, 6, subcase)


def _priority7_tag(formula: Formula, g: _Graph, v: int) -> str:
    paths = find_paths(formula, v, g)
    if not paths:
        return "P7-nopath"

    def rank(p):
        return (0 if p.kind == "3path" and not p.is_lasso else 1 if p.is_lasso else 2, p.length)

    p = min(paths, key=rank)
    kind = "lasso" if p.is_lasso else p.kind
    return f"P7-{kind}-l{p.length}"


def _priority10(g: _Graph, formula: Formula, weights: WeightTable) -> BranchChoice:
    targets = expected_alternatives_scaled(10, weights)
    g0 = gamma_scaled(formula, weights)
    fallback = None
    for v in g.vars:
        branches = _branch_formulas(formula, v)
        red = tuple(g0 - gamma_scaled(branches[lit][0], weights) for lit in (v, -v))
        for tag, target in zip(("P10-6w3-8w3", "P10-4w3-10w3"), targets):
            if _dominates(red, target):
                return BranchChoice(v, 10, tag, lookahead=branches)
        score = (min(red), max(red), -v)
        if fallback is None or score > fallback[0]:
            fallback = (score, v, branches)
    _, v, branches = fallback
    return BranchChoice(v, 10, "P10-fallback", lookahead=branches)
