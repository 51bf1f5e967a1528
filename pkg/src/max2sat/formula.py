"""Multiset 2-CNF formulas and their variable multigraph.

Literals are signed DIMACS integers: ``v`` is the positive literal of
variable ``v`` and ``-v`` its negation.  A clause is a sorted tuple of one
or two literals.  Always-true clauses are not stored; a :class:`Formula`
only keeps a counter of how many of them it has absorbed.
"""

from __future__ import annotations

from collections import Counter
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

Clause = Tuple[int, ...]
Assignment = Dict[int, bool]


def var(lit: int) -> int:
    return lit if lit > 0 else -lit


def neg(lit: int) -> int:
    return -lit


def literal(v: int, value: bool) -> int:
    """The literal of ``v`` that is true when ``v`` takes ``value``."""
    if v < 1:
        raise ValueError(f"variable ids start at 1, got {v}")
    return v if value else -v


def lit_true(lit: int, assignment: Mapping[int, bool]) -> bool:
    return assignment[var(lit)] == (lit > 0)


def make_clause(lits: Iterable[int]) -> Optional[Clause]:
    """Normalize literals into a clause.

    ``{x, x}`` collapses to the 1-clause ``{x}``; ``{x, -x}`` is kept so that
    RR-1 can see it.  Returns None for an empty literal list.
    """
    out = sorted(set(lits), key=lambda l: (var(l), l))
    if not out:
        return None
    if len(out) > 2:
        raise ValueError(f"clauses have at most 2 literals, got {out}")
    for l in out:
        if l == 0:
            raise ValueError("literal 0 is not allowed")
    return tuple(out)


def is_tautology(clause: Clause) -> bool:
    return len(clause) == 2 and clause[0] == -clause[1]


class Formula:
    """An immutable multiset of 1-/2-clauses plus a truth-clause counter.

    ``original_size`` is the clause count at construction (K); formulas
    derived by assignment or reduction carry it along unchanged.
    """

    __slots__ = ("_counts", "truth_count", "original_size", "_vars", "_hash")

    def __init__(
        self,
        clauses: Iterable[Iterable[int]] = (),
        truth_count: int = 0,
        original_size: Optional[int] = None,
    ):
        counts: Counter = Counter()
        for c in clauses:
            cl = make_clause(c)
            if cl is None:
                raise ValueError("empty clause")
            counts[cl] += 1
        if truth_count < 0:
            raise ValueError("truth_count must be non-negative")
        self._init(counts, truth_count, original_size)

    def _init(self, counts, truth_count, original_size):
        self._counts = {c: m for c, m in counts.items() if m > 0}
        self.truth_count = truth_count
        size = sum(self._counts.values()) + truth_count
        self.original_size = size if original_size is None else original_size
        self._vars = None
        self._hash = None

    @classmethod
    def from_counts(
        cls, counts: Mapping[Clause, int], truth_count: int = 0, original_size: Optional[int] = None
    ) -> "Formula":
        """Build from an already-normalized ``clause -> multiplicity`` map."""
        f = cls.__new__(cls)
        f._init(counts, truth_count, original_size)
        return f

    # -- views ---------------------------------------------------------------

    @property
    def counts(self) -> Mapping[Clause, int]:
        return self._counts

    @property
    def clauses(self) -> List[Clause]:
        """All ordinary clauses with multiplicity, in canonical order."""
        out = []
        for c in sorted(self._counts, key=_clause_key):
            out.extend([c] * self._counts[c])
        return out

    @property
    def num_clauses(self) -> int:
        return sum(self._counts.values())

    @property
    def vars(self) -> frozenset:
        if self._vars is None:
            self._vars = frozenset(var(l) for c in self._counts for l in c)
        return self._vars

    @property
    def num_vars(self) -> int:
        return len(self.vars)

    def is_trivial(self) -> bool:
        """True when only truth-clauses remain."""
        return not self._counts

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        return self.truth_count == other.truth_count and self._counts == other._counts

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.truth_count, frozenset(self._counts.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.clauses)
        return f"Formula([{body}], truth={self.truth_count})"

    # -- operations ----------------------------------------------------------

    def weight(self, v: int) -> int:
        """#2(v): number of 2-clauses (with multiplicity) containing v or -v."""
        if v not in self.vars:
            raise KeyError(f"variable {v} does not occur in the formula")
        return sum(m for c, m in self._counts.items() if len(c) == 2 and (var(c[0]) == v or var(c[1]) == v))

    def weights(self) -> Dict[int, int]:
        w = dict.fromkeys(self.vars, 0)
        for c, m in self._counts.items():
            if len(c) == 2:
                a, b = var(c[0]), var(c[1])
                w[a] += m
                if b != a:
                    w[b] += m
        return w

    def assign(self, lit: int) -> "Formula":
        """F[l]: set literal ``lit`` true."""
        if var(lit) not in self.vars:
            raise KeyError(f"variable {var(lit)} does not occur in the formula")
        counts: Dict[Clause, int] = {}
        gained = 0
        nl = -lit
        for c, m in self._counts.items():
            if lit in c:
                gained += m
            elif nl in c:
                if len(c) == 2:
                    rest = (c[1] if c[0] == nl else c[0],)
                    counts[rest] = counts.get(rest, 0) + m
            else:
                counts[c] = counts.get(c, 0) + m
        return Formula.from_counts(counts, self.truth_count + gained, self.original_size)

    def variable_graph(self) -> "VarGraph":
        return VarGraph.from_formula(self)

    def components(self) -> List["Formula"]:
        """Split by connected component of the variable graph.

        Variables occurring only in 1-clauses form singleton components.
        A nonzero truth count goes to a leading clause-free root formula, so
        the component optima always sum to the optimum of ``self``.
        """
        parent = {v: v for v in self.vars}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c in self._counts:
            if len(c) == 2:
                a, b = find(var(c[0])), find(var(c[1]))
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: Dict[int, Dict[Clause, int]] = {}
        for c, m in self._counts.items():
            groups.setdefault(find(var(c[0])), {})[c] = m
        out = []
        if self.truth_count:
            out.append(Formula.from_counts({}, self.truth_count))
        for root in sorted(groups, key=lambda r: min(var(l) for c in groups[r] for l in c)):
            out.append(Formula.from_counts(groups[root]))
        return out

    def substitute(self, v: int, lit: int) -> "Formula":
        """Replace every occurrence of ``v`` by ``lit`` (and ``-v`` by ``-lit``)."""
        counts: Dict[Clause, int] = {}
        for c, m in self._counts.items():
            nc = make_clause(_sub(l, v, lit) for l in c)
            counts[nc] = counts.get(nc, 0) + m
        return Formula.from_counts(counts, self.truth_count, self.original_size)

    def satisfied_count(self, assignment: Mapping[int, bool]) -> int:
        return satisfied_count(self, assignment)


def _sub(l: int, v: int, lit: int) -> int:
    if l == v:
        return lit
    if l == -v:
        return -lit
    return l


def _clause_key(c: Clause):
    return tuple((var(l), l) for l in c)


def satisfied_count(formula: Formula, assignment: Mapping[int, bool]) -> int:
    """truth_count plus the number of ordinary clauses with a true literal."""
    missing = [v for v in formula.vars if v not in assignment]
    if missing:
        raise ValueError(f"assignment is missing variables {sorted(missing)[:10]}")
    total = formula.truth_count
    for c, m in formula.counts.items():
        if any(lit_true(l, assignment) for l in c):
            total += m
    return total


class VarGraph:
    """Undirected multigraph with one edge per 2-clause.

    A tautological clause ``{x, -x}`` is a self-loop that adds 1 to the
    degree of ``x``, so degree always equals the clause weight #2.
    """

    __slots__ = ("vertices", "adj")

    def __init__(self, vertices: Iterable[int], adj: Mapping[int, Mapping[int, int]]):
        self.vertices = frozenset(vertices)
        self.adj = {v: dict(adj.get(v, {})) for v in self.vertices}

    @classmethod
    def from_formula(cls, formula: Formula) -> "VarGraph":
        adj: Dict[int, Dict[int, int]] = {v: {} for v in formula.vars}
        for c, m in formula.counts.items():
            if len(c) != 2:
                continue
            a, b = var(c[0]), var(c[1])
            adj[a][b] = adj[a].get(b, 0) + m
            if a != b:
                adj[b][a] = adj[b].get(a, 0) + m
        g = cls.__new__(cls)
        g.vertices = formula.vars
        g.adj = adj
        return g

    def degree(self, v: int) -> int:
        return sum(self.adj[v].values())

    def neighbors(self, v: int) -> frozenset:
        """N(v), excluding v itself even when a self-loop is present."""
        return frozenset(u for u in self.adj[v] if u != v)

    def multiplicity(self, u: int, v: int) -> int:
        return self.adj[u].get(v, 0)

    def edges(self) -> List[Tuple[int, int]]:
        out = []
        for u in sorted(self.adj):
            for v, m in sorted(self.adj[u].items()):
                if u <= v:
                    out.extend([(u, v)] * m)
        return out

    def has_self_loops(self) -> bool:
        return any(v in self.adj[v] for v in self.adj)
