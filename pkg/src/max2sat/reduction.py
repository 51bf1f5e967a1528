"""Reduction rules RR-1 to RR-5 and the reduced-formula fixpoint.

Every rule function takes a :class:`Formula` and returns
``(formula, trace, changed)``.  The trace records what happened so that an
optimal assignment of the result can be lifted back to the input
(:meth:`ReductionTrace.extend_assignment`) and so that the result can be
recomputed from the input (:meth:`ReductionTrace.replay`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .formula import Assignment, Clause, Formula, is_tautology, make_clause, var


class Rule(str, enum.Enum):
    RR1 = "RR1"
    RR2 = "RR2"
    RR3 = "RR3"
    RR4 = "RR4"
    RR5 = "RR5"


@dataclass(frozen=True)
class SetLiteral:
    literal: int
    rule: Rule


@dataclass(frozen=True)
class Substitute:
    """Every occurrence of ``var`` was replaced by ``literal`` (a literal of another variable)."""

    var: int
    literal: int
    rule: Rule


@dataclass(frozen=True)
class ClauseRewrite:
    before: Tuple[Clause, ...]
    after: Tuple[Clause, ...]
    rule: Rule


@dataclass(frozen=True)
class TruthGain:
    count: int
    rule: Rule


Action = Union[SetLiteral, Substitute, ClauseRewrite, TruthGain]


class ReductionError(RuntimeError):
    pass


@dataclass
class ReductionTrace:
    actions: List[Action] = field(default_factory=list)

    def __len__(self):
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def extend(self, other: "ReductionTrace") -> None:
        self.actions.extend(other.actions)

    def replay(self, formula: Formula) -> Formula:
        """Apply the logged actions to ``formula`` in order."""
        st = _State.of(formula)
        for a in self.actions:
            if isinstance(a, SetLiteral):
                st.assign(a.literal)
            elif isinstance(a, Substitute):
                st.substitute(a.var, a.literal)
            elif isinstance(a, ClauseRewrite):
                for c in a.before:
                    if st.counts.get(c, 0) < 1:
                        raise ReductionError(f"replay: clause {c} not present")
                    st.remove(c)
                for c in a.after:
                    st.add(c)
            else:
                st.truth += a.count
        return st.freeze(formula.original_size)

    def extend_assignment(self, assignment: Assignment, original_vars=None) -> Assignment:
        """Lift an assignment of the reduced formula to the input formula.

        Variables that disappeared without being set (RR-1, RR-2) may take
        either value; they default to true.
        """
        out = dict(assignment)
        for a in reversed(self.actions):
            if isinstance(a, SetLiteral):
                out[var(a.literal)] = a.literal > 0
            elif isinstance(a, Substitute):
                x2 = var(a.literal)
                out.setdefault(x2, True)
                out[a.var] = out[x2] == (a.literal > 0)
        if original_vars is not None:
            for v in original_vars:
                out.setdefault(v, True)
        return out

    # text format: one action per line, suffixed by the rule id

    def to_text(self) -> str:
        lines = []
        for a in self.actions:
            if isinstance(a, SetLiteral):
                lines.append(f"SET {var(a.literal)} {'+' if a.literal > 0 else '-'} {a.rule.value}")
            elif isinstance(a, Substitute):
                sign = "+" if a.literal > 0 else "-"
                lines.append(f"SUB {a.var} := {sign}{var(a.literal)} {a.rule.value}")
            elif isinstance(a, ClauseRewrite):
                before = " , ".join(" ".join(map(str, c)) for c in a.before)
                after = " , ".join(" ".join(map(str, c)) for c in a.after)
                lines.append(f"REW {before} -> {after} {a.rule.value}".replace("->  ", "-> "))
            else:
                lines.append(f"TRUTH {a.count} {a.rule.value}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "ReductionTrace":
        actions: List[Action] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            body, _, rule = rest.rpartition(" ")
            try:
                r = Rule(rule)
                if head == "SET":
                    v, sign = body.split()
                    actions.append(SetLiteral(int(v) if sign == "+" else -int(v), r))
                elif head == "SUB":
                    v, _, target = body.split()
                    actions.append(Substitute(int(v), int(target), r))
                elif head == "REW":
                    before, _, after = body.partition("->")
                    actions.append(ClauseRewrite(_parse_clauses(before), _parse_clauses(after), r))
                elif head == "TRUTH":
                    actions.append(TruthGain(int(body), r))
                else:
                    raise ValueError(head)
            except ValueError as exc:
                raise ValueError(f"trace line {lineno}: cannot parse {raw!r}") from exc
        return cls(actions)


def _parse_clauses(s: str) -> Tuple[Clause, ...]:
    out = []
    for part in s.split(","):
        part = part.strip()
        if part:
            out.append(make_clause(int(t) for t in part.split()))
    return tuple(out)


class _State:
    """Mutable working copy used while rules run."""

    __slots__ = ("counts", "truth", "trace")

    def __init__(self, counts: Dict[Clause, int], truth: int):
        self.counts = counts
        self.truth = truth
        self.trace: List[Action] = []

    @classmethod
    def of(cls, formula: Formula) -> "_State":
        return cls(dict(formula.counts), formula.truth_count)

    def freeze(self, original_size: Optional[int]) -> Formula:
        return Formula.from_counts(self.counts, self.truth, original_size)

    def add(self, c: Clause, m: int = 1) -> None:
        self.counts[c] = self.counts.get(c, 0) + m

    def remove(self, c: Clause, m: int = 1) -> None:
        left = self.counts[c] - m
        if left:
            self.counts[c] = left
        else:
            del self.counts[c]

    def assign(self, lit: int) -> None:
        nl = -lit
        for c in [c for c in self.counts if lit in c or nl in c]:
            m = self.counts.pop(c)
            if lit in c:
                self.truth += m
            elif len(c) == 2:
                self.add((c[1] if c[0] == nl else c[0],), m)

    def substitute(self, v: int, lit: int) -> None:
        for c in [c for c in self.counts if v in c or -v in c]:
            m = self.counts.pop(c)
            nc = make_clause(lit if l == v else -lit if l == -v else l for l in c)
            self.add(nc, m)

    def occurrences(self):
        """Per-variable counts: 2-clauses by polarity and 1-clauses by polarity.

        Returns ``{v: [pos2, neg2, pos1, neg1]}``; tautologies count in both
        2-clause polarities.
        """
        occ: Dict[int, List[int]] = {}
        for c, m in self.counts.items():
            if len(c) == 1:
                l = c[0]
                row = occ.setdefault(var(l), [0, 0, 0, 0])
                row[2 if l > 0 else 3] += m
            else:
                for l in c:
                    row = occ.setdefault(var(l), [0, 0, 0, 0])
                    row[0 if l > 0 else 1] += m
        return occ


# -- individual rules on the mutable state -----------------------------------


def _rr1(st: _State) -> bool:
    taut = sorted(c for c in st.counts if is_tautology(c))
    for c in taut:
        m = st.counts.pop(c)
        st.truth += m
        st.trace.append(ClauseRewrite((c,) * m, (), Rule.RR1))
        st.trace.append(TruthGain(m, Rule.RR1))
    return bool(taut)


def _rr2(st: _State) -> bool:
    changed = False
    for c in sorted(st.counts, key=lambda c: (len(c), c)):
        if c not in st.counts:
            continue
        if len(c) == 1:
            l = c[0]
            if l < 0:
                continue
            d = (-l,)
            residue: Tuple[Clause, ...] = ()
        else:
            if is_tautology(c):
                continue
            # pair on the first literal with the first literal negated, then on the second
            d = None
            for i in (0, 1):
                cand = make_clause((-c[i], c[1 - i]))
                if cand in st.counts and cand != c:
                    d = cand
                    residue = ((c[1 - i],),)
                    break
            if d is None:
                continue
        k = min(st.counts.get(c, 0), st.counts.get(d, 0))
        if k == 0:
            continue
        st.remove(c, k)
        st.remove(d, k)
        for r in residue:
            st.add(r, k)
        st.truth += k
        for _ in range(k):
            st.trace.append(ClauseRewrite((c, d), residue, Rule.RR2))
        st.trace.append(TruthGain(k, Rule.RR2))
        changed = True
    return changed


def _rr3(st: _State) -> bool:
    # literals pure at the start of the scan stay pure while others are set
    occ = st.occurrences()
    pure = []
    for v in sorted(occ):
        pos2, neg2, pos1, neg1 = occ[v]
        if not (pos2 + pos1 and neg2 + neg1):
            pure.append(v if pos2 + pos1 else -v)
    for lit in pure:
        if any(lit in c or -lit in c for c in st.counts):
            st.assign(lit)
            st.trace.append(SetLiteral(lit, Rule.RR3))
    return bool(pure)


def rr4_literal(row: List[int], v: int) -> Optional[int]:
    """The literal of ``v`` that RR-4 sets, given its occurrence row, or None.

    ``l`` is set when every clause that could be lost by doing so
    (2-clauses with ``-l`` and 1-clauses ``{-l}``) is outnumbered by the
    1-clauses ``{l}`` it satisfies.
    """
    pos2, neg2, pos1, neg1 = row
    if neg2 + neg1 <= pos1 and pos1:
        return v
    if pos2 + pos1 <= neg1 and neg1:
        return -v
    return None


def _rr4(st: _State) -> bool:
    # an instance found at the start of the scan stays valid: setting other
    # variables never adds a clause against it nor removes one of its units
    occ = st.occurrences()
    found = [lit for v in sorted(occ) if (lit := rr4_literal(occ[v], v)) is not None]
    for lit in found:
        st.assign(lit)
        st.trace.append(SetLiteral(lit, Rule.RR4))
    return bool(found)


def forced_value(units_pos: int, units_neg: int, other: Optional[int]) -> bool:
    """Value RR-3/RR-4 force on a variable seen only in unit clauses and at most one 2-clause.

    ``other`` is the variable's literal in its single remaining 2-clause
    (positive for the variable itself, negative for its negation) or None.
    Complementary unit pairs cancel first, so the result is always defined.
    """
    if other is None:
        return units_pos >= units_neg
    same, opposite = (units_pos, units_neg) if other > 0 else (units_neg, units_pos)
    # the 2-clause literal is pure (RR-3) or its negation wins RR-4
    keep = same >= opposite
    return keep if other > 0 else not keep


def _companion_values(st: _State, x1: int, x2: int, clauses) -> Optional[Tuple[bool, bool]]:
    """(alpha, beta): the value of x1 forced in F[x2] and in F[-x2]."""
    others = [c for c in clauses if len(c) == 2 and var(c[0]) != x2 and var(c[1]) != x2]
    mult_other = sum(st.counts[c] for c in others)
    if mult_other > 1:
        return None
    other_lit = None
    if others and not is_tautology(others[0]):
        c = others[0]
        other_lit = c[0] if var(c[0]) == x1 else c[1]
    result = []
    for x2_val in (True, False):
        pos = neg_ = 0
        for c in clauses:
            m = st.counts[c]
            if len(c) == 1:
                if c[0] > 0:
                    pos += m
                else:
                    neg_ += m
                continue
            if is_tautology(c):
                continue
            if var(c[0]) == x2 or var(c[1]) == x2:
                l1, l2 = (c[0], c[1]) if var(c[0]) == x1 else (c[1], c[0])
                if (l2 > 0) == x2_val:
                    continue  # satisfied by x2
                if l1 > 0:
                    pos += m
                else:
                    neg_ += m
        result.append(forced_value(pos, neg_, other_lit))
    return result[0], result[1]


def _rr5(st: _State) -> bool:
    changed = False
    for x1 in sorted({var(l) for c in st.counts for l in c}):
        clauses = [c for c in st.counts if x1 in c or -x1 in c]
        if not clauses:
            continue
        nbrs = sorted({var(l) for c in clauses if len(c) == 2 for l in c} - {x1})
        for x2 in nbrs:
            vals = _companion_values(st, x1, x2, clauses)
            if vals is None:
                continue
            alpha, beta = vals
            if alpha == beta:
                lit = x1 if alpha else -x1
                st.assign(lit)
                st.trace.append(SetLiteral(lit, Rule.RR5))
            else:
                target = x2 if alpha else -x2
                st.substitute(x1, target)
                st.trace.append(Substitute(x1, target, Rule.RR5))
            changed = True
            break
    return changed


_RULES = {Rule.RR1: _rr1, Rule.RR2: _rr2, Rule.RR3: _rr3, Rule.RR4: _rr4, Rule.RR5: _rr5}


def _apply(rule: Rule, formula: Formula) -> Tuple[Formula, ReductionTrace, bool]:
    st = _State.of(formula)
    changed = _RULES[rule](st)
    return st.freeze(formula.original_size), ReductionTrace(st.trace), changed


def rr1(formula: Formula):
    """Replace every tautological 2-clause by a truth-clause."""
    return _apply(Rule.RR1, formula)


def rr2(formula: Formula):
    """Merge clause pairs C, D with C - {l} == D - {-l} into C - {l} plus a truth."""
    return _apply(Rule.RR2, formula)


def rr3(formula: Formula):
    """Set pure literals."""
    return _apply(Rule.RR3, formula)


def rr4(formula: Formula):
    """Set a literal whose 1-clauses outweigh every clause of its negation."""
    return _apply(Rule.RR4, formula)


def rr5(formula: Formula):
    """Eliminate variables that have a companion.

    ``x2`` is a companion of ``x1`` if at most one 2-clause of ``x1`` does
    not contain ``x2``.  Depending on the forced values of ``x1`` in
    ``F[x2]`` and ``F[-x2]``, ``x1`` is set or replaced by ``x2`` / ``-x2``.
    """
    return _apply(Rule.RR5, formula)


def reduce(formula: Formula) -> Tuple[Formula, ReductionTrace]:
    """Run RR-1..RR-5 in order, each exhaustively, until nothing changes."""
    st = _State.of(formula)
    n = len(formula.vars)
    limit = max(1, formula.num_clauses) * max(1, n) ** 2 + 10
    steps = 0
    again = True
    while again:
        again = False
        for rule in Rule:
            fn = _RULES[rule]
            while fn(st):
                again = True
                steps += 1
                if steps > limit:
                    raise ReductionError(
                        f"reduction did not terminate after {steps} rule applications on {formula!r}"
                    )
    return st.freeze(formula.original_size), ReductionTrace(st.trace)


def is_reduced(formula: Formula) -> bool:
    return all(not _RULES[r](_State.of(formula)) for r in Rule)
