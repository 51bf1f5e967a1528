"""DIMACS CNF reading and writing, restricted to clauses of size 1 and 2."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import List, Optional, TextIO, Tuple, Union

from .formula import Clause, Formula, var


class DimacsError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class InstanceFile:
    n: int
    m: int
    clauses: Tuple[Tuple[int, ...], ...]  # raw clause lines, in file order

    def to_formula(self) -> Formula:
        return Formula(self.clauses)


def parse_instance(text: str) -> InstanceFile:
    n = m = None
    clauses: List[Tuple[int, ...]] = []
    pending: List[int] = []
    pending_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise DimacsError("second problem line", lineno)
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if n < 0 or m < 0:
                raise DimacsError("negative count in header", lineno)
            continue
        if n is None:
            raise DimacsError("clause before the 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"not an integer: {tok!r}", lineno) from None
            if pending_line is None:
                pending_line = lineno
            if lit == 0:
                if not pending:
                    raise DimacsError("empty clause", lineno)
                clauses.append(tuple(pending))
                pending, pending_line = [], None
                continue
            if var(lit) > n:
                raise DimacsError(f"literal {lit} out of range 1..{n}", lineno)
            pending.append(lit)
            if len(pending) > 2:
                raise DimacsError("clause of size >= 3 (only 1- and 2-clauses are supported)", pending_line)
    if n is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        raise DimacsError("last clause is not terminated by 0", pending_line)
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses, found {len(clauses)}")
    return InstanceFile(n, m, tuple(clauses))


def parse_dimacs(text: str) -> Formula:
    """Formula of a DIMACS text; every clause line is one multiset member."""
    return parse_instance(text).to_formula()


def read_instance(source: Union[str, TextIO]) -> Formula:
    if isinstance(source, str):
        with open(source) as fh:
            return parse_dimacs(fh.read())
    return parse_dimacs(source.read())


def to_dimacs(formula: Formula, n: Optional[int] = None, comments: Tuple[str, ...] = ()) -> str:
    """Serialize the ordinary clauses.  Truth-clauses are kept as a comment only."""
    clauses: List[Clause] = formula.clauses
    top = max(formula.vars, default=0)
    n = top if n is None else max(n, top)
    out = io.StringIO()
    for c in comments:
        out.write(f"c {c}\n")
    if formula.truth_count:
        out.write(f"c truth {formula.truth_count}\n")
    out.write(f"p cnf {n} {len(clauses)}\n")
    for c in clauses:
        out.write(" ".join(map(str, c)) + " 0\n")
    return out.getvalue()
