"""Branch-and-reduce search for Max-2-SAT.

The search follows the usual skeleton: split into components, reduce,
finish components of at most 9 variables by enumeration, otherwise branch
on the variable picked by :mod:`max2sat.heuristics` and keep the better
branch.  With instrumentation on, every branch records how much the
measure dropped in each child and is checked against the tabulated
branching vectors.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .formula import Assignment, Formula
from .heuristics import select_branch_variable
from .measure import SCALE, BranchVectorTable, WeightTable, gamma_scaled
from .reduction import reduce

SMALL_COMPONENT = 9
DEFAULT_NODE_CAP = 2**26
NODE_CAP_ENV = "MAX2SAT_NODE_CAP"
MEASURE_TOL = 1e-6


def default_node_cap() -> int:
    raw = os.environ.get(NODE_CAP_ENV)
    return int(raw) if raw else DEFAULT_NODE_CAP


@dataclass
class SolverConfig:
    weights: str = "simple"
    instrument: bool = False
    node_cap: int = field(default_factory=default_node_cap)
    parallel: bool = False
    seed: Optional[int] = None  # used by instance generation only

    @property
    def weight_table(self) -> WeightTable:
        return WeightTable.get(self.weights)


@dataclass
class BranchEvent:
    variable: int
    priority: int
    subcase: str
    gamma_before: float
    gamma_after_true: float
    gamma_after_false: float
    regular_flag: bool
    regular: Optional[int] = None

    @property
    def reductions(self) -> Tuple[float, float]:
        return self.gamma_before - self.gamma_after_true, self.gamma_before - self.gamma_after_false

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "priority": self.priority,
            "subcase": self.subcase,
            "gamma_before": self.gamma_before,
            "gamma_after_true": self.gamma_after_true,
            "gamma_after_false": self.gamma_after_false,
            "gamma_before_scaled": round(self.gamma_before * SCALE),
            "gamma_after_true_scaled": round(self.gamma_after_true * SCALE),
            "gamma_after_false_scaled": round(self.gamma_after_false * SCALE),
            "regular_flag": self.regular_flag,
        }


@dataclass
class CheckResult:
    ok: bool
    exempt: bool
    message: str = ""


@dataclass
class SearchStats:
    branch_nodes: int = 0
    leaves: int = 0
    component_roots: int = 0
    exhaustive_components: int = 0
    regular_events: int = 0
    priority_histogram: Counter = field(default_factory=Counter)
    subcase_histogram: Counter = field(default_factory=Counter)
    branch_events: List[BranchEvent] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    def merge(self, other: "SearchStats") -> None:
        self.branch_nodes += other.branch_nodes
        self.leaves += other.leaves
        self.component_roots += other.component_roots
        self.exhaustive_components += other.exhaustive_components
        self.regular_events += other.regular_events
        self.priority_histogram.update(other.priority_histogram)
        self.subcase_histogram.update(other.subcase_histogram)
        self.branch_events.extend(other.branch_events)
        self.violations.extend(other.violations)


@dataclass
class Solution:
    optimum: int
    assignment: Assignment
    stats: SearchStats


class NodeCapExceeded(RuntimeError):
    def __init__(self, cap: int, stats: SearchStats):
        super().__init__(f"node cap of {cap} branch nodes exceeded")
        self.cap = cap
        self.stats = stats


_TABLES: Dict[int, np.ndarray] = {}


def _all_assignments(n: int) -> np.ndarray:
    if n not in _TABLES:
        codes = np.arange(1 << n)
        _TABLES[n] = ((codes[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    return _TABLES[n]


def exhaustive_small(formula: Formula) -> Tuple[int, Assignment]:
    """Optimum of a formula with at most 9 variables by full enumeration."""
    order = sorted(formula.vars)
    n = len(order)
    if n > SMALL_COMPONENT:
        raise ValueError(f"exhaustive_small handles at most {SMALL_COMPONENT} variables, got {n}")
    if n == 0:
        return formula.truth_count, {}
    col = {v: i for i, v in enumerate(order)}
    table = _all_assignments(n)
    score = np.zeros(len(table), dtype=np.int64)
    for clause, mult in formula.counts.items():
        sat = np.zeros(len(table), dtype=bool)
        for lit in clause:
            x = table[:, col[abs(lit)]]
            sat |= x if lit > 0 else ~x
        score += mult * sat
    best = int(np.argmax(score))
    return int(score[best]) + formula.truth_count, {v: bool(table[best, i]) for v, i in col.items()}


def instrument_branch(event: BranchEvent, table: BranchVectorTable) -> CheckResult:
    """Check a branch's measured reductions against the tabulated vector of its priority."""
    measured = sorted(event.reductions, reverse=True)
    floor = table.weights.omega(3) - MEASURE_TOL
    if measured[1] < floor:
        return CheckResult(
            False, event.regular_flag, f"P{event.priority} {event.subcase} v={event.variable}: "
            f"reduction {measured[1]:.5f} below omega_3"
        )
    if event.regular_flag:
        return CheckResult(True, True)
    alternatives = table.alternatives(event.priority, event.subcase)
    for target in alternatives:
        if all(m >= t - MEASURE_TOL for m, t in zip(measured, target)):
            return CheckResult(True, False)
    want = " or ".join("(" + ", ".join(f"{t:.5f}" for t in target) + ")" for target in alternatives)
    return CheckResult(
        False,
        False,
        f"P{event.priority} {event.subcase} v={event.variable}: measured "
        f"({measured[0]:.5f}, {measured[1]:.5f}) does not dominate {want}",
    )


class _Search:
    def __init__(self, config: SolverConfig, node_budget: int):
        self.config = config
        self.weights = config.weight_table
        self.table = BranchVectorTable(self.weights)
        self.node_budget = node_budget
        self.stats = SearchStats()

    def run(self, formula: Formula) -> Tuple[int, Assignment]:
        reduced, trace = reduce(formula)
        opt, assignment = self.solve_reduced(reduced, parallel=self.config.parallel)
        return opt, trace.extend_assignment(assignment, formula.vars)

    def solve_reduced(self, formula: Formula, parallel: bool = False) -> Tuple[int, Assignment]:
        total = 0
        assignment: Assignment = {}
        large = 0
        for comp in formula.components():
            if comp.is_trivial():
                total += comp.truth_count
                continue
            if comp.num_vars <= SMALL_COMPONENT:
                opt, sub = exhaustive_small(comp)
                self.stats.exhaustive_components += 1
            else:
                large += 1
                opt, sub = self.branch(comp, parallel)
            total += opt
            assignment.update(sub)
        if large == 0:
            self.stats.leaves += 1
        else:
            self.stats.component_roots += large - 1
        return total, assignment

    def branch(self, formula: Formula, parallel: bool = False) -> Tuple[int, Assignment]:
        self.stats.branch_nodes += 1
        if self.stats.branch_nodes > self.node_budget:
            raise NodeCapExceeded(self.config.node_cap, self.stats)
        choice = select_branch_variable(formula, self.weights)
        v = choice.variable
        children = {}
        for lit in (v, -v):
            children[lit] = choice.lookahead.get(lit) or reduce(formula.assign(lit))

        self.stats.priority_histogram[choice.priority] += 1
        self.stats.subcase_histogram[choice.tag] += 1
        if choice.regular_flag:
            self.stats.regular_events += 1
        if self.config.instrument:
            g0 = gamma_scaled(formula, self.weights)
            event = BranchEvent(
                variable=v,
                priority=choice.priority,
                subcase=choice.tag,
                gamma_before=g0 / SCALE,
                gamma_after_true=gamma_scaled(children[v][0], self.weights) / SCALE,
                gamma_after_false=gamma_scaled(children[-v][0], self.weights) / SCALE,
                regular_flag=choice.regular_flag,
                regular=choice.regular,
            )
            self.stats.branch_events.append(event)
            check = instrument_branch(event, self.table)
            if not check.ok:
                self.stats.violations.append(check.message)

        if parallel:
            results = self._parallel_children(children)
        else:
            results = {lit: self.solve_reduced(children[lit][0]) for lit in (v, -v)}

        best = None
        for lit in (v, -v):
            opt, sub = results[lit]
            reduced, trace = children[lit]
            if best is None or opt > best[0]:
                lifted = trace.extend_assignment(sub)
                lifted[v] = lit > 0
                best = (opt, lifted)
        opt, assignment = best
        for u in formula.vars:
            assignment.setdefault(u, True)
        return opt, {u: assignment[u] for u in formula.vars}

    def _parallel_children(self, children):
        subs = {}
        for lit in children:
            sub = _Search(self.config, self.node_budget - self.stats.branch_nodes)
            subs[lit] = sub
        with ThreadPoolExecutor(max_workers=2) as pool:
            futures = {lit: pool.submit(subs[lit].solve_reduced, children[lit][0]) for lit in children}
            results = {lit: f.result() for lit, f in futures.items()}
        for lit in children:  # true branch first, as in the sequential order
            self.stats.merge(subs[lit].stats)
        if self.stats.branch_nodes > self.node_budget:
            raise NodeCapExceeded(self.config.node_cap, self.stats)
        return results


def solve(formula: Formula, config: Optional[SolverConfig] = None) -> Solution:
    """Maximum number of simultaneously satisfiable clauses, with a witness."""
    config = config or SolverConfig()
    search = _Search(config, config.node_cap)
    opt, assignment = search.run(formula)
    return Solution(opt, assignment, search.stats)
