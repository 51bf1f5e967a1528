import numpy as np
import pytest

from helpers import doubled_cycle, gadgets, mixed_formula, random_formula
from max2sat import Formula, brute_force, reduce, satisfied_count, solve
from max2sat.generators import generate
from max2sat.measure import SIMPLE, BranchVectorTable
from max2sat.solver import (
    NODE_CAP_ENV,
    BranchEvent,
    NodeCapExceeded,
    SolverConfig,
    default_node_cap,
    exhaustive_small,
    instrument_branch,
)

TABLE = BranchVectorTable(SIMPLE)
w3 = SIMPLE.omega(3)


def test_complementary_units():
    assert solve(Formula([(1,), (-1,)])).optimum == 1


def test_four_clause_gadget():
    sol = solve(Formula([(1, 2), (-1, 2), (1, -2), (-1, -2)]))
    assert sol.optimum == 3 and satisfied_count(Formula([(1, 2), (-1, 2), (1, -2), (-1, -2)]), sol.assignment) == 3


def test_empty_formula():
    sol = solve(Formula())
    assert sol.optimum == 0 and sol.assignment == {}


class TestExhaustiveSmall:
    def test_only_truths(self):
        assert exhaustive_small(Formula.from_counts({}, truth_count=4)) == (4, {})

    def test_single_variable(self):
        assert exhaustive_small(Formula([(1,), (1,), (-1,)]))[0] == 2

    def test_nine_variables_match_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            f = random_formula(rng, 9, 30, unit_fraction=0.1)
            f = Formula(f.clauses + [(v, (v % 9) + 1) for v in range(1, 10)])
            opt, a = exhaustive_small(f)
            assert opt == brute_force(f)[0] == satisfied_count(f, a)

    def test_too_large(self):
        with pytest.raises(ValueError):
            exhaustive_small(Formula([(v, v + 1) for v in range(1, 10)]))


def test_matches_oracle_on_mixed_instances():
    rng = np.random.default_rng(17)
    for i in range(120):
        n = int(rng.integers(1, 13))
        f = random_formula(rng, n, int(rng.integers(1, 41)))
        sol = solve(f)
        assert sol.optimum == brute_force(f)[0]
        assert satisfied_count(f, sol.assignment) == sol.optimum
        assert set(sol.assignment) == set(f.vars)


def test_branching_instances_match_oracle():
    for seed in range(25):
        f = mixed_formula(14 + seed % 6, 0.6, seed)
        sol = solve(f, SolverConfig(instrument=True))
        assert sol.optimum == brute_force(f)[0]
        assert satisfied_count(f, sol.assignment) == sol.optimum
        assert sol.stats.violations == []


def test_component_additivity():
    a = mixed_formula(14, 0.5, 1)
    b = mixed_formula(14, 0.5, 2)
    shift = max(a.vars)
    b2 = Formula([tuple(l + shift if l > 0 else l - shift for l in c) for c in b.clauses])
    joined = Formula(a.clauses + b2.clauses, truth_count=a.truth_count + b.truth_count)
    assert solve(joined).optimum == solve(a).optimum + solve(b).optimum


def test_leaf_accounting():
    for seed in range(20):
        f = mixed_formula(16 + seed % 10, 0.5, seed)
        st = solve(f).stats
        assert st.leaves == st.branch_nodes + 1 + st.component_roots
        assert sum(st.priority_histogram.values()) == st.branch_nodes


def test_instrumented_events_are_recorded():
    f, _ = gadgets()["P9"]
    sol = solve(f, SolverConfig(instrument=True))
    assert len(sol.stats.branch_events) == sol.stats.branch_nodes >= 1
    ev = sol.stats.branch_events[0]
    assert ev.priority == 9 and ev.regular_flag is False
    assert min(ev.reductions) >= w3 - 1e-6


def test_every_branch_drops_at_least_one_weight_three_variable():
    for seed in range(30):
        f = mixed_formula(20, 0.5, seed)
        for ev in solve(f, SolverConfig(instrument=True)).stats.branch_events:
            assert min(ev.reductions) >= w3 - 1e-6


class TestInstrumentBranch:
    def event(self, priority, before, t, f, tag=None, regular=False):
        return BranchEvent(1, priority, tag or f"P{priority}", before, before - t, before - f, regular)

    def test_priority_one_passes_at_seven(self):
        assert instrument_branch(self.event(1, 20, 7, 7), TABLE).ok

    def test_priority_one_fails_below(self):
        res = instrument_branch(self.event(1, 20, 7, 6.9), TABLE)
        assert not res.ok and "P1" in res.message

    def test_priority_four(self):
        assert instrument_branch(self.event(4, 20, 7.0523, 7.0523), TABLE).ok
        assert not instrument_branch(self.event(4, 20, 7.0523, 7.05), TABLE).ok

    def test_order_insensitive(self):
        assert instrument_branch(self.event(9, 20, 6 * w3, 8 * w3), TABLE).ok

    def test_p10_either_alternative(self):
        assert instrument_branch(self.event(10, 20, 4 * w3, 10 * w3), TABLE).ok
        assert instrument_branch(self.event(10, 20, 8 * w3, 6 * w3), TABLE).ok
        assert not instrument_branch(self.event(10, 20, 4 * w3, 8 * w3), TABLE).ok

    def test_subcase_vector_is_stricter_than_the_envelope(self):
        # P6 case 2 is symmetric at 7.2126, the envelope only asks 5.40945 of the weaker branch
        assert instrument_branch(self.event(6, 20, 7.2126, 5.5), TABLE).ok
        assert not instrument_branch(self.event(6, 20, 7.2126, 5.5, tag="P6-case2"), TABLE).ok
        assert instrument_branch(self.event(6, 20, 7.2126, 7.2126, tag="P6-case2"), TABLE).ok

    def test_regular_events_are_exempt(self):
        res = instrument_branch(self.event(8, 20, 2, 2, regular=True), TABLE)
        assert res.ok and res.exempt

    def test_regular_events_still_need_positive_progress(self):
        assert not instrument_branch(self.event(8, 20, 2, 0.5, regular=True), TABLE).ok


def test_node_cap_raises_with_partial_stats():
    f = mixed_formula(30, 0.5, 3)
    with pytest.raises(NodeCapExceeded) as err:
        solve(f, SolverConfig(node_cap=0))
    assert err.value.stats.branch_nodes == 1


def test_node_cap_from_environment(monkeypatch):
    monkeypatch.setenv(NODE_CAP_ENV, "12")
    assert default_node_cap() == 12 and SolverConfig().node_cap == 12
    monkeypatch.delenv(NODE_CAP_ENV)
    assert default_node_cap() == 2**26


def test_parallel_mode_gives_identical_results():
    for seed in range(10):
        f = mixed_formula(24, 0.5, seed)
        seq = solve(f, SolverConfig(instrument=True))
        par = solve(f, SolverConfig(instrument=True, parallel=True))
        assert par.optimum == seq.optimum and par.assignment == seq.assignment
        assert par.stats.branch_nodes == seq.stats.branch_nodes
        assert [e.variable for e in par.stats.branch_events] == [e.variable for e in seq.stats.branch_events]


def test_combined_weights_solve_correctly():
    for seed in range(10):
        f = mixed_formula(16, 0.7, seed)
        assert solve(f, SolverConfig(weights="combined")).optimum == brute_force(f)[0]


def test_cycle_gadget_is_a_regular_branch():
    sol = solve(doubled_cycle(12), SolverConfig(instrument=True))
    assert sol.optimum == brute_force(doubled_cycle(12))[0]
    assert sol.stats.regular_events >= 1


def test_solution_is_deterministic():
    f = generate("cubic", 30, None, 8, reduced=True)
    a, b = solve(f, SolverConfig(instrument=True)), solve(f, SolverConfig(instrument=True))
    assert a.assignment == b.assignment
    assert [e.to_dict() for e in a.stats.branch_events] == [e.to_dict() for e in b.stats.branch_events]


def test_assignment_after_reduction_is_total():
    rng = np.random.default_rng(1)
    f = random_formula(rng, 12, 30)
    r, _ = reduce(f)
    sol = solve(f)
    assert set(sol.assignment) == set(f.vars)
