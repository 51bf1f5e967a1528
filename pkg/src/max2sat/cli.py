"""Command-line driver: ``max2sat solve|verify|gen|stats``.

Exit codes: 0 success, 1 usage, 2 parse error, 3 verification mismatch,
4 node cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

from .dimacs import DimacsError, parse_dimacs, to_dimacs
from .formula import Formula, satisfied_count
from .generators import GeneratorError, Model, generate
from .measure import SCALE, SIMPLE_BUDGET, WeightTable, gamma_scaled
from .oracle import OracleTooLarge, brute_force
from .reduction import reduce
from .solver import NodeCapExceeded, SearchStats, SolverConfig, default_node_cap, solve

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_MISMATCH, EXIT_NODE_CAP = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def leaf_bound(K: int) -> float:
    return (K + 1) * 2.0 ** (K / SIMPLE_BUDGET)


@dataclass
class StatsReport:
    optimum: Optional[int]
    n: int
    K: int
    branch_nodes: int
    leaves: int
    priority_histogram: Dict[str, int]
    violations: List[str]
    wall_time: float
    weights_variant: str
    leaf_bound: float
    component_roots: int = 0
    regular_events: int = 0
    subcase_histogram: Dict[str, int] = field(default_factory=dict)
    gamma: float = 0.0
    gamma_scaled: int = 0
    gamma_reduced: float = 0.0
    gamma_reduced_scaled: int = 0
    node_cap_exceeded: bool = False
    events: Optional[List[dict]] = None

    @classmethod
    def build(cls, formula: Formula, stats: SearchStats, optimum, weights: WeightTable, wall_time: float, **extra):
        g = gamma_scaled(formula, weights)
        gr = gamma_scaled(reduce(formula)[0], weights)
        return cls(
            optimum=optimum,
            n=formula.num_vars,
            K=formula.original_size,
            branch_nodes=stats.branch_nodes,
            leaves=stats.leaves,
            priority_histogram={f"P{p}": c for p, c in sorted(stats.priority_histogram.items())},
            violations=list(stats.violations),
            wall_time=wall_time,
            weights_variant=weights.variant.value,
            leaf_bound=leaf_bound(formula.original_size),
            component_roots=stats.component_roots,
            regular_events=stats.regular_events,
            subcase_histogram=dict(sorted(stats.subcase_histogram.items())),
            gamma=g / SCALE,
            gamma_scaled=g,
            gamma_reduced=gr / SCALE,
            gamma_reduced_scaled=gr,
            **extra,
        )

    def to_dict(self, include_wall_time: bool = True) -> dict:
        d = asdict(self)
        if d["events"] is None:
            del d["events"]
        if not include_wall_time:
            del d["wall_time"]
        return d

    def to_json(self, include_wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_time), sort_keys=True)


def _read(path: str) -> Formula:
    if path == "-":
        return parse_dimacs(sys.stdin.read())
    with open(path) as fh:
        return parse_dimacs(fh.read())


def _config(args) -> SolverConfig:
    return SolverConfig(
        weights=args.weights,
        instrument=args.instrument or getattr(args, "json", False),
        node_cap=args.node_cap if args.node_cap is not None else default_node_cap(),
        parallel=args.parallel,
        seed=args.seed,
    )


def _model_line(assignment, n_vars) -> str:
    lits = [v if assignment.get(v, True) else -v for v in range(1, n_vars + 1)]
    return "v " + " ".join(map(str, lits)) + " 0"


def _cmd_solve(args, out) -> int:
    formula = _read(args.file)
    if args.emit_trace:
        with open(args.emit_trace, "w") as fh:
            fh.write(reduce(formula)[1].to_text())
    if args.oracle:
        opt, assignment = brute_force(formula)
        out.write(f"o {opt}\n")
        if args.model:
            out.write(_model_line(assignment, max(formula.vars, default=0)) + "\n")
        return EXIT_OK
    config = _config(args)
    t0 = time.perf_counter()
    try:
        sol = solve(formula, config)
    except NodeCapExceeded as exc:
        if args.json:
            rep = StatsReport.build(
                formula, exc.stats, None, config.weight_table, time.perf_counter() - t0, node_cap_exceeded=True
            )
            out.write(rep.to_json() + "\n")
        print(f"c {exc}", file=sys.stderr)
        return EXIT_NODE_CAP
    elapsed = time.perf_counter() - t0
    code = EXIT_OK
    if satisfied_count(formula, sol.assignment) != sol.optimum:
        print("c returned assignment does not reach the optimum", file=sys.stderr)
        code = EXIT_MISMATCH
    if args.verify:
        ref, _ = brute_force(formula)
        if ref != sol.optimum:
            print(f"c oracle disagrees: solver {sol.optimum}, brute force {ref}", file=sys.stderr)
            code = EXIT_MISMATCH
    if args.json:
        extra = {}
        if args.events:
            extra["events"] = [e.to_dict() for e in sol.stats.branch_events]
        rep = StatsReport.build(formula, sol.stats, sol.optimum, config.weight_table, elapsed, **extra)
        out.write(rep.to_json() + "\n")
    else:
        out.write(f"o {sol.optimum}\n")
        if args.model:
            out.write(_model_line(sol.assignment, max(formula.vars, default=0)) + "\n")
        if args.instrument:
            for v in sol.stats.violations:
                out.write(f"c violation {v}\n")
    return code


def _cmd_verify(args, out) -> int:
    formulas = []
    for path in args.files:
        formulas.append((path, _read(path)))
    if args.random:
        for i in range(args.random):
            seed = args.seed + i
            formulas.append((f"{args.gen_model}:seed={seed}", generate(args.gen_model, args.n, args.K, seed)))
    if not formulas:
        raise UsageError("verify needs at least one file or --random COUNT")
    config = _config(args)
    bad = 0
    for name, f in formulas:
        sol = solve(f, config)
        ref, _ = brute_force(f)
        ok = sol.optimum == ref and satisfied_count(f, sol.assignment) == sol.optimum
        if not ok:
            bad += 1
            out.write(f"c MISMATCH {name}: solver {sol.optimum}, brute force {ref}\n")
    out.write(f"c verified {len(formulas) - bad}/{len(formulas)}\n")
    return EXIT_MISMATCH if bad else EXIT_OK


def _cmd_gen(args, out) -> int:
    f = generate(args.model, args.n, args.K, args.seed, unit_fraction=args.unit_fraction, reduced=args.reduced)
    note = f"{args.model} n={args.n} seed={args.seed}" + (" reduced" if args.reduced else "")
    out.write(to_dimacs(f, n=args.n, comments=(note,)))
    return EXIT_OK


def _cmd_stats(args, out) -> int:
    args.json = True
    args.model = False
    return _cmd_solve(args, out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="max2sat", description="Exact Max-2-SAT by branch and reduce.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def solver_flags(sp):
        sp.add_argument("--weights", choices=("simple", "combined"), default="simple")
        sp.add_argument("--instrument", action="store_true", help="check every branch against the vector table")
        sp.add_argument("--node-cap", type=int, default=None, help="abort after this many branch nodes")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--parallel", action="store_true", help="solve the two root branches in threads")

    s = sub.add_parser("solve", help="print the optimum of a DIMACS file ('-' for stdin)")
    s.add_argument("file", nargs="?", default="-")
    solver_flags(s)
    s.add_argument("--model", action="store_true", help="also print an optimal assignment as a v-line")
    s.add_argument("--json", action="store_true", help="print the stats report instead")
    s.add_argument("--events", action="store_true", help="include every branch event in the JSON")
    s.add_argument("--emit-trace", metavar="PATH", help="write the root reduction trace to PATH")
    s.add_argument("--oracle", action="store_true", help="solve by brute force instead (at most 26 variables)")
    s.add_argument("--verify", action="store_true", help="also run brute force and compare")
    s.set_defaults(func=_cmd_solve)

    st = sub.add_parser("stats", help="solve and print the JSON stats report")
    st.add_argument("file", nargs="?", default="-")
    solver_flags(st)
    st.add_argument("--events", action="store_true")
    st.add_argument("--emit-trace", metavar="PATH")
    st.set_defaults(oracle=False, verify=False)
    st.set_defaults(func=_cmd_stats)

    v = sub.add_parser("verify", help="compare the solver with brute force")
    v.add_argument("files", nargs="*")
    solver_flags(v)
    v.add_argument("--random", type=int, default=0, metavar="COUNT", help="also check COUNT generated instances")
    v.add_argument("--gen-model", choices=[m.value for m in Model], default=Model.UNIFORM.value)
    v.add_argument("-n", type=int, default=10)
    v.add_argument("-K", type=int, default=None)
    v.set_defaults(func=_cmd_verify)

    g = sub.add_parser("gen", help="print a random instance in DIMACS")
    g.add_argument("--model", choices=[m.value for m in Model], default=Model.UNIFORM.value)
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-K", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--unit-fraction", type=float, default=0.0)
    g.add_argument("--reduced", action="store_true", help="retry until the instance is reduced and connected")
    g.set_defaults(func=_cmd_gen)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify" and args.random and args.K is None and args.gen_model == Model.UNIFORM.value:
            args.K = 3 * args.n
        return args.func(args, out)
    except UsageError as exc:
        print(f"max2sat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeneratorError as exc:
        print(f"max2sat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleTooLarge as exc:
        print(f"max2sat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DimacsError, OSError) as exc:
        print(f"max2sat: {exc}", file=sys.stderr)
        return EXIT_PARSE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
