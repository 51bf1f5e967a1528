"""Instance builders shared by the test modules."""

import itertools
import json
import pathlib
from collections import Counter

import numpy as np

from max2sat import Formula, reduce
from max2sat.formula import satisfied_count

DATA = pathlib.Path(__file__).parent / "data"


def naive_optimum(formula):
    """Plain itertools enumeration; used only to pin down the oracle itself."""
    order = sorted(formula.vars)
    best = formula.truth_count
    for bits in itertools.product((False, True), repeat=len(order)):
        best = max(best, satisfied_count(formula, dict(zip(order, bits))))
    return best


def random_formula(rng, n, K, unit_fraction=0.2, dup_fraction=0.2, taut_fraction=0.05):
    """Uniform 2-CNF with units, duplicates and the odd tautology mixed in."""
    clauses = []
    for _ in range(K):
        r = rng.random()
        if clauses and r < dup_fraction:
            clauses.append(clauses[int(rng.integers(len(clauses)))])
            continue
        v = int(rng.integers(1, n + 1))
        s = 1 if rng.random() < 0.5 else -1
        if rng.random() < unit_fraction or n == 1:
            clauses.append((s * v,))
        elif rng.random() < taut_fraction:
            clauses.append((v, -v))
        else:
            u = int(rng.choice([x for x in range(1, n + 1) if x != v]))
            clauses.append((s * v, (1 if rng.random() < 0.5 else -1) * u))
    return Formula(clauses)


def mixed_formula(n, frac4, seed, min_vars=10):
    """Reduced formula on a random multigraph with degrees 3 and 4.

    Parallel edges get complementary polarities so that they survive the
    reduction as limited pairs.
    """
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        deg = [4 if rng.random() < frac4 else 3 for _ in range(n)]
        if sum(deg) % 2:
            deg[0] = 7 - deg[0]
        stubs = rng.permutation(np.repeat(np.arange(1, n + 1), deg))
        edges = [tuple(sorted((int(stubs[2 * i]), int(stubs[2 * i + 1])))) for i in range(len(stubs) // 2)]
        if any(a == b for a, b in edges) or max(Counter(edges).values()) > 2:
            continue
        seen, clauses = {}, []
        for a, b in edges:
            if (a, b) in seen:
                f = seen[(a, b)]
                clauses.append((-f[0], -f[1]))
                continue
            s = rng.choice((-1, 1), 2)
            seen[(a, b)] = (int(s[0] * a), int(s[1] * b))
            clauses.append(seen[(a, b)])
        r, _ = reduce(Formula(clauses))
        if r.num_vars >= min_vars:
            return r
    raise RuntimeError("no mixed instance found")


def gadgets():
    raw = json.loads((DATA / "gadgets.json").read_text())
    return {k: (Formula(map(tuple, v["clauses"])), v) for k, v in raw.items()}


def doubled_cycle(k):
    """k weight-4 variables in a ring, consecutive ones joined by a complementary clause pair."""
    clauses = []
    for i in range(1, k + 1):
        j = i % k + 1
        clauses += [(i, j), (-i, -j)]
    return Formula(clauses)
