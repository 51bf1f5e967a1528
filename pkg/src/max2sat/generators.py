"""Seeded random instances: uniform 2-CNF, cubic and 4-regular variable graphs."""

from __future__ import annotations

import enum
from collections import Counter
from typing import List, Optional, Tuple

import numpy as np

from .formula import Formula
from .reduction import is_reduced

MAX_TRIES = 10_000


class Model(str, enum.Enum):
    UNIFORM = "uniform2cnf"
    CUBIC = "cubic"
    FOUR_REGULAR = "fourRegular"


class GeneratorError(ValueError):
    pass


def _uniform(rng, n: int, K: int, unit_fraction: float) -> List[Tuple[int, ...]]:
    if n < 1 or K < 1:
        raise GeneratorError("uniform2cnf needs n >= 1 and K >= 1")
    if n == 1 and unit_fraction < 1:
        unit_fraction = 1.0
    clauses = []
    for _ in range(K):
        signs = rng.choice((-1, 1), size=2)
        if rng.random() < unit_fraction:
            clauses.append((int(signs[0] * rng.integers(1, n + 1)),))
        else:
            a, b = rng.choice(n, size=2, replace=False) + 1
            clauses.append((int(signs[0] * a), int(signs[1] * b)))
    return clauses


def _regular_edges(rng, n: int, d: int, max_mult: int) -> List[Tuple[int, int]]:
    """Random d-regular multigraph on 1..n by pairing stubs, with rejection."""
    stubs = np.repeat(np.arange(1, n + 1), d)
    for _ in range(MAX_TRIES):
        perm = rng.permutation(stubs)
        edges = [tuple(sorted((int(perm[2 * i]), int(perm[2 * i + 1])))) for i in range(len(perm) // 2)]
        if any(a == b for a, b in edges):
            continue
        if max(Counter(edges).values()) > max_mult:
            continue
        return edges
    raise GeneratorError(f"no {d}-regular graph on {n} vertices found in {MAX_TRIES} tries")


def _connected(n: int, edges) -> bool:
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(1, n + 1)}) == 1


def _polarize(rng, edges, complementary_pairs: bool) -> List[List[int]]:
    clauses = []
    seen = {}
    for a, b in edges:
        if complementary_pairs and (a, b) in seen:
            first = seen[(a, b)]
            clauses.append([-first[0], -first[1]])
            continue
        sa, sb = rng.choice((-1, 1), size=2)
        c = [int(sa * a), int(sb * b)]
        seen[(a, b)] = c
        clauses.append(c)
    return clauses


def _repair_pure(rng, clauses: List[List[int]], edges) -> None:
    """Flip one occurrence of every variable that appears in a single polarity."""
    mult = Counter(edges)
    occ = {}
    for i, c in enumerate(clauses):
        for j, l in enumerate(c):
            occ.setdefault(abs(l), []).append((i, j))
    for v in sorted(occ):
        spots = occ[v]
        signs = {clauses[i][j] > 0 for i, j in spots}
        if len(signs) == 2:
            continue
        free = [(i, j) for i, j in spots if mult[edges[i]] == 1] or spots
        i, j = free[int(rng.integers(len(free)))]
        clauses[i][j] = -clauses[i][j]


def generate(
    model,
    n: int,
    K: Optional[int] = None,
    seed: Optional[int] = 0,
    unit_fraction: float = 0.0,
    reduced: bool = False,
) -> Formula:
    """Random formula of the given model; identical seeds give identical formulas.

    ``reduced=True`` (graph models only) retries until the formula is a
    reduction fixpoint with a connected variable graph.
    """
    model = Model(model)
    rng = np.random.default_rng(seed)
    if model is Model.UNIFORM:
        if K is None:
            raise GeneratorError("uniform2cnf needs K")
        if reduced:
            raise GeneratorError("reduced=True is only supported for the graph models")
        return Formula(_uniform(rng, n, K, unit_fraction))

    d, max_mult = (3, 1) if model is Model.CUBIC else (4, 2)
    if (d * n) % 2:
        raise GeneratorError(f"a {d}-regular graph needs d*n even, got n={n}")
    want = d * n // 2
    if K is not None and K != want:
        raise GeneratorError(f"{model.value} on n={n} variables has exactly {want} clauses, got K={K}")
    if n < (4 if model is Model.CUBIC else 3):
        raise GeneratorError(f"{model.value} needs more vertices, got n={n}")
    for _ in range(MAX_TRIES):
        edges = _regular_edges(rng, n, d, max_mult)
        if reduced and not _connected(n, edges):
            continue
        clauses = _polarize(rng, edges, complementary_pairs=reduced)
        if reduced:
            _repair_pure(rng, clauses, edges)
        f = Formula(clauses)
        if not reduced or is_reduced(f):
            return f
    raise GeneratorError(f"no reduced {model.value} instance found in {MAX_TRIES} tries")
