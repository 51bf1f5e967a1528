"""Brute-force reference optimum, independent of the solver and the reduction rules."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .formula import Assignment, Formula, satisfied_count

MAX_VARS = 26
_CHUNK_BITS = 18


class OracleTooLarge(ValueError):
    pass


def brute_force(formula: Formula) -> Tuple[int, Assignment]:
    """Exact optimum over all 2**n assignments.

    Variables are ordered by id and the assignments are enumerated as a
    binary counter starting from all-false, with the smallest id as the most
    significant bit.  The first maximizer in that order is returned.
    """
    order = sorted(formula.vars)
    n = len(order)
    if n > MAX_VARS:
        raise OracleTooLarge(f"brute force is limited to {MAX_VARS} variables, got {n}")
    if n == 0:
        return formula.truth_count, {}
    index = {v: i for i, v in enumerate(order)}
    shifts = np.array([n - 1 - i for i in range(n)], dtype=np.int64)
    clauses = list(formula.counts.items())
    best_score, best_code = -1, 0
    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)
        score = np.zeros(len(codes), dtype=np.int64)
        for clause, mult in clauses:
            sat = np.zeros(len(codes), dtype=bool)
            for lit in clause:
                col = bits[:, index[abs(lit)]]
                sat |= col if lit > 0 else ~col
            score += mult * sat
        i = int(np.argmax(score))
        if score[i] > best_score:
            best_score, best_code = int(score[i]), start + i
    assignment = {v: bool((best_code >> (n - 1 - i)) & 1) for i, v in enumerate(order)}
    optimum = best_score + formula.truth_count
    assert satisfied_count(formula, assignment) == optimum
    return optimum, assignment
