"""Weight tables, the measure gamma, and branching-vector bookkeeping.

Weights are exact decimals held as integers scaled by ``SCALE``; floats
only appear at the boundary (``omega``, ``gamma``).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from scipy.optimize import brentq

from .formula import Formula

SCALE = 100_000
TOL = 1e-9

SIMPLE_BUDGET = 6.1489
COMBINED_BUDGET = 6.2158


class Variant(str, enum.Enum):
    SIMPLE = "simple"
    COMBINED = "combined"


@dataclass(frozen=True)
class WeightTable:
    """omega_i for degrees i >= 3; omega_i = i/2 beyond the tabulated degrees."""

    variant: Variant
    scaled: Tuple[Tuple[int, int], ...]  # ((degree, omega * SCALE), ...)

    def __post_init__(self):
        top = max(d for d, _ in self.scaled) + 3
        for i in range(3, top):
            if self.delta_scaled(i) < self.delta_scaled(i + 1):
                raise ValueError(f"{self.variant.value}: Delta_{i} < Delta_{i + 1}")
        if self.omega_scaled(4) < 2 * self.delta_scaled(4):
            raise ValueError(f"{self.variant.value}: omega_4 < 2 * Delta_4")

    @property
    def budget(self) -> float:
        return SIMPLE_BUDGET if self.variant is Variant.SIMPLE else COMBINED_BUDGET

    def omega_scaled(self, i: int) -> int:
        if i < 3:
            return 0
        for d, w in self.scaled:
            if d == i:
                return w
        return i * SCALE // 2

    def delta_scaled(self, i: int) -> int:
        if i < 3:
            raise ValueError("Delta_i is defined for i >= 3")
        if i == 3:
            return self.omega_scaled(3)
        return self.omega_scaled(i) - self.omega_scaled(i - 1)

    def omega(self, i: int) -> float:
        return self.omega_scaled(i) / SCALE

    def delta(self, i: int) -> float:
        return self.delta_scaled(i) / SCALE

    @classmethod
    def get(cls, name) -> "WeightTable":
        v = Variant(name.value if isinstance(name, Variant) else str(name).lower())
        return SIMPLE if v is Variant.SIMPLE else COMBINED


SIMPLE = WeightTable(Variant.SIMPLE, ((3, 94_165), (4, 180_315)))
COMBINED = WeightTable(Variant.COMBINED, ((3, 95_210), (4, 183_200), (5, 248_800)))


def gamma_scaled(formula: Formula, weights: WeightTable = SIMPLE) -> int:
    return sum(weights.omega_scaled(w) for w in formula.weights().values())


def gamma(formula: Formula, weights: WeightTable = SIMPLE) -> float:
    """sum over i >= 3 of omega_i times the number of weight-i variables."""
    return gamma_scaled(formula, weights) / SCALE


def branching_number(vector: Sequence[float], budget: float) -> bool:
    """True iff sum_i 2**(-a_i / budget) <= 1, i.e. the vector fits the budget."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    if not vector or any(a <= 0 for a in vector):
        raise ValueError(f"branching vector entries must be positive: {vector}")
    return sum(2.0 ** (-a / budget) for a in vector) <= 1.0 + 1e-12


def branching_factor(vector: Sequence[float]) -> float:
    """The root c > 1 of sum_i c**(-a_i) = 1."""
    if not vector or any(a <= 0 for a in vector):
        raise ValueError(f"branching vector entries must be positive: {vector}")
    if len(vector) == 1:
        return 1.0
    f = lambda c: sum(c ** (-a) for a in vector) - 1.0
    hi = 2.0
    while f(hi) > 0:
        hi *= 2
    return brentq(f, 1.0 + 1e-12, hi, xtol=1e-14)


def budget_of(vector: Sequence[float]) -> float:
    """Largest budget tau with sum 2**(-a_i/tau) <= 1."""
    return 1.0 / math.log2(branching_factor(vector))


# -- symbolic branching vectors ----------------------------------------------

_TERM = re.compile(r"^(\d+)?\*?(w|d)(\d+)$|^(\d+(?:\.\d+)?)$")


@dataclass(frozen=True)
class Expr:
    """A non-negative integer combination of omega_i, Delta_i and a constant."""

    text: str

    def scaled(self, weights: WeightTable) -> int:
        total = 0
        for raw in self.text.replace(" ", "").split("+"):
            m = _TERM.match(raw)
            if not m:
                raise ValueError(f"bad term {raw!r} in {self.text!r}")
            if m.group(4) is not None:
                total += round(float(m.group(4)) * SCALE)
                continue
            coef = int(m.group(1) or 1)
            i = int(m.group(3))
            total += coef * (weights.omega_scaled(i) if m.group(2) == "w" else weights.delta_scaled(i))
        return total

    def value(self, weights: WeightTable) -> float:
        return self.scaled(weights) / SCALE


def E(text: str) -> Expr:
    return Expr(text)


@dataclass(frozen=True)
class VectorCase:
    priority: int
    subcase: str
    vector: Tuple[Expr, ...]

    def scaled(self, weights: WeightTable) -> Tuple[int, ...]:
        return tuple(e.scaled(weights) for e in self.vector)

    def values(self, weights: WeightTable) -> Tuple[float, ...]:
        return tuple(e.value(weights) for e in self.vector)


def _p7_cases():
    out = []
    for l in range(1, 5):
        out.append(VectorCase(7, f"P7-3path-l{l}", (E(f"w4+{l}w3+{6 - l}d4"), E(f"w4+{l}w3+{4 - l}d4"))))
        x = E(f"w4+{l + 1}w3+{5 - l}d4")
        out.append(VectorCase(7, f"P7-lasso-l{l}", (x, x)))
    for l in range(2, 5):
        out.append(VectorCase(7, f"P7-4path-l{l}", (E(f"2w4+{l - 1}w3+{5 - l}d4"), E(f"w4+{l - 1}w3+{5 - l}d4"))))
    return out


_P6_SYM = E("2w4+2w3+2d4")

# Non-regular branches, per priority and analysed sub-case.
NON_REGULAR_CASES: Tuple[VectorCase, ...] = tuple(
    [
        VectorCase(1, "P1", (E("7"), E("7"))),
        VectorCase(2, "P2", (E("w6+5d6+d5"), E("w6+5d6+d5"))),
        VectorCase(3, "P3", (E("w5+4d5+d4"), E("w5+4d5+d4"))),
        VectorCase(4, "P4", (E("2w4+4d4"), E("2w4+4d4"))),
        VectorCase(5, "P5-sequence", (E("3w4+2w3"), E("3w4+2w3"))),
        VectorCase(5, "P5-cycle", (E("10w4"), E("10w4"))),
        VectorCase(6, "P6-case2", (_P6_SYM, _P6_SYM)),
        VectorCase(6, "P6-case3a", (_P6_SYM, _P6_SYM)),
        VectorCase(6, "P6-case3b", (_P6_SYM, E("w4+2w3+2d4"))),
        VectorCase(6, "P6-case4", (_P6_SYM, _P6_SYM)),
        VectorCase(6, "P6-case5", (_P6_SYM, E("2w4+2w3"))),
    ]
    + _p7_cases()
    + [
        VectorCase(8, "P8-k1", (E("4w4"), E("4w4"))),
        VectorCase(8, "P8-k2", (_P6_SYM, _P6_SYM)),
        VectorCase(9, "P9", (E("8w3"), E("6w3"))),
        VectorCase(10, "P10-6w3-8w3", (E("6w3"), E("8w3"))),
        VectorCase(10, "P10-4w3-10w3", (E("4w3"), E("10w3"))),
    ]
)

# Regular and combined-analysis vectors of the final/internal h-regular branches.
REGULAR_CASES: Tuple[VectorCase, ...] = (
    VectorCase(0, "internal-4", (E("5w4"), E("w4+4d4"))),
    VectorCase(0, "internal-4-both", (E("5w4"), E("5w4"))),
    VectorCase(0, "internal-5", (E("3w5"), E("w5+5d5"))),
    VectorCase(0, "internal-5-both", (E("3w5"), E("3w5"))),
    VectorCase(0, "internal-6", (E("3w6"), E("w6+6d6"))),
    VectorCase(0, "internal-6-both", (E("3w6"), E("3w6"))),
    VectorCase(0, "final-4-after-internal", (E("6w4+4d4"), E("6w4+4d4"), E("w4+4d4"))),
    VectorCase(0, "final-4-after-internal-both", (E("6w4+4d4"),) * 4),
    VectorCase(0, "final-4-after-P458", (E("3w4+8d4"), E("3w4+8d4"), E("2w4+4d4"))),
    VectorCase(0, "final-4-after-P458-both", (E("3w4+8d4"),) * 4),
    VectorCase(0, "final-6", (E("3w6+w4+6d6"), E("3w6+w4+6d6"), E("w6+6d6"))),
    VectorCase(0, "final-6-both", (E("3w6+w4+6d6"),) * 4),
)

# Priority 10 is satisfied by either of two vectors.
_ALTERNATIVE_PRIORITIES = {10}


def cases_for(priority: int) -> List[VectorCase]:
    cases = [c for c in NON_REGULAR_CASES if c.priority == priority]
    if not cases:
        raise KeyError(f"no tabulated branching vector for priority {priority}")
    return cases


def _envelope(vectors: Iterable[Tuple[int, ...]]) -> Tuple[int, ...]:
    """Componentwise minimum of vectors sorted in descending order."""
    vs = [tuple(sorted(v, reverse=True)) for v in vectors]
    return tuple(min(col) for col in zip(*vs))


def expected_alternatives_scaled(priority: int, weights: WeightTable = SIMPLE) -> List[Tuple[int, ...]]:
    """Descending-sorted vectors; a measured branch must dominate at least one."""
    cases = cases_for(priority)
    if priority in _ALTERNATIVE_PRIORITIES:
        return [tuple(sorted(c.scaled(weights), reverse=True)) for c in cases]
    return [_envelope(c.scaled(weights) for c in cases)]


def expected_reduction(priority: int, subcase: Optional[str] = None, weights: WeightTable = SIMPLE) -> List[float]:
    """Per-branch minimum gamma reduction for ``priority``.

    With a known ``subcase`` the vector of that case is returned, otherwise
    the worst case over all tabulated sub-cases of the priority (for
    priority 10, the first of its two alternatives).
    """
    if subcase is not None:
        for c in cases_for(priority):
            if c.subcase == subcase:
                return list(c.values(weights))
    return [x / SCALE for x in expected_alternatives_scaled(priority, weights)[0]]


@dataclass(frozen=True)
class BranchVectorTable:
    weights: WeightTable

    def alternatives(self, priority: int, subcase: Optional[str] = None) -> List[Tuple[float, ...]]:
        """Vectors a branch must dominate (one of them suffices).

        A tabulated ``subcase`` (the tag without any ``/h-regular`` suffix)
        selects its own vector; otherwise the priority's worst case is used.
        """
        if subcase is not None and priority not in _ALTERNATIVE_PRIORITIES:
            base = subcase.split("/")[0]
            for c in cases_for(priority):
                if c.subcase == base:
                    return [tuple(sorted(c.values(self.weights), reverse=True))]
        return [tuple(x / SCALE for x in v) for v in expected_alternatives_scaled(priority, self.weights)]

    def audit(self, budget: Optional[float] = None, cases: Iterable[VectorCase] = NON_REGULAR_CASES) -> Dict[str, bool]:
        """branching_number verdict for every tabulated vector."""
        budget = self.weights.budget if budget is None else budget
        return {f"{c.priority}:{c.subcase}": branching_number(c.values(self.weights), budget) for c in cases}
