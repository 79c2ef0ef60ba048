"""Partitions, product-constraint vectors, and multiplicative decompositions.

A puzzle vector is a tuple of window lengths whose product equals a = e^4.5;
the stored representation is the exponent list, so the product constraint is
the exact additive constraint ``sum(exponents) = 4.5`` and never drifts
under rounding.  ``evaluate_puzzle`` compares the head remainder integral up
to the inverse height of ln^k T against the product of critical-line window
integrals above the reverse iterate of T.
"""

import math
import time
from collections import Counter
from dataclasses import dataclass

from .constants import CONSTANTS
from .report import RatioReport

#: Exponent-sum target: ln(a) = 4.5 exactly.
EXPONENT_SUM = 4.5

#: Validation tolerance for user-supplied exponent lists.
EXPONENT_TOL = 1e-9

_PARTITION_ENUM_CAP = 100
_PARTITION_COUNT_CAP = 10_000


@dataclass(frozen=True)
class Partition:
    """A non-increasing tuple of positive integers."""

    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ValueError("partition must be non-empty")
        if any(p < 1 for p in self.parts):
            raise ValueError("partition parts must be positive")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("partition parts must be non-increasing")

    @property
    def total(self):
        return sum(self.parts)


def _gen_partitions(n, max_part):
    if n == 0:
        yield ()
        return
    for first in range(1, min(n, max_part) + 1):
        for rest in _gen_partitions(n - first, first):
            yield (first,) + rest


def partitions(k):
    """All partitions of k in canonical (lexicographic, non-increasing) order."""
    if not 1 <= k <= _PARTITION_ENUM_CAP:
        raise ValueError(
            f"partition enumeration supports 1 <= k <= {_PARTITION_ENUM_CAP}"
        )
    return [Partition(p) for p in _gen_partitions(k, k)]


_pcount_table = [1]  # p(0) = 1


def partition_count(k):
    """p(k), exact, by the pentagonal-number recurrence over a memo table."""
    if not 1 <= k <= _PARTITION_COUNT_CAP:
        raise ValueError(
            f"partition_count supports 1 <= k <= {_PARTITION_COUNT_CAP}"
        )
    while len(_pcount_table) <= k:
        n = len(_pcount_table)
        total = 0
        j = 1
        while True:
            g1 = n - j * (3 * j - 1) // 2
            g2 = n - j * (3 * j + 1) // 2
            if g1 < 0 and g2 < 0:
                break
            term = 0
            if g1 >= 0:
                term += _pcount_table[g1]
            if g2 >= 0:
                term += _pcount_table[g2]
            total += term if j % 2 == 1 else -term
            j += 1
        _pcount_table.append(total)
    return _pcount_table[k]


@dataclass(frozen=True)
class PuzzleVector:
    """Window lengths stored as exponents; their product must equal e^4.5."""

    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        if len(self.exponents) < 2:
            raise ValueError("a puzzle vector needs at least two components")
        if any(not math.isfinite(e) for e in self.exponents):
            raise ValueError("exponents must be finite")
        total = math.fsum(self.exponents)
        if abs(total - EXPONENT_SUM) > EXPONENT_TOL:
            raise ValueError(
                f"exponents must sum to {EXPONENT_SUM} "
                f"(got {total!r}, off by {total - EXPONENT_SUM:.3e})"
            )

    @property
    def factors(self):
        return tuple(math.exp(e) for e in self.exponents)

    @property
    def k(self):
        return len(self.exponents)


def builtin_vectors_k4():
    """The five length-4 solutions derived from the partitions of 4."""
    return [
        PuzzleVector((0.0, 1.0, 1.5, 2.0)),
        PuzzleVector((0.25, 0.25, 1.0, 3.0)),
        PuzzleVector((0.25, 0.25, 2.0, 2.0)),
        PuzzleVector((1.5, 1.5, 1.5, 0.0)),
        PuzzleVector((1.125, 1.125, 1.125, 1.125)),
    ]


def solve_free_component(partial):
    """Complete k-1 window lengths with the one that restores the product a.

    Input values are the window lengths themselves (not exponents); the free
    component is placed first.
    """
    factors = [float(f) for f in partial]
    if not factors:
        raise ValueError("need at least one fixed component")
    if any(f <= 0.0 for f in factors):
        raise ValueError("window lengths must be positive")
    exponents = [math.log(f) for f in factors]
    free = EXPONENT_SUM - math.fsum(exponents)
    return PuzzleVector((free, *exponents))


def evaluate_puzzle(T, vector, bench):
    """Compare the head remainder integral with the window-product decomposition.

    lhs: integral of -P from 2 up to the inverse height of ln^k T.
    rhs: product over the vector's windows of the critical-line integral
    between the reverse iterates of T and of T + window.

    Repeated windows are integrated once and raised to their multiplicity,
    which also makes the result invariant under permutations of the vector.
    """
    T = float(T)
    if not isinstance(vector, PuzzleVector):
        raise ValueError("vector must be a PuzzleVector")
    start = time.perf_counter()
    k = vector.k
    lhs = bench.remainder_span(
        2.0, bench.inverse_height(math.log(T) ** k)
    )
    t1 = bench.reverse_endpoint(T)
    j1 = bench.J(t1)
    rhs = 1.0
    for factor, multiplicity in sorted(Counter(vector.factors).items()):
        upper = bench.reverse_endpoint(T + factor)
        span = bench.J(upper) - j1
        rhs *= span**multiplicity
    elapsed_ms = (time.perf_counter() - start) * 1e3
    return RatioReport(
        formula="E6.14",
        params={"T": T, "exponents": vector.exponents},
        lhs=lhs,
        rhs=rhs,
        ratio=lhs / rhs,
        elapsed_ms=elapsed_ms,
    )
