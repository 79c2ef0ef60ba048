"""Numerical laboratory for ladder transforms of the critical line and
prime-counting remainder integrals.

The library builds three layers:

1. kernels: a segmented prime store with closed-form remainder integrals
   (:mod:`ladderlab.primes`) and a hybrid Hardy-Z evaluator
   (:mod:`ladderlab.zeta`);
2. machinery: oscillation-aware quadrature with a persistent cumulative
   integral cache (:mod:`ladderlab.quadrature`) and the implicit ladder map
   with forward/reverse iteration (:mod:`ladderlab.ladder`);
3. experiments: a catalogue of finite-height ratio checks, functionals, and
   multiplicative window puzzles (:mod:`ladderlab.verification`,
   :mod:`ladderlab.puzzles`), fronted by the ``ladderlab`` CLI.
"""

from .constants import CONSTANTS, MathConstants
from .errors import CacheIntegrityError, CapacityError, LadderLabError
from .ladder import (
    LadderSolverConfig,
    ReverseChain,
    forward_iterate,
    ladder_value,
    reverse_iterate,
)
from .primes import (
    PrimeStore,
    RemainderQuery,
    build_prime_store,
    ingham_integral,
    inverse_ingham,
    load_prime_store,
    logarithmic_integral,
    prime_count,
    remainder,
    remainder_integral,
    save_prime_store,
)
from .puzzles import (
    Partition,
    PuzzleVector,
    builtin_vectors_k4,
    evaluate_puzzle,
    partition_count,
    partitions,
    solve_free_component,
)
from .quadrature import (
    IntegralCache,
    QuadratureConfig,
    hl_integral,
    integrate,
    iterated_product_integral,
    load_integral_cache,
    save_integral_cache,
)
from .report import RatioReport, TrendReport
from .verification import (
    FORMULA_IDS,
    FermatRational,
    FermatTrendReport,
    Q2Region,
    double_integral_Q2,
    evaluate_formula,
    fermat_functional,
    functional_F,
    functional_G,
)
from .workbench import Workbench
from .zeta import CriticalLineEvaluator, hardy_z, theta, zeta_sq

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "CacheIntegrityError",
    "CapacityError",
    "CriticalLineEvaluator",
    "FORMULA_IDS",
    "FermatRational",
    "FermatTrendReport",
    "IntegralCache",
    "LadderLabError",
    "LadderSolverConfig",
    "MathConstants",
    "Partition",
    "PrimeStore",
    "PuzzleVector",
    "Q2Region",
    "QuadratureConfig",
    "RatioReport",
    "RemainderQuery",
    "ReverseChain",
    "TrendReport",
    "Workbench",
    "build_prime_store",
    "builtin_vectors_k4",
    "double_integral_Q2",
    "evaluate_formula",
    "evaluate_puzzle",
    "fermat_functional",
    "forward_iterate",
    "functional_F",
    "functional_G",
    "hardy_z",
    "hl_integral",
    "ingham_integral",
    "integrate",
    "inverse_ingham",
    "iterated_product_integral",
    "ladder_value",
    "load_integral_cache",
    "load_prime_store",
    "logarithmic_integral",
    "partition_count",
    "partitions",
    "prime_count",
    "remainder",
    "remainder_integral",
    "reverse_iterate",
    "save_integral_cache",
    "save_prime_store",
    "solve_free_component",
    "theta",
    "zeta_sq",
]
