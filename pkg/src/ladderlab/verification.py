"""Finite-height verification of the asymptotic identities.

Every catalogued identity is evaluated as a ratio of two independently
computed sides at concrete parameters; the limits themselves are out of
reach, so acceptance works with ratio bands and with trends along parameter
grids.  The catalogue is total: every formula id maps to exactly one recipe.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import legendre

from .constants import CONSTANTS
from .errors import CapacityError  # noqa: F401  (re-exported for callers)
from .ladder import LadderSolverConfig
from .primes import logarithmic_integral, prime_count
from .puzzles import PuzzleVector, builtin_vectors_k4, evaluate_puzzle
from .quadrature import integrate, iterated_product_integral
from .report import RatioReport, TrendReport  # noqa: F401
from .workbench import Workbench  # noqa: F401


# -- Fermat rationals ---------------------------------------------------------


@dataclass(frozen=True)
class FermatRational:
    """(x^n + y^n) / z^n with natural x, y, z and n >= 3.

    The numerator and denominator are exact integers; ``value`` is their
    correctly rounded double.  Equality with 1 is decided by integer
    arithmetic only.
    """

    x: int
    y: int
    z: int
    n: int

    def __post_init__(self):
        for name in ("x", "y", "z", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.n < 3:
            raise ValueError(f"exponent n must be >= 3, got {self.n}")

    @property
    def numerator(self):
        return self.x**self.n + self.y**self.n

    @property
    def denominator(self):
        return self.z**self.n

    @property
    def value(self):
        return float(Fraction(self.numerator, self.denominator))

    @property
    def is_exactly_one(self):
        return self.numerator == self.denominator

    def __str__(self):
        return f"({self.x}^{self.n}+{self.y}^{self.n})/{self.z}^{self.n}"


# -- functionals ---------------------------------------------------------------

# The prime-count transforms evaluate the ladder at heights scaled down by
# a(1-c) ~ 38, so a tau of 10^3 lands near height 26; they run with a
# relaxed ladder floor instead of the default 100.
_SCALED_SOLVER = LadderSolverConfig(t_min=15.0)


def functional_F(x, tau, bench):
    """Finite-tau approximant of the product functional with limit x.

    (1/tau) * [integral of -P between the inverse heights of x*tau and of
    its reverse iterate] * [critical-line integral over the reverse-iterate
    window of length 1/(a(1-c))].
    """
    x = float(x)
    tau = float(tau)
    if x <= 0.0:
        raise ValueError(f"functional_F needs x > 0, got {x}")
    T = x * tau
    if T < bench.ladder_floor:
        raise ValueError(
            f"x*tau = {T:g} below the ladder floor {bench.ladder_floor:g}"
        )
    t1 = bench.reverse_endpoint(T)
    span = bench.remainder_span(
        bench.inverse_height(T), bench.inverse_height(t1)
    )
    window = 1.0 / (CONSTANTS.a * CONSTANTS.one_minus_c)
    t2 = bench.reverse_endpoint(T + window)
    zeta_part = bench.J(t2) - bench.J(t1)
    return span * zeta_part / tau


def functional_G(x, rho, bench):
    """Finite-rho approximant of the remainder-to-prime-count functional."""
    x = float(x)
    rho = float(rho)
    if x <= 0.0:
        raise ValueError(f"functional_G needs x > 0, got {x}")
    arg = x * rho / (CONSTANTS.a * CONSTANTS.one_minus_c)
    if arg < _SCALED_SOLVER.t_min:
        raise ValueError(
            f"scaled argument {arg:g} below the ladder floor "
            f"{_SCALED_SOLVER.t_min:g}"
        )
    t1 = bench.reverse_endpoint(arg, solver=_SCALED_SOLVER)
    span = bench.remainder_span(
        bench.inverse_height(arg), bench.inverse_height(t1)
    )
    return span / prime_count(bench.store, rho)


@dataclass(frozen=True)
class FermatTrendReport:
    """Trend of the product functional at a Fermat rational."""

    rational: FermatRational
    grid: tuple
    values: tuple
    distance_from_one: tuple
    target: float
    exact_is_one: bool

    @property
    def improving(self):
        if len(self.values) < 2:
            return True
        return abs(self.values[-1] - self.target) <= abs(
            self.values[0] - self.target
        )


def fermat_functional(q, tau_grid, bench):
    """Evaluate the product functional at q.value along a tau grid.

    The exact-equality verdict (is the rational exactly 1?) comes from
    integer arithmetic, never from the floating trend.
    """
    if not isinstance(q, FermatRational):
        raise ValueError("q must be a FermatRational")
    grid = tuple(float(t) for t in tau_grid)
    if any(b <= a for a, b in zip(grid[:-1], grid[1:])):
        raise ValueError("tau grid must be strictly increasing")
    values = tuple(functional_F(q.value, tau, bench) for tau in grid)
    return FermatTrendReport(
        rational=q,
        grid=grid,
        values=values,
        distance_from_one=tuple(abs(v - 1.0) for v in values),
        target=q.value,
        exact_is_one=q.is_exactly_one,
    )


# -- the double integral --------------------------------------------------------


@dataclass(frozen=True)
class Q2Region:
    """Rectangle (u, v) for the remainder/critical-line double integral."""

    T: float
    u_interval: tuple
    v_interval: tuple


def q2_region(T, bench):
    T = float(T)
    t1 = bench.reverse_endpoint(T)
    t2 = bench.reverse_endpoint(T + 1.0 / CONSTANTS.a)
    u = (bench.inverse_height(T), bench.inverse_height(t1))
    v = (t1, t2)
    if not (u[0] < u[1] and v[0] < v[1]):
        raise ValueError(f"degenerate rectangle at T={T:g}")
    return Q2Region(T=T, u_interval=u, v_interval=v)


def _minus_p_quadrature(store, a, b, order=8):
    """Integral of -P(u) = li(u) - pi(u) over [a, b] by prime-aligned panels.

    pi is constant between consecutive primes, so panels aligned to the
    jumps integrate the step part exactly and leave only the smooth li part
    to Gauss-Legendre.  Serves as the independent cross-check of the
    closed-form remainder integral.
    """
    ps = store.primes_between(math.nextafter(a, b), b)
    edges = np.concatenate(([a], ps.astype(float), [b]))
    edges = np.unique(edges)
    xg, wg = legendre.leggauss(order)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mids[:, None] + half[:, None] * xg
    li_part = float(((logarithmic_integral(nodes) @ wg) * half).sum())
    counts = np.array([prime_count(store, e) for e in edges[:-1]], dtype=float)
    step_part = float((counts * (edges[1:] - edges[:-1])).sum())
    return li_part - step_part


def double_integral_Q2(T, mode, bench):
    """The rectangle integral of -P(u) * |zeta(1/2+iv)|^2 over Q2(T).

    ``separable`` multiplies the closed-form remainder integral by the
    quadrature of the critical-line factor; ``grid2d`` replaces the closed
    form with pointwise quadrature of -P on prime-aligned panels (outer)
    times the same inner factor, as an independent route.
    """
    if mode not in ("separable", "grid2d"):
        raise ValueError(f"mode must be 'separable' or 'grid2d', got {mode!r}")
    region = q2_region(T, bench)
    u0, u1 = region.u_interval
    v0, v1 = region.v_interval
    inner = integrate(bench.zeta.zeta_sq, v0, v1, bench.quad)
    if mode == "separable":
        outer = bench.remainder_span(u0, u1)
    else:
        outer = _minus_p_quadrature(bench.store, u0, u1)
    return outer * inner


# -- formula catalogue -----------------------------------------------------------


def _chain_increment(bench, T, r):
    chain = bench.reverse(T, r)
    return chain, chain.hl_increments[r - 1], chain.rung(r - 1)


def _recipe_e2_6(bench, p):
    _, increment, prev = _chain_increment(bench, p["T"], p["r"])
    return increment, CONSTANTS.one_minus_c * prev


def _recipe_e2_10(bench, p):
    chain = bench.reverse(p["T"], p["r"] + 1)
    return chain.gaps[p["r"]], chain.gaps[p["r"] - 1]


def _recipe_e2_13(bench, p):
    chain = bench.reverse(p["T"], p["r"] + 1)
    return chain.hl_increments[p["r"]], chain.hl_increments[p["r"] - 1]


def _remainder_rung_span(bench, chain, r):
    lo = bench.inverse_height(chain.rung(r - 1))
    hi = bench.inverse_height(chain.rung(r))
    return bench.remainder_span(lo, hi)


def _recipe_e3_5(bench, p):
    T, r = p["T"], p["r"]
    chain = bench.reverse(T, r)
    lhs = _remainder_rung_span(bench, chain, r)
    rhs = CONSTANTS.a * CONSTANTS.one_minus_c * T / math.log(T)
    return lhs, rhs


def _recipe_e3_9(bench, p):
    T, r = p["T"], p["r"]
    chain = bench.reverse(T, r + 1)
    return (
        _remainder_rung_span(bench, chain, r + 1),
        _remainder_rung_span(bench, chain, r),
    )


def _recipe_e3_10(bench, p):
    return _recipe_e3_5(bench, {"T": p["T"], "r": 1})


def _recipe_e3_13(bench, p):
    T, half_window = p["T"], p["l"]
    t1 = bench.reverse_endpoint(T)
    t2 = bench.reverse_endpoint(T + 2.0 * half_window)
    lhs = bench.remainder_span(
        bench.inverse_height(T), bench.inverse_height(t1)
    ) * (bench.J(t2) - bench.J(t1))
    rhs = 2.0 * half_window * CONSTANTS.a * CONSTANTS.one_minus_c * T
    return lhs, rhs


def _recipe_e3_16(bench, p):
    return functional_F(p["x"], p["tau"], bench), p["x"]


def _recipe_e3_17(bench, p):
    q = FermatRational(p["x"], p["y"], p["z"], p["n"])
    return functional_F(q.value, p["tau"], bench), q.value


def _recipe_e4_3(bench, p):
    tau = p["tau"]
    arg = tau / (CONSTANTS.a * CONSTANTS.one_minus_c)
    t1 = bench.reverse_endpoint(arg, solver=_SCALED_SOLVER)
    lhs = bench.remainder_span(
        bench.inverse_height(arg), bench.inverse_height(t1)
    )
    return lhs, tau / math.log(tau)


def _recipe_e4_5(bench, p):
    lhs, _ = _recipe_e4_3(bench, p)
    return lhs, float(prime_count(bench.store, p["tau"]))


def _recipe_e4_11(bench, p):
    return functional_G(p["x"], p["rho"], bench), p["x"]


def _recipe_e5_3(bench, p):
    T = p["T"]
    t1 = bench.reverse_endpoint(T)
    t2 = bench.reverse_endpoint(T + 1.0 / CONSTANTS.a)
    lhs = bench.J(t1) - bench.J(T)
    rhs = bench.remainder_span(
        bench.inverse_height(T), bench.inverse_height(t1)
    ) * (bench.J(t2) - bench.J(t1))
    return lhs, rhs


def _recipe_e5_5(bench, p):
    T = p["T"]
    lhs = double_integral_Q2(T, p.get("mode", "separable"), bench)
    return lhs, CONSTANTS.one_minus_c * T


def _recipe_e5_12(bench, p):
    T, k = p["T"], p["k"]
    lhs = bench.remainder_span(
        2.0, bench.inverse_height(T * math.log(T) ** k)
    )
    t1 = bench.reverse_endpoint(T)
    window = CONSTANTS.a / CONSTANTS.one_minus_c
    product_part = iterated_product_integral(bench, T, k, window, bench.quad)
    rhs = (bench.J(t1) - bench.J(T)) * product_part
    return lhs, rhs


def _recipe_e6_14(bench, p):
    exponents = p.get("exponents")
    vector = (
        PuzzleVector(tuple(exponents))
        if exponents is not None
        else builtin_vectors_k4()[0]
    )
    report = evaluate_puzzle(p["T"], vector, bench)
    return report.lhs, report.rhs


@dataclass(frozen=True)
class FormulaRecipe:
    grid_param: str
    defaults: dict
    fn: object
    summary: str


FORMULA_CATALOG = {
    "E2.6": FormulaRecipe(
        "T", {"r": 1}, _recipe_e2_6,
        "critical-line increment over one reverse rung vs (1-c) * lower rung",
    ),
    "E2.10": FormulaRecipe(
        "T", {"r": 1}, _recipe_e2_10, "consecutive reverse gaps, pair ratio"
    ),
    "E2.13": FormulaRecipe(
        "T", {"r": 1}, _recipe_e2_13,
        "consecutive critical-line increments, pair ratio",
    ),
    "E3.5": FormulaRecipe(
        "T", {"r": 1}, _recipe_e3_5,
        "remainder increment over one rung vs a(1-c) T / ln T",
    ),
    "E3.9": FormulaRecipe(
        "T", {"r": 1}, _recipe_e3_9, "consecutive remainder increments"
    ),
    "E3.10": FormulaRecipe(
        "T", {}, _recipe_e3_10, "first remainder increment vs a(1-c) T / ln T"
    ),
    "E3.13": FormulaRecipe(
        "T",
        {"l": 1.0 / (2.0 * CONSTANTS.a * CONSTANTS.one_minus_c)},
        _recipe_e3_13,
        "remainder increment times window integral vs 2 l a (1-c) T",
    ),
    "E3.16": FormulaRecipe(
        "tau", {"x": 1.0}, _recipe_e3_16, "product functional vs its limit x"
    ),
    "E3.17": FormulaRecipe(
        "tau", {"x": 1, "y": 1, "z": 1, "n": 3}, _recipe_e3_17,
        "product functional at a Fermat rational vs the rational",
    ),
    "E4.3": FormulaRecipe(
        "tau", {}, _recipe_e4_3, "scaled remainder increment vs tau / ln tau"
    ),
    "E4.5": FormulaRecipe(
        "tau", {}, _recipe_e4_5, "scaled remainder increment vs pi(tau)"
    ),
    "E4.11": FormulaRecipe(
        "rho", {"x": 1.0}, _recipe_e4_11, "prime-normalized functional vs x"
    ),
    "E5.3": FormulaRecipe(
        "T", {}, _recipe_e5_3,
        "one-rung critical-line integral vs remainder increment times window",
    ),
    "E5.5": FormulaRecipe(
        "T", {"mode": "separable"}, _recipe_e5_5,
        "rectangle double integral vs (1-c) T",
    ),
    "E5.12": FormulaRecipe(
        "T", {"k": 1}, _recipe_e5_12,
        "remainder head integral vs one-rung integral times iterated product",
    ),
    "E6.14": FormulaRecipe(
        "T", {}, _recipe_e6_14,
        "remainder head integral vs multiplicative window decomposition",
    ),
}

FORMULA_IDS = tuple(FORMULA_CATALOG)


def evaluate_formula(formula, params, bench):
    """Evaluate one catalogued identity and return its :class:`RatioReport`."""
    if formula not in FORMULA_CATALOG:
        raise ValueError(
            f"unknown formula {formula!r}; valid ids: {', '.join(FORMULA_IDS)}"
        )
    recipe = FORMULA_CATALOG[formula]
    merged = dict(recipe.defaults)
    merged.update(params or {})
    start = time.perf_counter()
    lhs, rhs = recipe.fn(bench, merged)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    if rhs == 0.0:
        raise ArithmeticError(f"{formula}: right-hand side evaluated to zero")
    return RatioReport(
        formula=formula,
        params=merged,
        lhs=float(lhs),
        rhs=float(rhs),
        ratio=float(lhs) / float(rhs),
        elapsed_ms=elapsed_ms,
    )
