"""The height ladder: an increasing map defined implicitly by J(T).

``ladder_value(T)`` returns the unique Y > 1 with

    Y ln Y + (c - ln 2pi) Y = J(T),

where J is the cumulative critical-line integral.  This normalization makes
the defect T - ladder_value(T) scale like (1-c) T / ln T, and it makes the
increment of J between consecutive reverse iterates almost linear in the
starting height.  Reverse iterates climb the ladder upward by bracketed
root-finding; forward iterates descend by repeated application.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import CONSTANTS
from .errors import CapacityError
from .quadrature import hl_integral, hl_integral_many

#: Default floor: below this height the asymptotic regime is meaningless.
T_MIN = 100.0

#: Hard floor for any configured t_min (the solver needs J(t) comfortably > 0).
T_MIN_HARD = 10.0

# g(Y) = Y ln Y + LADDER_SHIFT * Y is the defining left-hand side.
LADDER_SHIFT = CONSTANTS.c - CONSTANTS.ln_two_pi


@dataclass(frozen=True)
class LadderSolverConfig:
    """Newton solve tolerances and the supported height floor.

    Recipes that scale their argument far below the nominal height (the
    prime-count transforms divide by a(1-c) ~ 38) may relax ``t_min`` down
    to ``T_MIN_HARD``; everything else should keep the default.
    """

    newton_tol: float = 1e-12
    max_iter: int = 64
    t_min: float = T_MIN

    def __post_init__(self):
        if not self.newton_tol > 0.0:
            raise ValueError("newton_tol must be positive")
        if self.t_min < T_MIN_HARD:
            raise ValueError(f"t_min must be >= {T_MIN_HARD:g}")


def ladder_target(Y):
    """Left-hand side of the defining equation at height Y."""
    return Y * np.log(Y) + LADDER_SHIFT * Y


def _solve_ladder(j_value, cfg):
    """Solve Y ln Y + shift*Y = j_value by Newton with a bisection fallback."""
    y = max(j_value / math.log(j_value + 3.0), 4.0)
    for _ in range(4):
        y = j_value / (math.log(y) + LADDER_SHIFT)
    lo, hi = 2.0, max(2.0 * y, 16.0)
    for _ in range(cfg.max_iter):
        g = y * math.log(y) + LADDER_SHIFT * y - j_value
        if g > 0:
            hi = min(hi, y)
        else:
            lo = max(lo, y)
        step = g / (math.log(y) + 1.0 + LADDER_SHIFT)
        y_new = y - step
        if not lo <= y_new <= hi:
            y_new = 0.5 * (lo + hi)
        y = y_new
        if abs(g) <= cfg.newton_tol * max(abs(j_value), 1.0):
            return y
    residual = abs(y * math.log(y) + LADDER_SHIFT * y - j_value)
    raise ArithmeticError(
        f"ladder solve did not converge: residual {residual:.3e} "
        f"after {cfg.max_iter} iterations"
    )


def ladder_value(T, cache, cfg=None):
    """The ladder map at T: the Y solving the defining equation with J(T)."""
    T = float(T)
    cfg = cfg or LadderSolverConfig()
    if T < cfg.t_min:
        raise ValueError(f"ladder_value needs T >= {cfg.t_min:g}, got {T:g}")
    j = hl_integral(T, cache, cache.config)
    return _solve_ladder(j, cfg)


def ladder_value_many(ts, cache, cfg=None):
    """Vectorized ladder map; raises CapacityError below the supported floor."""
    ts = np.asarray(ts, dtype=float)
    cfg = cfg or LadderSolverConfig()
    if np.any(ts < cfg.t_min):
        raise CapacityError(
            f"ladder iterate fell below the supported floor {cfg.t_min:g}"
        )
    js = hl_integral_many(ts, cache, cache.config)
    ys = np.maximum(js / np.log(js + 3.0), 4.0)
    for _ in range(4):
        ys = js / (np.log(ys) + LADDER_SHIFT)
    for _ in range(cfg.max_iter):
        g = ys * np.log(ys) + LADDER_SHIFT * ys - js
        if np.all(np.abs(g) <= cfg.newton_tol * np.maximum(np.abs(js), 1.0)):
            return ys
        ys = ys - g / (np.log(ys) + 1.0 + LADDER_SHIFT)
    raise ArithmeticError("vectorized ladder solve did not converge")


def forward_iterate(t, r, cache, cfg=None):
    """r-fold application of the ladder map; identity at r = 0."""
    t = float(t)
    cfg = cfg or LadderSolverConfig()
    if r < 0:
        raise ValueError(f"forward_iterate needs r >= 0, got {r}")
    if t < cfg.t_min:
        raise ValueError(f"forward_iterate needs t >= {cfg.t_min:g}, got {t:g}")
    current = t
    for _ in range(int(r)):
        if current < cfg.t_min:
            raise CapacityError(
                f"forward iterate fell below the supported floor {cfg.t_min:g} "
                f"(reached {current:g})"
            )
        current = ladder_value(current, cache, cfg)
    return current


@dataclass
class ReverseChain:
    """A base height with its reverse iterates and their diagnostics.

    ``iterates[r-1]`` is the r-fold reverse iterate; ``gaps`` are the
    consecutive differences starting from the base; ``hl_increments`` are the
    integrals of |zeta(1/2+it)|^2 over each rung.
    """

    base: float
    iterates: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    hl_increments: list = field(default_factory=list)

    def rung(self, r):
        """The r-fold reverse iterate, with rung(0) = base."""
        return self.base if r == 0 else self.iterates[r - 1]


def reverse_iterate(T, k, cache, cfg=None):
    """Climb k reverse rungs above T by bracketed root-finding.

    Each rung solves ``ladder_value(X) = previous`` on a bracket seeded by
    the expected gap (1-c) X / ln X, expanded geometrically when needed.
    """
    T = float(T)
    cfg = cfg or LadderSolverConfig()
    if k < 1:
        raise ValueError(f"reverse_iterate needs k >= 1, got {k}")
    if T < cfg.t_min:
        raise ValueError(f"reverse_iterate needs T >= {cfg.t_min:g}, got {T:g}")
    max_height = cache.evaluator.max_height

    iterates = []
    prev = T
    for _ in range(int(k)):
        lo = prev
        hi = prev * (1.0 + 2.0 * CONSTANTS.one_minus_c / math.log(prev))
        while ladder_value(hi, cache, cfg) < prev:
            span = hi - prev
            hi = prev + 2.0 * span
            if hi > max_height:
                raise CapacityError(
                    f"reverse iterate needs heights beyond the evaluator "
                    f"range {max_height:g} (bracket reached {hi:g})"
                )
        root = brentq(
            lambda x: ladder_value(x, cache, cfg) - prev,
            lo,
            hi,
            xtol=max(1e-14 * prev, 1e-12),
            rtol=8.9e-16,
            maxiter=200,
        )
        if root <= prev:
            raise ArithmeticError(
                f"reverse iterate ordering violated: {root:g} <= {prev:g}"
            )
        iterates.append(float(root))
        prev = float(root)

    chain = ReverseChain(base=T, iterates=iterates)
    heights = [T] + iterates
    js = [hl_integral(h, cache, cache.config) for h in heights]
    chain.gaps = [b - a for a, b in zip(heights[:-1], heights[1:])]
    chain.hl_increments = [jb - ja for ja, jb in zip(js[:-1], js[1:])]
    return chain
