"""One handle bundling the stores and configs every experiment needs.

A :class:`Workbench` owns a prime store, a critical-line evaluator, the
cumulative-integral cache, and the solver/quadrature configs, and exposes the
small set of composite queries the verification recipes are written in.  It
also satisfies the ladder-handle protocol used by
:func:`ladderlab.quadrature.iterated_product_integral` (``cache``,
``reverse_endpoint``, ``forward_many``).
"""

from dataclasses import dataclass

from .ladder import LadderSolverConfig, ladder_value, ladder_value_many, reverse_iterate
from .primes import PrimeStore, build_prime_store, inverse_ingham, remainder_integral
from .quadrature import IntegralCache, QuadratureConfig, hl_integral, integrate
from .zeta import CriticalLineEvaluator


@dataclass
class Workbench:
    store: PrimeStore
    zeta: CriticalLineEvaluator
    cache: IntegralCache
    quad: QuadratureConfig
    solver: LadderSolverConfig

    @classmethod
    def create(
        cls,
        sieve_limit=100_000_000,
        zeta_range=1.0e7,
        rel_tol=1e-6,
        store=None,
        evaluator=None,
    ):
        """Build a workbench from scratch (or around an existing store)."""
        store = store if store is not None else build_prime_store(sieve_limit)
        evaluator = evaluator or CriticalLineEvaluator(max_height=1.2 * zeta_range)
        quad = QuadratureConfig(rel_tol=rel_tol)
        cache = IntegralCache(evaluator, quad)
        return cls(
            store=store,
            zeta=evaluator,
            cache=cache,
            quad=quad,
            solver=LadderSolverConfig(),
        )

    # -- composite queries ----------------------------------------------------

    def J(self, T):
        """Cumulative critical-line integral up to T."""
        return hl_integral(T, self.cache, self.quad)

    def phi(self, T, solver=None):
        """The ladder map at T."""
        return ladder_value(T, self.cache, solver or self.solver)

    def reverse(self, T, k=1, solver=None):
        """Reverse chain of k rungs above T."""
        return reverse_iterate(T, k, self.cache, solver or self.solver)

    def reverse_endpoint(self, T, k=1, solver=None):
        """The k-fold reverse iterate of T."""
        return self.reverse(T, k, solver=solver).iterates[-1]

    def forward_many(self, ts):
        """One ladder application, vectorized."""
        return ladder_value_many(ts, self.cache, self.solver)

    def inverse_height(self, G):
        """First height where the cumulative remainder integral reaches -a*G."""
        return inverse_ingham(self.store, G)

    def remainder_span(self, A, B):
        """Integral of -P over [A, B] (closed form)."""
        return remainder_integral(self.store, A, B)

    def zeta_sq_span(self, A, B):
        """Integral of |zeta(1/2+it)|^2 over [A, B] by quadrature."""
        return integrate(self.zeta.zeta_sq, A, B, self.quad)

    @property
    def ladder_floor(self):
        return self.solver.t_min
