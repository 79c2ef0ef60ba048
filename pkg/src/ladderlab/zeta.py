"""Hardy Z function and |zeta(1/2+it)|^2 on the critical line.

Two methods back one evaluator:

* Riemann-Siegel above the crossover height: main sum of
  ``floor(sqrt(t/2pi))`` terms plus the first two correction terms of the
  asymptotic series, giving pointwise error well below 1e-4.
* Euler-Maclaurin below the crossover (and down to t = 0 for the cumulative
  integral): direct evaluation of zeta(1/2+it) rotated by the exact phase,
  accurate to ~1e-13.

The correction terms need the entire function

    Psi(p) = cos(2*pi*(p^2 - p - 1/16)) / cos(2*pi*p)

and its third derivative.  Both are evaluated through Chebyshev tables that
are built once per process from a singularity-free form of Psi (the zeros of
the denominator at p = 1/4 + m/2 are removable) and a contour-integral
derivative, then reused for every call.
"""

import math
import os

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import bernoulli, loggamma

from .constants import TWO_PI
from .errors import CapacityError

try:  # pragma: no cover - exercised implicitly through the dispatch below
    if os.environ.get("LADDERLAB_NO_NUMBA"):
        raise ImportError("numba disabled by LADDERLAB_NO_NUMBA")
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


# -- Riemann-Siegel phase ----------------------------------------------------


def theta(t):
    """Riemann-Siegel phase by its asymptotic series, for t >= 10.

    theta(t) = t/2 ln(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3); the first
    omitted term is below 4e-9 already at t = 10.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 10.0):
        raise ValueError("theta series needs t >= 10")
    out = _theta_series(arr)
    return float(out) if arr.ndim == 0 else out


def _theta_series(arr):
    return (
        0.5 * arr * np.log(arr / TWO_PI)
        - 0.5 * arr
        - math.pi / 8.0
        + 1.0 / (48.0 * arr)
        + 7.0 / (5760.0 * arr**3)
    )


def _theta_exact(arr):
    """Phase via the complex log-gamma; valid for every t >= 0."""
    return np.imag(loggamma(0.25 + 0.5j * arr)) - 0.5 * arr * math.log(math.pi)


# -- stable Psi and its correction tables ------------------------------------


def _sin_poly(x):
    # sin(x)/x as a short series; used only for |x| < ~0.35
    x2 = x * x
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))


def _psi_point(z):
    """Psi at one (possibly complex) point, stable near p = 1/4 + m/2."""
    m = round((z.real if isinstance(z, complex) else z) * 2.0 - 0.5)
    z0 = 0.25 + m / 2.0
    h = z - z0
    if abs(h) > 0.05:
        return np.cos(TWO_PI * (z * z - z - 0.0625)) / np.cos(TWO_PI * z)
    # both numerator and denominator vanish linearly at z0; factor the sines
    alpha = z0 * z0 - z0 - 0.0625
    scale = math.sin(TWO_PI * alpha) / math.sin(TWO_PI * z0)
    slope = 2.0 * z0 - 1.0
    if h == 0:
        return scale * slope
    a = TWO_PI * h * (slope + h)
    b = TWO_PI * h
    return scale * (a / b) * (_sin_poly(a) / _sin_poly(b))


def _psi_third_derivative(p, radius=0.25, samples=256):
    """Psi'''(p) by a trapezoid contour integral around the (entire) function."""
    angles = 2.0 * np.pi * np.arange(samples) / samples
    ring = p + radius * np.exp(1j * angles)
    vals = np.array([_psi_point(complex(z)) for z in ring])
    coef = np.mean(vals * np.exp(-3j * angles))
    return 6.0 * (coef / radius**3).real


_CHEB_DOMAIN = (-0.05, 1.05)
_CHEB_DEGREE = 80
_correction_tables = None


def _corrections():
    """Chebyshev coefficient tables for C0(p) and C1(p), built once."""
    global _correction_tables
    if _correction_tables is None:
        lo, hi = _CHEB_DOMAIN
        nodes = chebyshev.chebpts1(_CHEB_DEGREE + 1)
        xs = 0.5 * (hi - lo) * (nodes + 1.0) + lo
        c0 = chebyshev.chebfit(nodes, [_psi_point(float(x)) for x in xs], _CHEB_DEGREE)
        scale = -1.0 / (96.0 * math.pi**2)
        c1 = chebyshev.chebfit(
            nodes, [scale * _psi_third_derivative(float(x)) for x in xs], _CHEB_DEGREE
        )
        _correction_tables = (c0, c1)
    return _correction_tables


def _correction_values(p, tau):
    """C0(p) + C1(p)/tau evaluated through the tables."""
    c0, c1 = _corrections()
    lo, hi = _CHEB_DOMAIN
    x = (p - lo) / (hi - lo) * 2.0 - 1.0
    return chebyshev.chebval(x, c0) + chebyshev.chebval(x, c1) / tau


# -- Riemann-Siegel main sum --------------------------------------------------

if _HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def _main_sum_kernel(ts, thetas, ln_n, rsqrt_n, nterms):  # pragma: no cover
        out = np.empty(len(ts))
        for i in prange(len(ts)):
            t = ts[i]
            th = thetas[i]
            acc = 0.0
            for k in range(nterms):
                acc += math.cos(th - t * ln_n[k]) * rsqrt_n[k]
            out[i] = 2.0 * acc
        return out

else:

    def _main_sum_kernel(ts, thetas, ln_n, rsqrt_n, nterms, _block=4096):
        out = np.empty(len(ts))
        ln = ln_n[:nterms]
        rs = rsqrt_n[:nterms]
        for i in range(0, len(ts), _block):
            tt = ts[i : i + _block, None]
            th = thetas[i : i + _block, None]
            out[i : i + _block] = 2.0 * (np.cos(th - tt * ln) * rs).sum(axis=1)
        return out


_term_tables = (np.empty(0), np.empty(0))


def _term_arrays(nterms):
    global _term_tables
    ln_n, rsqrt_n = _term_tables
    if len(ln_n) < nterms:
        n = np.arange(1, max(nterms, 2 * len(ln_n), 64) + 1, dtype=np.float64)
        _term_tables = (np.log(n), 1.0 / np.sqrt(n))
        ln_n, rsqrt_n = _term_tables
    return ln_n, rsqrt_n


# -- evaluator -----------------------------------------------------------------


class CriticalLineEvaluator:
    """Hybrid evaluator for Z(t) and |zeta(1/2+it)|^2.

    Parameters
    ----------
    switch_height : float
        Crossover between Euler-Maclaurin (below) and Riemann-Siegel (above).
    rs_correction_terms : int
        Number of correction terms of the asymptotic series; exactly the
        first two are implemented.
    em_terms : int
        Euler-Maclaurin tail truncation order.
    max_height : float
        Evaluation budget; queries above it raise :class:`CapacityError`.
    """

    def __init__(
        self,
        switch_height=200.0,
        rs_correction_terms=2,
        em_terms=12,
        max_height=1.2e7,
    ):
        if rs_correction_terms != 2:
            raise ValueError(
                "only the first two correction terms are implemented; "
                f"got rs_correction_terms={rs_correction_terms}"
            )
        if em_terms < 4:
            raise ValueError("em_terms must be >= 4")
        self.switch_height = float(switch_height)
        self.rs_correction_terms = int(rs_correction_terms)
        self.em_terms = int(em_terms)
        self.max_height = float(max_height)
        self._bernoulli = bernoulli(2 * self.em_terms)

    # -- public surface ----------------------------------------------------

    def hardy_z(self, t):
        """Z(t), real on the critical line, for t >= 2 (scalar or array)."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 2.0):
            raise ValueError("hardy_z needs t >= 2")
        out = self._z_unrestricted(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def zeta_sq(self, t):
        """|zeta(1/2+it)|^2 = Z(t)^2, for t >= 2 (scalar or array)."""
        z = self.hardy_z(t)
        return z * z

    def zeta_sq_unrestricted(self, t):
        """Like :meth:`zeta_sq` but valid down to t = 0 (small-t method)."""
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        z = self._z_unrestricted(arr)
        out = z * z
        return float(out[0]) if np.ndim(t) == 0 else out

    def crossover_discrepancy(self, lo=200.0, hi=400.0, n=100, seed=7):
        """Max |Z_rs - Z_em| over n random points of the overlap band."""
        ts = np.sort(np.random.default_rng(seed).uniform(lo, hi, n))
        return float(np.max(np.abs(self._z_rs(ts) - self._z_em(ts))))

    # -- dispatch ------------------------------------------------------------

    def _z_unrestricted(self, arr):
        if np.any(arr < 0.0):
            raise ValueError("hardy_z is undefined for t < 0")
        if np.any(arr > self.max_height):
            raise CapacityError(
                f"t beyond evaluator range {self.max_height:g}; construct a "
                "CriticalLineEvaluator with a larger max_height"
            )
        out = np.empty_like(arr)
        small = arr < self.switch_height
        if small.any():
            out[small] = self._z_em(arr[small])
        if (~small).any():
            out[~small] = self._z_rs(arr[~small])
        return out

    # -- Riemann-Siegel path --------------------------------------------------

    def _z_rs(self, ts):
        tau = np.sqrt(ts / TWO_PI)
        nterms = tau.astype(np.int64)
        th = _theta_series(ts)
        out = np.empty_like(ts)

        order = np.argsort(nterms, kind="stable")
        sorted_n = nterms[order]
        run_starts = np.flatnonzero(np.diff(sorted_n)) + 1
        run_starts = np.concatenate(([0], run_starts, [len(sorted_n)]))
        ln_n, rsqrt_n = _term_arrays(int(sorted_n[-1]))
        for s, e in zip(run_starts[:-1], run_starts[1:]):
            idx = order[s:e]
            nv = int(sorted_n[s])
            out[idx] = _main_sum_kernel(
                np.ascontiguousarray(ts[idx]),
                np.ascontiguousarray(th[idx]),
                ln_n,
                rsqrt_n,
                nv,
            )
        p = tau - nterms
        sign = np.where(nterms % 2 == 1, 1.0, -1.0)
        out += sign * _correction_values(p, tau) / np.sqrt(tau)
        return out

    # -- Euler-Maclaurin path ---------------------------------------------------

    def _z_em(self, ts, _block=2048):
        out = np.empty_like(ts)
        for i in range(0, len(ts), _block):
            chunk = ts[i : i + _block]
            out[i : i + _block] = self._z_em_chunk(chunk)
        return out

    def _z_em_chunk(self, ts):
        s = 0.5 + 1j * ts
        m = max(16, int(math.ceil(1.3 * float(ts.max()))))
        n = np.arange(1, m + 1, dtype=np.float64)
        z = np.exp(-s[:, None] * np.log(n)[None, :]).sum(axis=1)
        z += m ** (1.0 - s) / (s - 1.0)
        z -= 0.5 * m ** (-s)
        for j in range(1, self.em_terms + 1):
            prod = np.ones_like(s)
            for i in range(0, 2 * j - 1):
                prod = prod * (s + i)
            z += (
                self._bernoulli[2 * j]
                / math.factorial(2 * j)
                * prod
                * m ** (-s - 2.0 * j + 1.0)
            )
        return np.real(np.exp(1j * _theta_exact(ts)) * z)


_DEFAULT_EVALUATOR = None


def default_evaluator():
    """Shared evaluator with default settings."""
    global _DEFAULT_EVALUATOR
    if _DEFAULT_EVALUATOR is None:
        _DEFAULT_EVALUATOR = CriticalLineEvaluator()
    return _DEFAULT_EVALUATOR


def hardy_z(t, evaluator=None):
    return (evaluator or default_evaluator()).hardy_z(t)


def zeta_sq(t, evaluator=None):
    return (evaluator or default_evaluator()).zeta_sq(t)


def sign_change_count(lo, hi, step=0.05, evaluator=None):
    """Number of sign changes of Z on a uniform grid over [lo, hi]."""
    ev = evaluator or default_evaluator()
    ts = np.arange(max(lo, 2.0), hi + step, step)
    zs = ev.hardy_z(ts)
    return int(np.count_nonzero(np.sign(zs[:-1]) * np.sign(zs[1:]) < 0))
