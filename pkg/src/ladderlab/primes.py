"""Primes, the prime-counting remainder, and the cumulative remainder integral.

The central object is :class:`PrimeStore`, a packed sieve with prefix tables
every ``2**16`` integers, so that both ``pi(t)`` and ``sum(p <= t)`` are
cheap at ``10**8`` scale.  On top of it sit

* ``logarithmic_integral`` -- li(t) through the exponential-integral identity,
* ``remainder``            -- P(t) = pi(t) - li(t),
* ``ingham_integral``      -- I(Y) = integral of P over [2, Y] in closed form,
* ``remainder_integral``   -- increments of -P between two heights,
* ``inverse_ingham``       -- the first height N where I(N) crosses -a*G.

All query operations are read-only after construction and safe for
concurrent readers.
"""

import math
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expi

from .constants import CONSTANTS
from .errors import CacheIntegrityError, CapacityError

#: Prefix tables are stored at multiples of this block size.
BLOCK = 1 << 16

#: Largest supported sieve bound (transient build memory is ~1 byte/integer).
SIEVE_CAP = 1_000_000_000

_STORE_MAGIC = b"JLPK"
_STORE_VERSION = 1

# li(2), subtracted so the integral representation starts at t=2.
_LI_AT_2 = float(expi(math.log(2.0)))


class PrimeStore:
    """Packed primality bitset over [0, limit] with block prefix tables.

    ``block_counts[k]`` and ``block_sums[k]`` hold the number and the sum of
    primes below ``k * BLOCK``, so any query unpacks at most one block.
    """

    def __init__(self, limit, bits, block_counts, block_sums):
        self.limit = int(limit)
        self.bits = bits                  # uint8, np.packbits layout
        self.block_counts = block_counts  # int64, len nblocks+1
        self.block_sums = block_sums      # int64, len nblocks+1

    @property
    def prime_count_total(self):
        block = self.limit // BLOCK
        u = self._unpack_block(block)
        return int(self.block_counts[block]) + int(
            u[: self.limit - block * BLOCK + 1].sum()
        )

    def _unpack_block(self, block_index):
        start_byte = block_index * (BLOCK // 8)
        stop_byte = min(start_byte + BLOCK // 8, len(self.bits))
        return np.unpackbits(self.bits[start_byte:stop_byte])

    def primes_between(self, lo, hi):
        """All primes p with lo <= p <= hi, as an int64 array."""
        lo = max(int(math.ceil(lo)), 2)
        hi = int(math.floor(hi))
        if hi > self.limit:
            raise CapacityError(
                f"prime store covers [2, {self.limit}]; requested {hi}"
            )
        if hi < lo:
            return np.empty(0, dtype=np.int64)
        chunks = []
        for block in range(lo // BLOCK, hi // BLOCK + 1):
            u = self._unpack_block(block)
            idx = np.flatnonzero(u).astype(np.int64) + block * BLOCK
            chunks.append(idx)
        ps = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        return ps[(ps >= lo) & (ps <= hi)]


def build_prime_store(limit):
    """Sieve all primes up to ``limit`` and fill the prefix tables.

    Parameters
    ----------
    limit : int
        Sieve bound, ``2 <= limit <= SIEVE_CAP``.
    """
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if limit > SIEVE_CAP:
        raise CapacityError(f"sieve limit {limit} exceeds cap {SIEVE_CAP}")

    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False

    nblocks = (limit + BLOCK) // BLOCK
    padded_len = nblocks * BLOCK
    counts = np.zeros(nblocks + 1, dtype=np.int64)
    sums = np.zeros(nblocks + 1, dtype=np.int64)

    padded = np.zeros(padded_len, dtype=bool)
    padded[: limit + 1] = sieve
    per_block = padded.reshape(nblocks, BLOCK)
    counts[1:] = np.cumsum(per_block.sum(axis=1, dtype=np.int64))
    primes = np.flatnonzero(sieve).astype(np.int64)
    cum = np.cumsum(primes)
    boundary = np.arange(1, nblocks + 1, dtype=np.int64) * BLOCK
    idx = np.searchsorted(primes, boundary, side="left")
    sums[1:] = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0)

    bits = np.packbits(padded)
    return PrimeStore(limit, bits, counts, sums)


def prime_count(store, t):
    """Number of primes <= floor(t).  Never silently truncates above limit."""
    t = float(t)
    if t < 0:
        raise ValueError(f"prime_count needs t >= 0, got {t}")
    if t > store.limit:
        raise CapacityError(
            f"t={t:g} beyond sieve limit {store.limit}; rebuild with a larger limit"
        )
    x = int(math.floor(t))
    if x < 2:
        return 0
    block = x // BLOCK
    u = store._unpack_block(block)
    return int(store.block_counts[block]) + int(u[: x - block * BLOCK + 1].sum())


def prime_sum(store, t):
    """Sum of all primes <= floor(t), exact integer arithmetic."""
    t = float(t)
    if t < 0:
        raise ValueError(f"prime_sum needs t >= 0, got {t}")
    if t > store.limit:
        raise CapacityError(
            f"t={t:g} beyond sieve limit {store.limit}; rebuild with a larger limit"
        )
    x = int(math.floor(t))
    if x < 2:
        return 0
    block = x // BLOCK
    u = store._unpack_block(block)
    local = np.flatnonzero(u[: x - block * BLOCK + 1]).astype(np.int64)
    return int(store.block_sums[block]) + int(local.sum()) + block * BLOCK * len(local)


def logarithmic_integral(t):
    """li(t) for t >= 2, via li(t) = Ei(ln t).

    Accepts scalars or arrays; accuracy is limited only by the scipy
    exponential-integral implementation (well below 1e-10 absolute in the
    supported range).
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 2.0):
        raise ValueError("logarithmic_integral is restricted to t >= 2")
    out = expi(np.log(arr))
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


@dataclass(frozen=True)
class RemainderQuery:
    """pi, li and their difference P = pi - li at one height."""

    t: float
    value_pi: int
    value_li: float
    value_P: float


def remainder(store, t):
    """P(t) = pi(t) - li(t) bundled with its two components."""
    t = float(t)
    if t < 2.0:
        raise ValueError(f"remainder needs t >= 2, got {t}")
    value_pi = prime_count(store, t)
    value_li = logarithmic_integral(t)
    return RemainderQuery(t, value_pi, value_li, value_pi - value_li)


def _li_antiderivative(y):
    """Antiderivative of li at y: y*li(y) - li(y^2), with li(y^2)=Ei(2 ln y)."""
    ln_y = math.log(y)
    return y * float(expi(ln_y)) - float(expi(2.0 * ln_y))


def ingham_integral(store, Y):
    """I(Y) = integral of P(t) over [2, Y], in closed form.

    The step-function part integrates exactly to ``Y*pi(Y) - sum(p <= Y)``;
    the smooth part uses the antiderivative ``t*li(t) - li(t^2)``, where
    li(t^2) is evaluated as Ei(2 ln t) so t is never squared.
    """
    Y = float(Y)
    if Y < 2.0:
        raise ValueError(f"ingham_integral needs Y >= 2, got {Y}")
    if Y > store.limit:
        raise CapacityError(
            f"Y={Y:g} beyond sieve limit {store.limit}; rebuild with a larger limit"
        )
    int_pi = Y * prime_count(store, Y) - prime_sum(store, Y)
    int_li = _li_antiderivative(Y) - _li_antiderivative(2.0)
    return int_pi - int_li


def remainder_integral(store, A, B):
    """Integral of -P(t) over [A, B], as a difference of closed-form values."""
    A = float(A)
    B = float(B)
    if A > B:
        raise ValueError(f"remainder_integral needs A <= B, got A={A:g} B={B:g}")
    return -(ingham_integral(store, B) - ingham_integral(store, A))


def estimate_inverse_height(G):
    """Rough height N with I(N) ~ -a*G, from |P(t)| ~ sqrt(t)/ln t scaling.

    Used only for capacity budgeting and error messages; the actual
    inversion brackets and bisects the exact closed form.
    """
    target = CONSTANTS.a * float(G)
    n = max((1.5 * target) ** (2.0 / 3.0), 16.0)
    for _ in range(4):
        n = (1.5 * target * math.log(max(n, 3.0))) ** (2.0 / 3.0)
    return n


def inverse_ingham(store, G):
    """Smallest N >= 2 with I(N) <= -a*G, to absolute resolution 1e-6.

    Brackets the crossing on a geometric grid, then bisects.  Raises
    :class:`CapacityError` naming the minimum sieve limit when the target
    cannot be reached within ``store.limit``.
    """
    G = float(G)
    if G <= 0.0:
        raise ValueError(f"inverse_ingham needs G > 0, got {G}")
    target = -CONSTANTS.a * G

    needed = estimate_inverse_height(G)
    if needed > 1.5 * store.limit:
        raise CapacityError(
            f"inverse Ingham height for G={G:g} is ~{needed:.3g}, beyond sieve "
            f"limit {store.limit}; rebuild with limit >= {math.ceil(1.5 * needed)}"
        )

    lo, hi = 2.0, 4.0
    while ingham_integral(store, min(hi, store.limit)) > target:
        if hi >= store.limit:
            raise CapacityError(
                f"I({store.limit}) has not crossed -a*G for G={G:g}; rebuild "
                f"with limit >= {math.ceil(1.5 * needed)}"
            )
        lo, hi = hi, min(hi * 2.0, float(store.limit))

    # invariant: I(lo) > target >= I(hi); return the crossing side.
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if ingham_integral(store, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


# -- persistence -----------------------------------------------------------


def save_prime_store(store, path):
    """Write the store as magic/version/limit + bitset + prefix tables + CRC32."""
    path = Path(path)
    header = _STORE_MAGIC + struct.pack(
        "<IQQQ",
        _STORE_VERSION,
        store.limit,
        len(store.bits),
        len(store.block_counts),
    )
    body = (
        header
        + store.bits.tobytes()
        + store.block_counts.astype("<i8").tobytes()
        + store.block_sums.astype("<i8").tobytes()
    )
    crc = zlib.crc32(body) & 0xFFFFFFFF
    path.write_bytes(body + struct.pack("<I", crc))


def load_prime_store(path):
    """Load and validate a persisted store; raises CacheIntegrityError on damage."""
    raw = Path(path).read_bytes()
    if len(raw) < 32 or raw[:4] != _STORE_MAGIC:
        raise CacheIntegrityError(f"{path}: not a prime store file")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise CacheIntegrityError(f"{path}: checksum mismatch")
    version, limit, nbytes, ntables = struct.unpack("<IQQQ", body[4:32])
    if version != _STORE_VERSION:
        raise CacheIntegrityError(
            f"{path}: unsupported version {version} (expected {_STORE_VERSION})"
        )
    off = 32
    bits = np.frombuffer(body, dtype=np.uint8, count=nbytes, offset=off).copy()
    off += nbytes
    counts = np.frombuffer(body, dtype="<i8", count=ntables, offset=off).astype(
        np.int64
    )
    off += 8 * ntables
    sums = np.frombuffer(body, dtype="<i8", count=ntables, offset=off).astype(
        np.int64
    )
    return PrimeStore(limit, bits, counts, sums)
