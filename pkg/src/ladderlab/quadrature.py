"""Deterministic quadrature of the critical-line integrand.

The panel rule tracks the local oscillation of Z: the mean zero spacing near
height t is ``2*pi / ln(t/2pi)``, and panels are sized so that a fixed
number of Gauss-Legendre nodes lands on every oscillation.  Panel
decomposition depends only on the interval and the config, never on thread
count or on earlier queries, so results are bit-reproducible.

``hl_integral`` maintains the cumulative integral J(T) over a monotone
checkpoint grid (the grid positions form one absolute ladder, independent of
query order) and persists it in a small binary format with a config
fingerprint, so caches built under different tolerances can never be mixed
silently.
"""

import bisect
import hashlib
import math
import struct
import zlib
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.polynomial import legendre

from .constants import TWO_PI
from .errors import CacheIntegrityError

_CACHE_MAGIC = b"JLJC"
_CACHE_VERSION = 1

#: Checkpoint spacing is max(1, t / CHECKPOINT_SCALE).
CHECKPOINT_SCALE = 1.0e4


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerance and panel layout knobs.

    ``nodes_per_oscillation`` Gauss-Legendre nodes are placed on every local
    oscillation of the integrand; panels of ``panel_order`` nodes therefore
    span ``panel_order / nodes_per_oscillation`` oscillations.  ``rel_tol``
    rescales the density mildly (the default density already integrates the
    critical-line integrand to ~1e-9 relative).
    """

    rel_tol: float = 1e-6
    nodes_per_oscillation: int = 12
    panel_order: int = 16

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if self.nodes_per_oscillation < 8:
            raise ValueError("nodes_per_oscillation must be >= 8")
        if self.panel_order < 2:
            raise ValueError("panel_order must be >= 2")

    def fingerprint(self):
        """Stable 64-bit hash of the config, used to tag cache files."""
        key = f"{self.rel_tol!r}|{self.nodes_per_oscillation}|{self.panel_order}"
        digest = hashlib.sha256(key.encode("ascii")).digest()
        return int.from_bytes(digest[:8], "little")


@lru_cache(maxsize=8)
def _gauss_table(order):
    x, w = legendre.leggauss(order)
    return x, w


def _panel_width(t, cfg):
    spacing = TWO_PI / math.log(max(t, 10.0) / TWO_PI)
    width = spacing * cfg.panel_order / cfg.nodes_per_oscillation
    refine = (cfg.rel_tol / 1e-6) ** (1.0 / (2.0 * cfg.panel_order))
    return width * min(max(refine, 0.25), 4.0)


def _panel_nodes(a, b, cfg):
    """Panel nodes and weights for [a, b]; layout depends only on (a, b, cfg)."""
    xg, wg = _gauss_table(cfg.panel_order)
    node_chunks = []
    weight_chunks = []
    t = a
    while t < b:
        w_start = _panel_width(t, cfg)
        count = min(512, max(1, math.ceil((b - t) / w_start)))
        # width is non-increasing in t: sizing panels by the batch end keeps
        # every panel at or below the local rule
        w = _panel_width(min(t + count * w_start, b), cfg)
        count = min(512, max(1, math.ceil((b - t) / w)))
        edges = t + w * np.arange(count + 1)
        edges[-1] = min(edges[-1], b)
        mids = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        node_chunks.append((mids[:, None] + half[:, None] * xg).ravel())
        weight_chunks.append((half[:, None] * wg).ravel())
        t = edges[-1]
    if not node_chunks:
        return np.empty(0), np.empty(0)
    return np.concatenate(node_chunks), np.concatenate(weight_chunks)


def _integrate_intervals(f, edges, cfg, node_budget=1_500_000):
    """Integral of f over each consecutive pair of ``edges``.

    All pending nodes are evaluated in one call to ``f`` per budget flush,
    so vectorized integrands run at full speed; per-interval sums are
    reduced in a fixed order regardless of batching.
    """
    edges = np.asarray(edges, dtype=float)
    results = np.zeros(len(edges) - 1)
    pend_nodes, pend_weights, pend_sizes, pend_idx = [], [], [], []
    pending = 0

    def flush():
        nonlocal pending
        if not pend_idx:
            return
        nodes = np.concatenate(pend_nodes)
        weights = np.concatenate(pend_weights)
        vals = np.asarray(f(nodes), dtype=float)
        bad = ~np.isfinite(vals)
        if bad.any():
            where = nodes[np.argmax(bad)]
            raise ArithmeticError(f"non-finite integrand value at t={where!r}")
        weighted = vals * weights
        offsets = np.concatenate(([0], np.cumsum(pend_sizes)[:-1]))
        sums = np.add.reduceat(weighted, offsets)
        results[pend_idx] = sums
        pend_nodes.clear()
        pend_weights.clear()
        pend_sizes.clear()
        pend_idx.clear()
        pending = 0

    for i in range(len(edges) - 1):
        a, b = edges[i], edges[i + 1]
        if b < a:
            raise ValueError(f"interval edges must be non-decreasing at index {i}")
        if b == a:
            continue
        nodes, weights = _panel_nodes(a, b, cfg)
        pend_nodes.append(nodes)
        pend_weights.append(weights)
        pend_sizes.append(len(nodes))
        pend_idx.append(i)
        pending += len(nodes)
        if pending >= node_budget:
            flush()
    flush()
    return results


def integrate(f, A, B, cfg):
    """Composite Gauss-Legendre integral of a vectorized integrand on [A, B]."""
    A = float(A)
    B = float(B)
    if A > B:
        raise ValueError(f"integrate needs A <= B, got A={A:g} B={B:g}")
    if A == B:
        return 0.0
    return float(_integrate_intervals(f, (A, B), cfg)[0])


class IntegralCache:
    """Monotone checkpoint grid for the cumulative integral J(T).

    Checkpoint positions follow one absolute ladder starting at 0 with step
    ``max(1, t / 1e4)``, so two caches built under the same config hold
    byte-identical grids no matter which queries drove the extension.
    """

    def __init__(self, evaluator, config):
        self.evaluator = evaluator
        self.config = config
        self._t = [0.0]
        self._j = [0.0]

    @property
    def fingerprint(self):
        return self.config.fingerprint()

    @property
    def grid(self):
        return np.array(self._t), np.array(self._j)

    def __len__(self):
        return len(self._t)

    def _integrand(self, ts):
        return self.evaluator.zeta_sq_unrestricted(ts)

    @staticmethod
    def _next_checkpoint(t):
        return t + max(1.0, t / CHECKPOINT_SCALE)

    def extend_to(self, T, chunk=4096):
        """Append checkpoints until the grid covers T."""
        while self._t[-1] < T:
            edges = [self._t[-1]]
            while edges[-1] < T and len(edges) <= chunk:
                edges.append(self._next_checkpoint(edges[-1]))
            segments = _integrate_intervals(self._integrand, edges, self.config)
            j = self._j[-1]
            for t_next, seg in zip(edges[1:], segments):
                j += float(seg)
                self._t.append(t_next)
                self._j.append(j)

    def rederive_checkpoint(self, index):
        """Recompute checkpoint ``index`` from its predecessor (consistency check)."""
        if not 1 <= index < len(self._t):
            raise ValueError(f"checkpoint index {index} out of range")
        seg = integrate(
            self._integrand, self._t[index - 1], self._t[index], self.config
        )
        return self._j[index - 1] + seg


def _check_fingerprint(cache, cfg):
    if cfg.fingerprint() != cache.fingerprint:
        raise CacheIntegrityError(
            "quadrature config does not match the cache fingerprint; "
            "rebuild the cache or pass its own config"
        )


def hl_integral(T, cache, cfg):
    """Cumulative integral J(T) of |zeta(1/2+it)|^2 over [0, T].

    Extends the checkpoint grid monotonically; between checkpoints the
    remaining segment is integrated directly.
    """
    T = float(T)
    if T < 0.0:
        raise ValueError(f"hl_integral needs T >= 0, got {T}")
    _check_fingerprint(cache, cfg)
    if T == 0.0:
        return 0.0
    cache.extend_to(T)
    idx = bisect.bisect_right(cache._t, T) - 1
    base_t = cache._t[idx]
    base_j = cache._j[idx]
    if T == base_t:
        return base_j
    return base_j + integrate(cache._integrand, base_t, T, cfg)


def hl_integral_many(ts, cache, cfg):
    """J at each point of an array, sharing segment work per checkpoint span."""
    ts = np.asarray(ts, dtype=float)
    if np.any(ts < 0.0):
        raise ValueError("hl_integral_many needs t >= 0")
    _check_fingerprint(cache, cfg)
    if len(ts) == 0:
        return np.empty(0)
    cache.extend_to(float(ts.max()))
    grid_t = np.array(cache._t)
    grid_j = np.array(cache._j)
    order = np.argsort(ts, kind="stable")
    base_idx = np.searchsorted(grid_t, ts[order], side="right") - 1
    out = np.empty_like(ts)

    start = 0
    while start < len(order):
        stop = start
        while stop < len(order) and base_idx[stop] == base_idx[start]:
            stop += 1
        b = base_idx[start]
        pts = ts[order[start:stop]]
        edges = np.concatenate(([grid_t[b]], pts))
        segs = _integrate_intervals(cache._integrand, edges, cfg)
        out[order[start:stop]] = grid_j[b] + np.cumsum(segs)
        start = stop
    return out


def iterated_product_integral(ladder, T, k, L, cfg):
    """Integral of ``prod_r zeta_sq(phi^r(t))`` between the k-fold reverse
    iterates of T and T + L.

    ``ladder`` supplies the reverse endpoints and vectorized forward
    iteration; node density is scaled by k because the product oscillates
    k-fold faster than a single factor.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if L <= 0.0:
        raise ValueError(f"L must be positive, got {L}")
    lower = ladder.reverse_endpoint(T, k)
    upper = ladder.reverse_endpoint(T + L, k)
    evaluator = ladder.cache.evaluator

    def integrand(ts):
        acc = evaluator.zeta_sq(ts)
        current = ts
        for _ in range(1, k):
            current = ladder.forward_many(current)
            acc = acc * evaluator.zeta_sq(current)
        return acc

    dense = replace(cfg, nodes_per_oscillation=cfg.nodes_per_oscillation * k)
    return integrate(integrand, lower, upper, dense)


# -- persistence -----------------------------------------------------------


def save_integral_cache(cache, path):
    """Write grid and fingerprint; trailing CRC32 guards the whole record."""
    path = Path(path)
    grid_t, grid_j = cache.grid
    pairs = np.empty((len(grid_t), 2))
    pairs[:, 0] = grid_t
    pairs[:, 1] = grid_j
    body = (
        _CACHE_MAGIC
        + struct.pack("<IQQ", _CACHE_VERSION, cache.fingerprint, len(grid_t))
        + pairs.astype("<f8").tobytes()
    )
    crc = zlib.crc32(body) & 0xFFFFFFFF
    path.write_bytes(body + struct.pack("<I", crc))


def load_integral_cache(path, evaluator, config):
    """Load a persisted cache; config fingerprint must match exactly."""
    raw = Path(path).read_bytes()
    if len(raw) < 24 or raw[:4] != _CACHE_MAGIC:
        raise CacheIntegrityError(f"{path}: not an integral cache file")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise CacheIntegrityError(f"{path}: checksum mismatch")
    version, fingerprint, count = struct.unpack("<IQQ", body[4:24])
    if version != _CACHE_VERSION:
        raise CacheIntegrityError(
            f"{path}: unsupported version {version} (expected {_CACHE_VERSION})"
        )
    if fingerprint != config.fingerprint():
        raise CacheIntegrityError(
            f"{path}: cache fingerprint {fingerprint:#x} does not match the "
            "given quadrature config; tolerances must never be mixed"
        )
    pairs = np.frombuffer(body, dtype="<f8", count=2 * count, offset=24)
    pairs = pairs.reshape(count, 2)
    cache = IntegralCache(evaluator, config)
    cache._t = [float(x) for x in pairs[:, 0]]
    cache._j = [float(x) for x in pairs[:, 1]]
    if cache._t[0] != 0.0 or cache._j[0] != 0.0:
        raise CacheIntegrityError(f"{path}: grid must start at (0, 0)")
    return cache
