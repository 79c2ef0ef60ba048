"""Command-line front door: build stores, verify formulas, run functionals.

Exit codes: 0 ok, 2 usage/validation, 3 cache integrity, 4 capacity.
``LADDERLAB_CACHE_DIR`` overrides the configured cache directory; flags
override both the environment and an optional JSON config file.
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .errors import CacheIntegrityError, CapacityError
from .ladder import LadderSolverConfig
from .primes import build_prime_store, load_prime_store, save_prime_store
from .puzzles import (
    EXPONENT_SUM,
    EXPONENT_TOL,
    PuzzleVector,
    builtin_vectors_k4,
    evaluate_puzzle,
)
from .quadrature import (
    IntegralCache,
    QuadratureConfig,
    hl_integral,
    load_integral_cache,
    save_integral_cache,
)
from .report import CSV_HEADER, RatioReport
from .verification import (
    FORMULA_CATALOG,
    FORMULA_IDS,
    FermatRational,
    evaluate_formula,
    fermat_functional,
)
from .workbench import Workbench
from .zeta import CriticalLineEvaluator

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CACHE = 3
EXIT_CAPACITY = 4

PRIME_STORE_FILE = "primes.jlpk"
INTEGRAL_CACHE_FILE = "integral.jljc"


@dataclass
class RunConfig:
    """Effective run configuration, echoed into every report."""

    sieve_limit: int = 100_000_000
    zeta_range: float = 1.0e7
    rel_tol: float = 1e-6
    cache_dir: str = "ladderlab-cache"
    output_format: str = "csv"
    thread_count: int = 0

    def to_dict(self):
        return {
            "sieve_limit": self.sieve_limit,
            "zeta_range": self.zeta_range,
            "rel_tol": self.rel_tol,
            "cache_dir": self.cache_dir,
            "output_format": self.output_format,
            "thread_count": self.thread_count,
        }


def _resolve_config(args):
    """defaults < config file < environment < flags."""
    cfg = RunConfig()
    if args.config:
        loaded = json.loads(Path(args.config).read_text())
        for key, value in loaded.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r} in {args.config}")
            setattr(cfg, key, type(getattr(cfg, key))(value))
    env_dir = os.environ.get("LADDERLAB_CACHE_DIR")
    if env_dir:
        cfg.cache_dir = env_dir
    if args.sieve_limit is not None:
        cfg.sieve_limit = int(float(args.sieve_limit))
    if args.zeta_range is not None:
        cfg.zeta_range = float(args.zeta_range)
    if args.rel_tol is not None:
        cfg.rel_tol = float(args.rel_tol)
    if args.cache_dir is not None:
        cfg.cache_dir = args.cache_dir
    if getattr(args, "format", None):
        cfg.output_format = args.format
    if args.threads is not None:
        cfg.thread_count = int(args.threads)
    if cfg.output_format not in ("csv", "json"):
        raise ValueError(f"output format must be csv or json, got {cfg.output_format}")
    if cfg.thread_count < 0:
        raise ValueError("thread count must be >= 0")
    return cfg


def _apply_threads(cfg):
    if cfg.thread_count > 0:
        try:
            import numba

            numba.set_num_threads(cfg.thread_count)
        except ImportError:
            pass


def _store_path(cfg):
    return Path(cfg.cache_dir) / PRIME_STORE_FILE


def _cache_path(cfg):
    return Path(cfg.cache_dir) / INTEGRAL_CACHE_FILE


def _make_workbench(cfg):
    """Assemble a workbench, reusing persisted stores when they exist."""
    _apply_threads(cfg)
    store = None
    if _store_path(cfg).exists():
        store = load_prime_store(_store_path(cfg))
        if store.limit < cfg.sieve_limit:
            store = None
    if store is None:
        store = build_prime_store(cfg.sieve_limit)
    evaluator = CriticalLineEvaluator(max_height=1.2 * cfg.zeta_range)
    quad = QuadratureConfig(rel_tol=cfg.rel_tol)
    if _cache_path(cfg).exists():
        cache = load_integral_cache(_cache_path(cfg), evaluator, quad)
    else:
        cache = IntegralCache(evaluator, quad)
    return Workbench(
        store=store,
        zeta=evaluator,
        cache=cache,
        quad=quad,
        solver=LadderSolverConfig(),
    )


def _persist_cache_if_tracked(bench, cfg):
    if _cache_path(cfg).exists():
        save_integral_cache(bench.cache, _cache_path(cfg))


def _emit_reports(reports, cfg, no_timing, out):
    if no_timing:
        reports = [replace(r, elapsed_ms=0.0) for r in reports]
    config_echo = json.dumps(cfg.to_dict(), sort_keys=True)
    if cfg.output_format == "csv":
        print(f"# config: {config_echo}", file=out)
        print(CSV_HEADER, file=out)
        for report in reports:
            print(report.to_csv_row(), file=out)
    else:
        print(json.dumps({"config": cfg.to_dict()}, sort_keys=True), file=out)
        for report in reports:
            print(report.to_json(), file=out)


def _parse_param(text):
    key, _, raw = text.partition("=")
    if not key or not raw:
        raise ValueError(f"--param must look like key=value, got {text!r}")
    if "|" in raw:
        return key, tuple(float(v) for v in raw.split("|"))
    try:
        return key, int(raw)
    except ValueError:
        return key, float(raw)


def _parse_grid(text):
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("--grid must list at least one value")
    return values


# -- subcommands -----------------------------------------------------------


def cmd_build(args, out=sys.stdout):
    cfg = _resolve_config(args)
    _apply_threads(cfg)
    cache_dir = Path(cfg.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)

    store_path = _store_path(cfg)
    if store_path.exists():
        store = load_prime_store(store_path)
        if store.limit >= cfg.sieve_limit:
            print(
                f"prime store verified: limit {store.limit}, "
                f"{store.prime_count_total} primes",
                file=out,
            )
        else:
            store = build_prime_store(cfg.sieve_limit)
            save_prime_store(store, store_path)
            print(f"prime store rebuilt to limit {store.limit}", file=out)
    else:
        store = build_prime_store(cfg.sieve_limit)
        save_prime_store(store, store_path)
        print(
            f"prime store built: limit {store.limit}, "
            f"{store.prime_count_total} primes",
            file=out,
        )

    evaluator = CriticalLineEvaluator(max_height=1.2 * cfg.zeta_range)
    quad = QuadratureConfig(rel_tol=cfg.rel_tol)
    cache_path = _cache_path(cfg)
    if cache_path.exists():
        cache = load_integral_cache(cache_path, evaluator, quad)
        action = "extended"
    else:
        cache = IntegralCache(evaluator, quad)
        action = "seeded"
    seed = float(args.seed_J)
    j_val = hl_integral(seed, cache, quad)
    save_integral_cache(cache, cache_path)
    print(
        f"integral cache {action} to height {seed:g} "
        f"({len(cache)} checkpoints, J={j_val:.6g})",
        file=out,
    )
    return EXIT_OK


def cmd_verify(args, out=sys.stdout):
    cfg = _resolve_config(args)
    if args.formula not in FORMULA_CATALOG:
        print(
            f"unknown formula {args.formula!r}; valid ids: {', '.join(FORMULA_IDS)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    params = {}
    for item in args.param or []:
        key, value = _parse_param(item)
        params[key] = value
    grid = _parse_grid(args.grid) if args.grid else [None]

    bench = _make_workbench(cfg)
    grid_param = FORMULA_CATALOG[args.formula].grid_param
    reports = []
    for point in grid:
        point_params = dict(params)
        if point is not None:
            point_params[grid_param] = point
        reports.append(evaluate_formula(args.formula, point_params, bench))
    _emit_reports(reports, cfg, args.no_timing, out)
    _persist_cache_if_tracked(bench, cfg)
    return EXIT_OK


def cmd_fermat(args, out=sys.stdout):
    cfg = _resolve_config(args)
    if args.n < 3:
        print(f"Fermat exponent must be n >= 3, got {args.n}", file=sys.stderr)
        return EXIT_USAGE
    try:
        q = FermatRational(args.x, args.y, args.z, args.n)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    grid = _parse_grid(args.grid)

    bench = _make_workbench(cfg)
    started = time.perf_counter()
    trend = fermat_functional(q, grid, bench)
    per_row_ms = (time.perf_counter() - started) * 1e3 / len(grid)
    reports = [
        RatioReport(
            formula="E3.17",
            params={"x": q.x, "y": q.y, "z": q.z, "n": q.n, "tau": tau},
            lhs=value,
            rhs=trend.target,
            ratio=value / trend.target,
            elapsed_ms=per_row_ms,
        )
        for tau, value in zip(trend.grid, trend.values)
    ]
    _emit_reports(reports, cfg, args.no_timing, out)
    value_str = str(Fraction(q.numerator, q.denominator))
    relation = "==" if trend.exact_is_one else "!="
    print(f"verdict: value={value_str}, exact {relation} 1", file=out)
    _persist_cache_if_tracked(bench, cfg)
    return EXIT_OK


def cmd_puzzle(args, out=sys.stdout):
    cfg = _resolve_config(args)
    if (args.builtin is None) == (args.exponents is None):
        print("choose exactly one of --builtin or --exponents", file=sys.stderr)
        return EXIT_USAGE
    if args.builtin is not None:
        vectors = builtin_vectors_k4()
        if not 1 <= args.builtin <= len(vectors):
            print(
                f"--builtin must be 1..{len(vectors)}, got {args.builtin}",
                file=sys.stderr,
            )
            return EXIT_USAGE
        vector = vectors[args.builtin - 1]
    else:
        entries = [e.strip() for e in args.exponents.split(",")]
        free_slots = [i for i, e in enumerate(entries) if e == "_"]
        if len(free_slots) > 1:
            print("at most one free slot '_' is allowed", file=sys.stderr)
            return EXIT_USAGE
        try:
            fixed = [float(e) for e in entries if e != "_"]
        except ValueError as exc:
            print(f"bad exponent list: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if free_slots:
            free_value = EXPONENT_SUM - math.fsum(fixed)
            exponents = list(fixed)
            exponents.insert(free_slots[0], free_value)
        else:
            if abs(math.fsum(fixed) - EXPONENT_SUM) > EXPONENT_TOL:
                print(
                    f"exponents sum to {math.fsum(fixed)!r}, not {EXPONENT_SUM} "
                    "(and there is no free slot '_')",
                    file=sys.stderr,
                )
                return EXIT_USAGE
            exponents = fixed
        vector = PuzzleVector(tuple(exponents))

    bench = _make_workbench(cfg)
    report = evaluate_puzzle(args.T, vector, bench)
    _emit_reports([report], cfg, args.no_timing, out)
    _persist_cache_if_tracked(bench, cfg)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--sieve-limit", default=None, help="prime sieve bound")
    parser.add_argument("--zeta-range", default=None, help="critical-line budget")
    parser.add_argument("--rel-tol", default=None, help="quadrature tolerance")
    parser.add_argument("--cache-dir", default=None, help="cache directory")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--threads", default=None, help="worker threads (0 = auto)")
    parser.add_argument(
        "--format", choices=("csv", "json"), default=None, help="output format"
    )
    parser.add_argument(
        "--no-timing",
        action="store_true",
        help="report elapsed_ms as 0 for byte-reproducible output",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ladderlab",
        description="Numerical experiments on ladders, remainder integrals, "
        "and critical-line identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build and persist the stores")
    _add_common(p_build)
    p_build.add_argument("--seed-J", default="1e4", help="seed cache height")
    p_build.set_defaults(fn=cmd_build)

    p_verify = sub.add_parser("verify", help="evaluate a catalogued formula")
    _add_common(p_verify)
    p_verify.add_argument("--formula", required=True, help="formula id, e.g. E2.6")
    p_verify.add_argument(
        "--param", action="append", help="recipe parameter key=value", default=[]
    )
    p_verify.add_argument("--grid", default=None, help="comma-separated heights")
    p_verify.set_defaults(fn=cmd_verify)

    p_fermat = sub.add_parser("fermat", help="run the Fermat-rational functional")
    _add_common(p_fermat)
    p_fermat.add_argument("--x", type=int, required=True)
    p_fermat.add_argument("--y", type=int, required=True)
    p_fermat.add_argument("--z", type=int, required=True)
    p_fermat.add_argument("--n", type=int, required=True)
    p_fermat.add_argument("--grid", required=True, help="tau grid, comma-separated")
    p_fermat.set_defaults(fn=cmd_fermat)

    p_puzzle = sub.add_parser("puzzle", help="evaluate a multiplicative puzzle")
    _add_common(p_puzzle)
    p_puzzle.add_argument("--T", type=float, required=True)
    p_puzzle.add_argument("--builtin", type=int, default=None, help="1..5")
    p_puzzle.add_argument(
        "--exponents",
        default=None,
        help="comma-separated exponents, '_' marks the free slot",
    )
    p_puzzle.set_defaults(fn=cmd_puzzle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CacheIntegrityError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
