"""Batch command-line front end: census tables, fiber polynomials,
verification suites and the closure order.

Commands emit CSV or JSON on stdout with a versioned schema field.
Exit codes: 0 all requested checks pass, 1 a mathematical check failed
(a falsification witness is in the output), 2 usage or config error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys

from .combinatorics import (
    bipartitions,
    diagram,
    flag_shape,
    format_bipartition,
    is_distinguished,
    parse_bipartition,
)
from .gflinalg import is_prime
from .fibers import (
    FiberQuery,
    InterpolationError,
    count_fiber_memo,
    fiber_cache,
    fiber_dimension_bound,
    held_out_prime,
    interpolate_qpoly,
    orbit_dimension,
    prime_schedule,
)
from .checks import CHECK_NAMES, DEFAULT_BUDGET, suite_instances

SCHEMA = "enhcone/1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class ConfigError(Exception):
    pass


def _parse_int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _validated_primes(primes: tuple[int, ...], holdout: int | None) -> None:
    if len(set(primes)) != len(primes):
        raise ConfigError(f"prime schedule has duplicates: {primes}")
    bad = [p for p in primes if not is_prime(p)]
    if bad:
        raise ConfigError(f"schedule entries are not prime: {bad}")
    if holdout is not None:
        if not is_prime(holdout):
            raise ConfigError(f"held-out value {holdout} is not prime")
        if holdout in primes:
            raise ConfigError(f"held-out prime {holdout} appears in the schedule")


def _resolve_cache_path(arg: str | None) -> str | None:
    if arg:
        return arg
    env_dir = os.environ.get("ENHCONE_CACHE_DIR")
    if env_dir:
        return os.path.join(env_dir, "fiber-counts.jsonl")
    return None


def _emit_csv(columns: list[str], rows: list[dict], out) -> None:
    import csv

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row.get(c, "") for c in columns])


def _emit(fmt: str, payload: dict, columns: list[str], rows: list[dict], out) -> None:
    if fmt == "json":
        json.dump(payload, out, sort_keys=True, separators=(",", ":"))
        out.write("\n")
    else:
        _emit_csv(columns, rows, out)


def _witness_digest(witness: dict) -> str:
    blob = json.dumps(witness, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


# ---------------------------------------------------------------------------
# subcommands


def cmd_orbits(args, out) -> int:
    if args.mu is not None or args.nu is not None:
        mu = _parse_int_list(args.mu or "")
        nu = _parse_int_list(args.nu or "")
        from .combinatorics import bipartition

        try:
            selected = [bipartition(mu, nu)]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if args.n is not None and selected[0].n != args.n:
            raise ConfigError(
                f"--mu/--nu has total size {selected[0].n}, but --n is {args.n}"
            )
    else:
        if args.n is None:
            raise ConfigError("orbits needs --n or --mu/--nu")
        selected = list(bipartitions(args.n))
    rows = []
    json_rows = []
    for b in selected:
        shape = flag_shape(b)
        row = {
            "schema": SCHEMA,
            "bipartition": format_bipartition(b),
            "column_heights": ",".join(map(str, diagram(b).column_heights)),
            "flag_dims": ",".join(map(str, shape.dims)),
            "marker": shape.marker,
            "orbit_dim": orbit_dimension(b),
            "distinguished": int(is_distinguished(b)),
        }
        rows.append(row)
        json_rows.append(
            {
                "mu": list(b.first.parts),
                "nu": list(b.second.parts),
                "column_heights": list(diagram(b).column_heights),
                "flag_dims": list(shape.dims),
                "marker": shape.marker,
                "orbit_dim": row["orbit_dim"],
                "distinguished": bool(row["distinguished"]),
            }
        )
    payload = {"schema": SCHEMA, "command": "orbits", "rows": json_rows}
    columns = [
        "schema",
        "bipartition",
        "column_heights",
        "flag_dims",
        "marker",
        "orbit_dim",
        "distinguished",
    ]
    _emit(args.format, payload, columns, rows, out)
    return EXIT_OK


def cmd_fiber_poly(args, out) -> int:
    big = parse_bipartition(args.big)
    small = parse_bipartition(args.small)
    if big.n != small.n:
        raise ConfigError(
            f"|big| = {big.n} and |small| = {small.n} must be equal"
        )
    shape = flag_shape(big)
    bound = fiber_dimension_bound(shape)
    notes = []
    if args.primes:
        primes = _parse_int_list(args.primes)
        if len(primes) < bound + 1:
            # user-chosen schedule caps the interpolation degree; the
            # held-out prime still validates the result
            notes.append(
                f"degree bound capped at {len(primes) - 1} by the supplied "
                f"schedule (sound bound {bound})"
            )
            bound = len(primes) - 1
    else:
        primes = prime_schedule(bound)
    holdout = args.holdout if args.holdout is not None else held_out_prime(primes)
    _validated_primes(primes, holdout)
    if not primes:
        raise ConfigError("empty prime schedule")
    counts = {p: count_fiber_memo(FiberQuery.over_orbit(small, big, p)) for p in primes}
    verdict = "pass"
    poly_coeffs: list[int] = []
    display = ""
    try:
        poly = interpolate_qpoly(counts, bound)
        poly_coeffs = list(poly.coeffs)
        display = str(poly)
        fresh = count_fiber_memo(FiberQuery.over_orbit(small, big, holdout))
        if poly.is_zero():
            notes.append("empty fiber: small's orbit is not in the resolved closure")
        if any(c < 0 for c in poly.coeffs):
            verdict = "fail"
            notes.append("negative coefficient: paving falsified")
        if poly.evaluate(holdout) != fresh:
            verdict = "fail"
            notes.append(
                f"held-out prime {holdout}: predicted {poly.evaluate(holdout)}, counted {fresh}"
            )
        counts[holdout] = fresh
    except InterpolationError as exc:
        verdict = "fail"
        notes.append(str(exc))
    payload = {
        "schema": SCHEMA,
        "command": "fiber-poly",
        "inputs": {
            "big": {"mu": list(big.first.parts), "nu": list(big.second.parts)},
            "small": {"mu": list(small.first.parts), "nu": list(small.second.parts)},
            "primes": list(primes),
            "holdout": holdout,
        },
        "counts": {str(p): c for p, c in sorted(counts.items())},
        "polynomial": poly_coeffs,
        "display": display,
        "verdict": verdict,
        "witnesses": notes,
    }
    rows = [
        {
            "schema": SCHEMA,
            "big": format_bipartition(big),
            "small": format_bipartition(small),
            "counts": ";".join(f"{p}:{c}" for p, c in sorted(counts.items())),
            "polynomial": display,
            "verdict": verdict,
            "notes": "; ".join(notes),
        }
    ]
    columns = ["schema", "big", "small", "counts", "polynomial", "verdict", "notes"]
    _emit(args.format, payload, columns, rows, out)
    return EXIT_OK if verdict == "pass" else EXIT_CHECK_FAILED


def cmd_check(args, out) -> int:
    checks = tuple(args.checks.split(",")) if args.checks else CHECK_NAMES
    unknown = set(checks) - set(CHECK_NAMES)
    if unknown:
        raise ConfigError(
            f"unknown checks {sorted(unknown)}; available: {','.join(CHECK_NAMES)}"
        )
    if args.n is None or args.n < 0:
        raise ConfigError("check needs --n >= 0")
    if args.primes:
        primes = _parse_int_list(args.primes)
        _validated_primes(primes, None)
        recursion_primes = primes
    else:
        recursion_primes = (2,)
    instances = suite_instances(
        args.n, checks, budget=args.budget, recursion_primes=recursion_primes
    )
    reports = _run_parallel(instances, args.jobs)
    rows = []
    n_fail = n_budget = 0
    for (desc, _), report in zip(instances, reports):
        if report.verdict == "fail":
            n_fail += 1
        elif report.verdict == "budget-exceeded":
            n_budget += 1
        rows.append(
            {
                "schema": SCHEMA,
                "check": report.name,
                "inputs": json.dumps(desc, sort_keys=True),
                "verdict": report.verdict,
                "witness_digest": _witness_digest(report.witness),
                "millis": f"{report.millis:.3f}",
            }
        )
    payload = {
        "schema": SCHEMA,
        "command": "check",
        "summary": {
            "total": len(reports),
            "passed": sum(1 for r in reports if r.passed),
            "failed": n_fail,
            "budget_exceeded": n_budget,
        },
        "reports": [r.to_json_dict() for r in reports],
    }
    columns = ["schema", "check", "inputs", "verdict", "witness_digest", "millis"]
    _emit(args.format, payload, columns, rows, out)
    if n_fail or n_budget:
        print(
            f"check: {n_fail} failed, {n_budget} exceeded budget (of {len(reports)})",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_closure_order(args, out) -> int:
    if args.n is None or args.n < 0:
        raise ConfigError("closure-order needs --n >= 0")
    p = 2
    if args.primes:
        primes = _parse_int_list(args.primes)
        _validated_primes(primes, None)
        p = primes[0]
    bs = bipartitions(args.n)
    from .fibers import closure_contains

    below: dict = {
        big: {small for small in bs if small != big and closure_contains(big, small, p)}
        for big in bs
    }
    rows = []
    json_edges = []
    for big in bs:
        for small in sorted(below[big], key=lambda b: (b.first.parts, b.second.parts)):
            # transitive reduction: keep only covering relations
            if any(small in below[mid] for mid in below[big] if mid != small):
                continue
            rows.append(
                {
                    "schema": SCHEMA,
                    "big": format_bipartition(big),
                    "small": format_bipartition(small),
                }
            )
            json_edges.append(
                {
                    "big": {"mu": list(big.first.parts), "nu": list(big.second.parts)},
                    "small": {"mu": list(small.first.parts), "nu": list(small.second.parts)},
                }
            )
    payload = {"schema": SCHEMA, "command": "closure-order", "edges": json_edges}
    _emit(args.format, payload, ["schema", "big", "small"], rows, out)
    return EXIT_OK


def _run_parallel(instances, jobs: int):
    thunks = [thunk for _, thunk in instances]
    if jobs <= 1:
        return [thunk() for thunk in thunks]
    results = [None] * len(thunks)
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(thunk): i for i, thunk in enumerate(thunks)}
        for fut in concurrent.futures.as_completed(futures):
            results[futures[fut]] = fut.result()
    return results


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enhcone",
        description="Orbit census, fiber point-count polynomials and paving "
        "verifications for the enhanced nilpotent cone.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_n=True):
        if with_n:
            sp.add_argument("--n", type=int, default=None, help="total size n")
        sp.add_argument("--primes", type=str, default=None, help="comma-separated prime schedule")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--jobs", type=int, default=1, help="parallel workers")
        sp.add_argument("--cache", type=str, default=None, help="fiber-count cache file")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search budget (nodes)")

    sp = sub.add_parser("orbits", help="one row per bipartition of n")
    common(sp)
    sp.add_argument("--mu", type=str, default=None, help="single bipartition: mu parts")
    sp.add_argument("--nu", type=str, default=None, help="single bipartition: nu parts")
    sp.set_defaults(func=cmd_orbits)

    sp = sub.add_parser("fiber-poly", help="interpolated fiber point-count polynomial")
    common(sp, with_n=False)
    sp.add_argument("--big", type=str, required=True, help='resolution, e.g. "mu=3,1,1;nu=3,2"')
    sp.add_argument("--small", type=str, required=True, help='orbit point, e.g. "mu=;nu=1,1"')
    sp.add_argument("--holdout", type=int, default=None, help="held-out validation prime")
    sp.set_defaults(func=cmd_fiber_poly)

    sp = sub.add_parser("check", help="run verification suites over sizes 0..n")
    common(sp)
    sp.add_argument(
        "--checks",
        type=str,
        default=None,
        help=f"comma-separated subset of {','.join(CHECK_NAMES)}",
    )
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("closure-order", help="covering edges of the closure order")
    common(sp)
    sp.set_defaults(func=cmd_closure_order)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    cache_path = _resolve_cache_path(getattr(args, "cache", None))
    if cache_path and os.path.exists(cache_path):
        try:
            fiber_cache().load(cache_path)
        except (ValueError, OSError) as exc:
            print(f"warning: ignoring cache {cache_path}: {exc}", file=sys.stderr)
    try:
        code = args.func(args, sys.stdout)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cache_path:
        try:
            os.makedirs(os.path.dirname(cache_path) or ".", exist_ok=True)
            fiber_cache().save(cache_path)
        except OSError as exc:
            print(f"warning: could not save cache {cache_path}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
