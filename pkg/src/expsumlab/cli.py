"""Command line interface: sums, energies, case scans, traces, identities.

Exit codes: 0 success, 1 identity/assertion failure, 2 bad input,
3 resource budget exceeded.  Primary output is byte-identical for the same
inputs regardless of --threads (independent per-case work, sorted emission,
fixed summation orders).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import bounds
from .energy import energy_via_moments, j_count, representation_counts
from .errors import InputError, ResourceError
from .expsum import DEFAULT_DENSE_LIMIT, Interval, all_sums, interval_subgroup_sum, max_sum
from .field import PrimeModulus, divisors, is_prime
from .prooftrace import (
    DEFAULT_TRILINEAR_BUDGET,
    EmptyTraceError,
    TraceResult,
    build_trace,
    moment_inequality_check,
)
from .subgroup import subgroup_of_order

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3

CSV_HEADER = "p,H,N,L,a_star,max_abs_sum,thm1,thm2,thm3,ratio1,ratio2,ratio3,T2,T3,J,gamma"
CSV_FIELDS = CSV_HEADER.split(",")

JSON_SCHEMA_VERSION = 1


@dataclass
class ScanConfig:
    """Case enumeration and budgets for the scan harness."""

    p_min: int
    p_max: int
    alpha_lo: float = 0.25
    alpha_hi: float = 0.5
    interval_start: int = 0
    interval_length: int | None = None
    interval_power: float | None = None
    moments: tuple[int, ...] = ()
    threads: int = 1
    fmt: str = "csv"
    output: str | None = None
    dense_limit: int = DEFAULT_DENSE_LIMIT
    strategy: str = "auto"

    def __post_init__(self) -> None:
        if self.p_min > self.p_max:
            raise InputError(f"p_min {self.p_min} exceeds p_max {self.p_max}")
        if not 0 < self.alpha_lo <= self.alpha_hi <= 1:
            raise InputError("window must satisfy 0 < alpha_lo <= alpha_hi <= 1")
        if self.threads < 1:
            raise InputError("thread count must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise InputError(f"unknown format {self.fmt!r}")
        for m in self.moments:
            if m not in (2, 3):
                raise InputError(f"moments must be 2 and/or 3, got {m}")


@dataclass
class FitResult:
    """Least-squares fit of log(max|S_a|/H) = -delta_hat * log H + intercept."""

    band: str
    delta_hat: float
    intercept: float
    residual_norm: float
    cases: int


def _enumerate_cases(config: ScanConfig) -> list[tuple[int, int]]:
    cases = []
    lo = config.p_min if config.p_min % 2 else config.p_min + 1
    for p in range(max(lo, 3), config.p_max + 1, 2):
        if not is_prime(p):
            continue
        logp = math.log(p)
        for h in divisors(p - 1):
            if h < 2:
                continue
            ratio = math.log(h) / logp
            if config.alpha_lo <= ratio <= config.alpha_hi:
                cases.append((p, h))
    return cases


def _resolve_interval(config_dict: dict, p: int) -> Interval | None:
    length = config_dict["interval_length"]
    if length is None and config_dict["interval_power"] is not None:
        length = max(1, min(p, round(p ** config_dict["interval_power"])))
    if length is None:
        return None
    return Interval(start=config_dict["interval_start"], length=length)


def _scan_case(args: tuple[int, int, dict]) -> dict:
    p, h, cfg = args
    row: dict = {key: None for key in CSV_FIELDS}
    row["p"], row["H"] = p, h
    row["error"] = None
    try:
        pm = PrimeModulus.from_int(p)
        sub = subgroup_of_order(pm, h)
        table = all_sums(sub, strategy=cfg["strategy"], dense_limit=cfg["dense_limit"])
        a_star, mx = max_sum(sub, table=table)
        row["a_star"] = a_star
        row["max_abs_sum"] = mx
        t1 = bounds.thm1_bound(p, h)
        row["thm1"] = t1
        row["ratio1"] = mx / t1
        interval = _resolve_interval(cfg, p)
        if interval is not None:
            n_len = interval.length
            row["N"], row["L"] = n_len, interval.start
            row["gamma"] = bounds.gamma(p, n_len, h)
            row["thm2"] = bounds.thm2_bound(p, n_len, h)
            row["thm3"] = bounds.thm3_bound(p, n_len, h)
            s_int = interval_subgroup_sum(a_star, interval, sub, table=table)
            row["ratio2"] = s_int / row["thm2"]
            row["ratio3"] = s_int / row["thm3"]
            row["J"] = j_count(interval, sub).energy
        for m in cfg["moments"]:
            prof = representation_counts(sub, m)
            row[f"T{m}"] = prof.energy
            moment = energy_via_moments(table, m)
            if round(moment) != prof.energy:
                row["error"] = f"moment identity mismatch for m={m}: {moment!r} vs {prof.energy}"
    except (InputError, ResourceError) as exc:
        row["error"] = str(exc)
    return row


def _fit_band(rows: list[dict], band: str) -> FitResult | None:
    xs = [math.log(r["H"]) for r in rows]
    ys = [math.log(r["max_abs_sum"] / r["H"]) for r in rows]
    if len(xs) < 2 or len(set(xs)) < 2:
        return None
    slope, intercept = statistics.linear_regression(xs, ys)
    resid = math.sqrt(sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys)))
    return FitResult(band, -slope, intercept, resid, len(xs))


def fit_scan_rows(rows: list[dict]) -> list[FitResult]:
    """Per-band and overall decay fits of the scan's maxima."""
    usable = [r for r in rows if r.get("max_abs_sum") and r["max_abs_sum"] > 0]
    fits = []
    bands: dict[int, list[dict]] = {}
    for r in usable:
        bands.setdefault(r["p"].bit_length() - 1, []).append(r)
    for k in sorted(bands):
        fit = _fit_band(bands[k], f"2^{k}<=p<2^{k + 1}")
        if fit is not None:
            fits.append(fit)
    overall = _fit_band(usable, "all")
    if overall is not None:
        fits.append(overall)
    return fits


def run_scan(config: ScanConfig) -> tuple[list[dict], list[FitResult]]:
    """Compute all scan rows (sorted by (p, H)) plus the exponent fits."""
    cases = _enumerate_cases(config)
    cfg = {
        "dense_limit": config.dense_limit,
        "strategy": config.strategy,
        "interval_start": config.interval_start,
        "interval_length": config.interval_length,
        "interval_power": config.interval_power,
        "moments": tuple(config.moments),
    }
    work = [(p, h, cfg) for p, h in cases]
    if config.threads > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            chunk = max(1, len(work) // (4 * config.threads))
            rows = list(pool.map(_scan_case, work, chunksize=chunk))
    else:
        rows = [_scan_case(item) for item in work]
    rows.sort(key=lambda r: (r["p"], r["H"]))
    return rows, fit_scan_rows(rows)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_scan_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for row in rows:
        out.write(",".join(_format_cell(row[f]) for f in CSV_FIELDS) + "\n")
    return out.getvalue()


def render_scan_json(rows: list[dict], fits: list[FitResult]) -> str:
    doc = {
        "schema": JSON_SCHEMA_VERSION,
        "rows": [{k: row[k] for k in CSV_FIELDS + ["error"]} for row in rows],
        "fits": [vars(f) for f in fits],
    }
    return json.dumps(doc, indent=1) + "\n"


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def trace_document(trace: TraceResult, moment_checks=()) -> dict:
    doc: dict = {
        "schema": JSON_SCHEMA_VERSION,
        "p": trace.p,
        "H": trace.order,
        "a": trace.a,
        "degenerate": trace.degenerate,
        "reason": trace.reason,
    }
    if trace.cascade is not None:
        c = trace.cascade
        doc["cascade"] = {
            "delta": c.delta,
            "delta1": c.delta1,
            "delta2": c.delta2,
            "delta3": c.delta3,
            "i0": list(c.i0),
            "delta1_meas": c.delta1_meas,
            "delta2_meas": c.delta2_meas,
            "delta3_meas": c.delta3_meas,
        }
    if trace.sets is not None:
        s = trace.sets
        doc["sets"] = {
            "x_size": int(s.x.size),
            "y_size": int(s.y.size),
            "z_size": int(s.z.size),
            "g1": s.g1,
            "g2": s.g2,
            "g3": s.g3,
        }
    doc["checks"] = [
        {
            "name": c.name,
            "relation": c.relation,
            "lhs": c.lhs,
            "rhs": c.rhs,
            "exact": c.exact,
            "pass": c.passed,
            "note": c.note,
        }
        for c in trace.checks
    ]
    doc["reported"] = {k: v for k, v in trace.reported.items()}
    doc["trilinear"] = {
        "spectral_sum": trace.trilinear_sum,
        "direct_sum": trace.trilinear_direct,
        "bound_ratio": trace.trilinear_bound_ratio,
    }
    if moment_checks:
        doc["moment_checks"] = [
            {
                "name": c.name,
                "relation": c.relation,
                "lhs": c.lhs,
                "rhs": c.rhs,
                "pass": c.passed,
                "note": c.note,
            }
            for c in moment_checks
        ]
    return doc


def _prepare_sub(args):
    pm = PrimeModulus.from_int(args.prime)
    return pm, subgroup_of_order(pm, args.order)


def cmd_sum(args) -> int:
    _, sub = _prepare_sub(args)
    p, h = sub.p, sub.order
    table = all_sums(sub, strategy=args.strategy, dense_limit=args.dense_limit)
    if args.a is not None:
        a = args.a % p
        label = f"|S_{a}|"
        value = float(table.magnitudes[a])
    else:
        a, value = max_sum(sub, table=table)
        label = f"max over a of |S_a| (a* = {a})"
    t1 = bounds.thm1_bound(p, h)
    marker = "in-range" if bounds.thm1_in_range(p, h) else "out-of-range"
    print(f"p = {p}  H = {h}")
    print(f"{label} = {value!r}")
    print(f"thm1 = {t1!r}  ratio = {value / t1!r}  ({marker}: p^(1/4) < H < p^(1/2))")
    return EXIT_OK


def cmd_energy(args) -> int:
    _, sub = _prepare_sub(args)
    p, h = sub.p, sub.order
    if args.m not in (1, 2, 3):
        raise InputError(f"m must be 1, 2 or 3, got {args.m}")
    prof = representation_counts(sub, args.m)
    table = all_sums(sub, strategy=args.strategy, dense_limit=args.dense_limit)
    moment = energy_via_moments(table, args.m)
    agrees = round(moment) == prof.energy
    print(f"p = {p}  H = {h}  m = {args.m}")
    print(f"T_{args.m} = {prof.energy}")
    print(f"moment identity p^-1 * sum |S_a|^(2m) = {moment!r}  rounds to T_{args.m}: {agrees}")
    if args.m in (2, 3):
        b = bounds.t2_energy_bound(h) if args.m == 2 else bounds.t3_energy_bound(h)
        label = "H^(49/20) log^(1/5) H" if args.m == 2 else "H^4 log H"
        # the energy bound assumes H < sqrt(p); log ratios below 1 only distort
        applicable = b is not None and math.log(h) >= 1.0 and h * h < p
        ratio = prof.energy / b if applicable else None
        print(f"ratio T_{args.m} / ({label}) = {_format_cell(ratio) or 'n/a'}")
    return EXIT_OK if agrees else EXIT_CHECK_FAILED


def cmd_scan(args) -> int:
    moments = tuple(int(v) for v in args.m.split(",") if v) if args.m else ()
    config = ScanConfig(
        p_min=args.p_min,
        p_max=args.p_max,
        alpha_lo=args.alpha_lo,
        alpha_hi=args.alpha_hi,
        interval_start=args.interval_start or 0,
        interval_length=args.interval_length,
        interval_power=args.interval_power,
        moments=moments,
        threads=args.threads,
        fmt=args.format,
        output=args.output,
        dense_limit=args.dense_limit,
        strategy=args.strategy,
    )
    rows, fits = run_scan(config)
    if not rows:
        print("warning: no (p, H) case matches the window", file=sys.stderr)
    if config.fmt == "csv":
        _write_output(render_scan_csv(rows), config.output)
        for f in fits:
            print(
                f"# fit band={f.band} delta_hat={f.delta_hat!r} intercept={f.intercept!r} "
                f"residual={f.residual_norm!r} cases={f.cases}",
                file=sys.stderr,
            )
    else:
        _write_output(render_scan_json(rows, fits), config.output)
    failures = [r for r in rows if r["error"]]
    for r in failures:
        print(f"warning: case p={r['p']} H={r['H']}: {r['error']}", file=sys.stderr)
    if rows and len(failures) == len(rows):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_trace(args) -> int:
    _, sub = _prepare_sub(args)
    table = all_sums(sub, strategy=args.strategy, dense_limit=args.dense_limit)
    a = args.a
    try:
        trace = build_trace(
            sub, a=a, table=table, trilinear_budget=args.trilinear_budget
        )
    except EmptyTraceError as exc:
        if a is None:
            a, _ = max_sum(sub, table=table)
        trace = TraceResult(
            p=sub.p,
            order=sub.order,
            a=int(a),
            degenerate=True,
            reason=str(exc),
            cascade=None,
            sets=None,
            checks=[],
            reported={},
        )
    moment_checks = []
    if args.interval_length is not None:
        interval = Interval(start=args.interval_start or 0, length=args.interval_length)
        for m in (2, 3):
            moment_checks.append(
                moment_inequality_check(interval, sub, trace.a, m, table=table)
            )
    doc = trace_document(trace, moment_checks)
    _write_output(json.dumps(doc, indent=1) + "\n", args.output)
    ok = trace.degenerate or (trace.all_passed and all(c.passed for c in moment_checks))
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_identities(args) -> int:
    suite = bounds.exponent_identity_suite()
    width = max(len(c.name) for c in suite)
    for c in suite:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    return EXIT_OK if all(c.passed for c in suite) else EXIT_CHECK_FAILED


def _env_threads() -> int:
    raw = os.environ.get("EXPSUM_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expsumlab",
        description="exponential sums over multiplicative subgroups of prime fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, order_required=True):
        sp.add_argument("--prime", type=int, required=True, help="odd prime modulus p")
        sp.add_argument(
            "--order",
            type=int,
            required=order_required,
            help="subgroup order H (must divide p-1)",
        )
        sp.add_argument(
            "--dense-limit",
            type=int,
            default=DEFAULT_DENSE_LIMIT,
            help="largest p for which dense length-p tables are allowed",
        )
        sp.add_argument(
            "--strategy",
            choices=("auto", "direct", "transform"),
            default="auto",
            help="table construction strategy (auto: direct while p*H is small)",
        )

    p_sum = sub.add_parser("sum", help="single or maximal |S_a| plus the closed-form bound")
    add_common(p_sum)
    p_sum.add_argument("--a", type=int, default=None, help="residue a (default: maximize)")
    p_sum.set_defaults(func=cmd_sum)

    p_energy = sub.add_parser("energy", help="exact T_m with the moment-identity cross-check")
    add_common(p_energy)
    p_energy.add_argument("--m", type=int, default=2, help="fold count m in {1,2,3}")
    p_energy.set_defaults(func=cmd_energy)

    p_scan = sub.add_parser("scan", help="sweep (p, H) cases and emit CSV/JSON rows plus fits")
    p_scan.add_argument("--p-min", type=int, required=True)
    p_scan.add_argument("--p-max", type=int, required=True)
    p_scan.add_argument("--alpha-lo", type=float, default=0.25, help="window: log H / log p >= alpha-lo")
    p_scan.add_argument("--alpha-hi", type=float, default=0.5, help="window: log H / log p <= alpha-hi")
    p_scan.add_argument("--m", type=str, default="", help="comma list of moments to compute (2,3)")
    p_scan.add_argument("--interval-start", type=int, default=None)
    p_scan.add_argument("--interval-length", type=int, default=None)
    p_scan.add_argument("--interval-power", type=float, default=None, help="N = round(p^power)")
    p_scan.add_argument("--threads", type=int, default=None)
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.add_argument("--output", type=str, default=None)
    p_scan.add_argument("--dense-limit", type=int, default=DEFAULT_DENSE_LIMIT)
    p_scan.add_argument("--strategy", choices=("auto", "direct", "transform"), default="auto")
    p_scan.set_defaults(func=cmd_scan)

    p_trace = sub.add_parser("trace", help="run the dyadic cascade and report every check")
    add_common(p_trace)
    p_trace.add_argument("--a", type=int, default=None, help="residue a (default: maximize)")
    p_trace.add_argument("--interval-start", type=int, default=None)
    p_trace.add_argument("--interval-length", type=int, default=None)
    p_trace.add_argument("--trilinear-budget", type=int, default=DEFAULT_TRILINEAR_BUDGET)
    p_trace.add_argument("--output", type=str, default=None)
    p_trace.set_defaults(func=cmd_trace)

    p_ident = sub.add_parser("identities", help="verify the exact rational exponent identities")
    p_ident.set_defaults(func=cmd_identities)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is None and args.command == "scan":
        args.threads = _env_threads()
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
