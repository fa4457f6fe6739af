"""Command-line entry point: `primroots <subcommand> ...`.

Defaults come from PRIMROOTS_* environment variables when set, and flags
override both. Exit codes: 0 ok, 1 usage or domain error, 2 truncated
sweep, 3 internal contract violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .arith import factorize, is_prime, is_primitive_root
from .constructor import construct_simultaneous_nonresidue
from .dickman import rho, u_of, write_table_csv
from .errors import CapacityError, ContractError, DomainError
from .jsonfmt import dumps, round_floats
from .residues import (
    character_partial_sum_diagnostic,
    check_psi_lower_bound,
    count_dth_power_residues,
    least_power_nonresidue,
    psi_count,
)
from .structure import (
    DlogContext,
    jacobsthal_covering_bound,
    jacobsthal_exact,
    jacobsthal_pigeonhole_bound,
)
from .survey import SurveyConfig, run_survey

ENV_PREFIX = "PRIMROOTS_"
EXIT_OK, EXIT_USAGE, EXIT_TRUNCATED, EXIT_CONTRACT = 0, 1, 2, 3

log = logging.getLogger("primroots")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on bad usage instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env(name: str, cast: Callable, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"bad value for {ENV_PREFIX}{name}: {raw!r}")


def _float_list(s: str) -> List[float]:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _int(s: str) -> int:
    # accept 1e6 style input for sizes
    try:
        return int(s)
    except ValueError:
        v = float(s)
        if not v.is_integer():
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
        return int(v)


# ----------------------------------------------------------------- output

def _human(obj, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return pad + "{}"
        width = max(len(str(k)) for k in obj)
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{str(k):<{width}}")
                lines.append(_human(v, indent + 2))
            else:
                lines.append(f"{pad}{str(k):<{width}}  {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_human(v, indent) if isinstance(v, (dict, list)) else pad + _scalar(v) for v in obj)
    return pad + _scalar(obj)


def _scalar(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, dict)):
        return json.dumps(round_floats(v))
    return str(v)


def _emit(obj, fmt: str, out) -> None:
    if fmt == "json":
        out.write(dumps(obj) + "\n")
    elif fmt == "human":
        out.write(_human(round_floats(obj)) + "\n")
    else:
        raise UsageError("csv output is only available for survey and rho-table")


# --------------------------------------------------------------- commands

def cmd_rho(a, out) -> int:
    if a.u < 0:
        raise UsageError("u must be non-negative")
    _emit({"u": a.u, "rho": rho(a.u)}, a.format, out)
    return EXIT_OK


def cmd_u_of_d(a, out) -> int:
    u = u_of(a.d)
    _emit({"d": a.d, "u": u, "rho_u": rho(u)}, a.format, out)
    return EXIT_OK


def cmd_rho_table(a, out) -> int:
    if a.out:
        n = write_table_csv(a.out, a.u_max, a.step)
        _emit({"path": a.out, "rows": n, "u_max": a.u_max, "step": a.step}, "human" if a.format == "csv" else a.format, out)
        return EXIT_OK
    if a.format != "csv":
        raise UsageError("rho-table writes CSV; pass --out <file> or --format csv")
    from .dickman import DickmanTable

    table = DickmanTable(u_max=a.u_max, step=a.step)
    out.write("u,rho\n")
    for u, r in zip(table.grid, table.values):
        out.write(f"{u:.12g},{r:.12g}\n")
    return EXIT_OK


def _need_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise UsageError(f"{p} is not an odd prime")


def cmd_gd(a, out) -> int:
    _need_prime(a.p)
    ds = [a.d] if a.d else [q for q in factorize(a.p - 1).primes]
    rows = []
    for d in ds:
        g = least_power_nonresidue(a.p, d)
        u = u_of(d)
        # g(d) against the scale p^(1/u(d)); reported, no constant is asserted
        rows.append({"d": d, "g_d": g, "u_d": u, "ratio": g / a.p ** (1 / u)})
    _emit({"p": a.p, "values": rows}, a.format, out)
    return EXIT_OK


def cmd_psi(a, out) -> int:
    if a.check_bound:
        _emit(check_psi_lower_bound(a.x, a.y), a.format, out)
    else:
        _emit({"x": a.x, "y": a.y, "psi": psi_count(a.x, a.y)}, a.format, out)
    return EXIT_OK


def cmd_char_sums(a, out) -> int:
    _need_prime(a.p)
    _emit(character_partial_sum_diagnostic(a.p, a.d, a.H), a.format, out)
    return EXIT_OK


def cmd_jacobsthal(a, out) -> int:
    if a.n < 1:
        raise UsageError("n must be positive")
    f = factorize(a.n)
    _emit(
        {
            "n": a.n,
            "radical": f.radical,
            "omega": f.omega,
            "j": jacobsthal_exact(f),
            "pigeonhole_bound": jacobsthal_pigeonhole_bound(f),
            "covering_bound": jacobsthal_covering_bound(f.primes),
        },
        a.format,
        out,
    )
    return EXIT_OK


def cmd_dlog(a, out) -> int:
    _need_prime(a.p)
    if not 1 <= a.a < a.p:
        raise UsageError("need 1 <= a < p")
    ctx = DlogContext(a.p, generator=a.generator)
    e = ctx.log(a.a)
    if pow(ctx.generator, e, a.p) != a.a:
        raise ContractError(f"dlog check failed: {ctx.generator}^{e} != {a.a} mod {a.p}")
    _emit({"p": a.p, "a": a.a, "generator": ctx.generator, "log": e}, a.format, out)
    return EXIT_OK


def cmd_construct(a, out) -> int:
    _need_prime(a.p)
    trace = construct_simultaneous_nonresidue(a.p, a.epsilon)
    d = trace.to_dict()
    if not a.trace:
        d.pop("levels")
    _emit(d, a.format, out)
    return EXIT_OK


def cmd_survey(a, out) -> int:
    cfg = SurveyConfig(
        x_limit=a.x,
        y=a.y,
        epsilon=a.epsilon,
        delta=a.delta,
        t_list=tuple(a.t),
        out_dir=a.out,
        shards=a.shards,
        threads=a.threads,
        raw_loglog=a.raw_loglog,
        resume=a.resume,
        time_budget=a.time_budget,
    )
    report = run_survey(cfg)
    d = report.to_dict()
    if a.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("event", "numerator", "denominator", "value"))
        for k, v in d["probabilities"].items():
            w.writerow((k, v["numerator"], v["denominator"], f"{v['value']:.12g}"))
    else:
        _emit(d, a.format, out)
    return EXIT_TRUNCATED if report.truncated else EXIT_OK


def _selftest_checks(limit: int) -> Dict[str, Callable[[], bool]]:
    def construction() -> bool:
        from .arith import prime_array

        for p in prime_array(limit).tolist()[1:]:
            t = construct_simultaneous_nonresidue(p, with_least_root=False)
            if not is_primitive_root(t.result, p):
                return False
        return True

    def rho_interval() -> bool:
        return all(abs(rho(1 + k / 100) - (1 - math.log(1 + k / 100))) <= 1e-10 for k in range(101))

    def rho_inverse() -> bool:
        ok = abs(u_of(2) - math.sqrt(math.e)) <= 1e-6
        return ok and all(abs(rho(u_of(d)) - 1 / d) <= 1e-8 for d in (2, 3, 5, 10, 100, 10**6))

    def residue_counts() -> bool:
        from .arith import prime_array

        for p in prime_array(300).tolist()[1:]:
            for d in range(1, p):
                if (p - 1) % d == 0 and count_dth_power_residues(p, d) != (p - 1) // d:
                    return False
        return True

    def jacobsthal_small() -> bool:
        return [jacobsthal_exact(n) for n in (1, 2, 6, 30, 210)] == [1, 2, 4, 6, 10]

    def dlog_roundtrip() -> bool:
        p = 1000003
        ctx = DlogContext(p)
        return all(pow(ctx.generator, ctx.log(a), p) == a for a in (2, 3, 12345, p - 1))

    return {
        "construction_sweep": construction,
        "rho_on_1_2": rho_interval,
        "rho_inverse": rho_inverse,
        "residue_counts": residue_counts,
        "jacobsthal_small": jacobsthal_small,
        "dlog_roundtrip": dlog_roundtrip,
    }


def cmd_selftest(a, out) -> int:
    results = {}
    for name, fn in _selftest_checks(a.limit).items():
        start = time.monotonic()
        try:
            ok = bool(fn())
        except Exception as exc:  # a crash is a failed check, reported not raised
            log.error("selftest %s raised %r", name, exc)
            ok = False
        results[name] = {"pass": ok, "seconds": round(time.monotonic() - start, 3)}
    summary = {"limit": a.limit, "checks": results, "all_pass": all(r["pass"] for r in results.values())}
    if a.format == "human":
        for name, r in results.items():
            out.write(f"{'PASS' if r['pass'] else 'FAIL'}  {name}\n")
    else:
        _emit(summary, a.format, out)
    return EXIT_OK if summary["all_pass"] else EXIT_CONTRACT


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "human"), default=_env("FORMAT", str, "json"),
                        help="output mode (env PRIMROOTS_FORMAT; default json)")
    common.add_argument("--log-level", default=_env("LOG_LEVEL", str, "WARNING"), help="logging level")

    parser = _Parser(prog="primroots", description="Least primitive roots, power non-residues and the tools around them.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name: str, fn, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help, description=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("rho", cmd_rho, "Dickman function rho(u)")
    sp.add_argument("--u", type=float, required=True)

    sp = add("u-of-d", cmd_u_of_d, "solve rho(u) = 1/d for u")
    sp.add_argument("--d", type=float, required=True)

    sp = add("rho-table", cmd_rho_table, "tabulate rho on a uniform grid as CSV")
    sp.add_argument("--u-max", "--umax", dest="u_max", type=float, default=_env("U_MAX", float, 20.0))
    sp.add_argument("--step", type=float, default=_env("STEP", float, 0.01))
    sp.add_argument("--out", help="CSV file to write (stdout with --format csv)")

    sp = add("gd", cmd_gd, "least d-th power non-residue mod p (every prime d | p-1 when --d is omitted)")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--d", type=_int)

    sp = add("psi", cmd_psi, "count y-smooth n <= x and compare with x rho(u)")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--check-bound", action="store_true", help="also compare with x rho(log x / log y)")

    sp = add("char-sums", cmd_char_sums, "largest normalised partial sum of order-d characters mod p")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--d", type=_int, required=True)
    sp.add_argument("--H", "--h", dest="H", type=_int, required=True)

    sp = add("jacobsthal", cmd_jacobsthal, "exact Jacobsthal function j(n) with cheap bounds")
    sp.add_argument("--n", type=_int, required=True)

    sp = add("dlog", cmd_dlog, "discrete logarithm of a mod p")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--a", type=_int, required=True)
    sp.add_argument("--generator", type=_int, help="base (default: least primitive root)")

    sp = add("construct", cmd_construct, "build a primitive root from least prime-power non-residues")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--epsilon", type=float, default=_env("EPSILON", float, 0.01))
    sp.add_argument("--trace", action="store_true", help="include the per-level trace")

    sp = add("survey", cmd_survey, "sweep primes up to x and report the condition and distribution statistics")
    sp.add_argument("--x", type=_int, required=True)
    sp.add_argument("--y", type=float, default=_env("Y", float, 3.0))
    sp.add_argument("--epsilon", type=float, default=_env("EPSILON", float, 0.01))
    sp.add_argument("--delta", type=float, default=_env("DELTA", float, 0.1))
    sp.add_argument("--t", type=_float_list, default=_env("T", _float_list, [100.0, 1000.0]), help="comma-separated thresholds")
    sp.add_argument("--out", default=_env("OUT", str, None), help="output directory for records and tables")
    sp.add_argument("--shards", type=int, default=_env("SHARDS", int, 1))
    sp.add_argument("--threads", type=int, default=_env("THREADS", int, 1), help="cap on worker processes")
    sp.add_argument("--raw-loglog", action="store_true", help="use loglog x without the floor at 1")
    sp.add_argument("--resume", action="store_true", help="reuse finished shards found in --out")
    sp.add_argument("--time-budget", type=float, default=_env("TIME_BUDGET", float, None), help="seconds per shard")

    sp = add("selftest", cmd_selftest, "run the built-in oracle checks")
    sp.add_argument("--limit", type=_int, default=_env("SELFTEST_LIMIT", _int, 10**4), help="construction sweep bound")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        parser = build_parser()
    except UsageError as exc:
        sys.stderr.write(f"primroots: {exc}\n")
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except (UsageError, DomainError, CapacityError) as exc:
        sys.stderr.write(f"primroots {args.command}: {exc}\n")
        return EXIT_USAGE
    except ContractError as exc:
        sys.stderr.write(f"primroots {args.command}: contract violation: {exc}\n")
        sys.stderr.write(dumps({"error": str(exc), "context": repr(exc.context)}) + "\n")
        return EXIT_CONTRACT


def console() -> None:
    sys.exit(main())
