"""Command-line front end: ``confboot {bound,figure1,table1,scenario,validate}``.

Exit codes: 0 success, 1 a validation check failed, 2 bad arguments or input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .errors import ConfbootError
from .horizon import Anticipation, k_linear, scenario_trace
from .inference import (
    PfdBounded,
    PfdZero,
    extension_coefficient,
    worst_case_posterior,
    worst_case_prior,
)
from .oracles import SimulationConfig, atom_grid_worst_case, monte_carlo_conditional_survival
from .schedule import DeploymentSchedule, load_schedule

TABLE1_PP = (0.92, 0.82, 0.72, 0.5, 0.1)
FIGURE1_PP = (0.5, 0.72, 0.82, 0.9, 0.92)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _formatter(precision):
    digits = 17 if precision == "full" else 6

    def fmt(value):
        if isinstance(value, str):
            return value
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, f".{digits}g")

    return fmt


def parse_grid(spec, *, allow_zero=False):
    """``start:stop:step`` (inclusive of stop) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, step = (float(v) for v in spec.split(":"))
            if not (start < stop and step > 0):
                raise UsageError(f"grid {spec!r}: need start < stop and step > 0")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(n)]
        else:
            values = [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {spec!r}") from exc
    if not values:
        raise UsageError(f"grid {spec!r} is empty")
    if any(v < 0 or (v == 0 and not allow_zero) or not math.isfinite(v) for v in values):
        raise UsageError(f"grid {spec!r} has out-of-range values")
    return values


def _constraint(args, required=True):
    if args.pp is not None:
        if args.pl is not None or args.ql is not None:
            raise UsageError("give either --pp or --pl/--ql, not both")
        return PfdZero(args.pp)
    if args.pl is not None or args.ql is not None:
        if args.pl is None or args.ql is None:
            raise UsageError("--pl and --ql must be given together")
        return PfdBounded(args.pl, args.ql)
    if required:
        raise UsageError("a prior-knowledge constraint is required: --pp or --pl/--ql")
    return None


def _emit_table(args, header, rows):
    fmt = _formatter(args.precision)
    if args.format == "json":
        text = json.dumps(
            [{h: fmt(v) if isinstance(v, float) and not math.isfinite(v) else v
              for h, v in zip(header, row)} for row in rows],
            indent=2,
        ) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        text = buf.getvalue()
    _write(args, text)


def _write(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bound(args):
    constraint = _constraint(args)
    res = worst_case_posterior(constraint, args.tpast, args.tfut)
    fmt = _formatter(args.precision)
    fields = {
        "bound": res.bound,
        "minimizer_q": res.minimizer_q,
        "mishap_probability": res.mishap_probability,
    }
    if args.format == "json":
        _write(args, json.dumps(fields, indent=2) + "\n")
    else:
        _write(args, "".join(f"{k}: {fmt(v)}\n" for k, v in fields.items()))
    return EXIT_OK


def cmd_figure1(args):
    ratios = parse_grid(args.ratios, allow_zero=True)
    rows = []
    for pp in args.pp:
        for rho in ratios:
            bound = 1.0 if rho == 0 else worst_case_posterior(PfdZero(pp), 1.0, rho).bound
            rows.append((pp, rho, 1.0 - bound))
    _emit_table(args, ("pp", "ratio", "mishap_prob"), rows)
    return EXIT_OK


def cmd_table1(args):
    rows = []
    for pp in args.pp:
        k = extension_coefficient(PfdZero(pp), args.confidence, 1.0)
        rows.append((pp, k, k_linear(k)))
    _emit_table(args, ("pp", "k", "k_linear"), rows)
    return EXIT_OK


def _read_schedule(args):
    if (args.schedule is None) == (args.schedule_json is None):
        raise UsageError("give exactly one of --schedule or --schedule-json")
    if args.schedule_json is not None:
        return DeploymentSchedule.from_json(args.schedule_json)
    try:
        return load_schedule(args.schedule)
    except OSError as exc:
        raise UsageError(f"cannot read schedule file: {exc}") from exc


def cmd_scenario(args):
    schedule = _read_schedule(args)
    constraint = _constraint(args, required=False)
    if (args.k is None) == (constraint is None):
        raise UsageError("give either --k or a constraint (--pp or --pl/--ql) with --confidence")
    if args.k is not None:
        k = args.k
    else:
        if args.confidence is None:
            raise UsageError("--confidence is required with a constraint")
        if isinstance(constraint, PfdZero):
            k = extension_coefficient(constraint, args.confidence, 1.0)
        else:
            k = lambda t_past: extension_coefficient(constraint, args.confidence, t_past)  # noqa: E731
    anticipation = Anticipation.UNAWARE if args.unaware else Anticipation.AWARE
    trace = scenario_trace(schedule, k, parse_grid(args.grid), anticipation)
    rows = [(r.t, r.fleet, r.T_past, r.t_hor, r.ratio) for r in trace.rows]
    _emit_table(args, trace.columns, rows)
    for r in trace.rows:
        if not r.valid:
            print(f"warning: t={r.t:g}: {r.error}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args):
    constraint = _constraint(args)
    fmt = _formatter(args.precision)
    engine = worst_case_posterior(constraint, args.tpast, args.tfut).bound
    oracle = atom_grid_worst_case(
        constraint, args.tpast, args.tfut, args.grid_size, good_grid_size=args.good_grid_size
    )
    prior = worst_case_prior(constraint, args.tpast, args.tfut)
    config = SimulationConfig(args.mc_samples, args.seed, args.tpast, args.tfut, prior)
    estimate, se = monte_carlo_conditional_survival(config, workers=args.workers)

    gap = oracle - engine
    checks = [
        ("oracle_dominance", oracle >= engine - 1e-12),
        ("oracle_gap", gap <= args.max_gap),
        ("mc_conservatism", estimate + 3.0 * se >= engine),
    ]
    lines = [
        f"engine_bound: {fmt(engine)}",
        f"grid_oracle_bound: {fmt(oracle)}",
        f"gap: {fmt(gap)}",
        f"monte_carlo: {fmt(estimate)} +/- {fmt(se)}",
    ]
    lines += [f"{name}: {'PASS' if ok else 'FAIL'}" for name, ok in checks]
    passed = all(ok for _, ok in checks)
    lines.append(f"result: {'PASS' if passed else 'FAIL'}")
    _write(args, "\n".join(lines) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def _add_constraint(p):
    p.add_argument("--pp", type=float, help="prior probability that pfd = 0")
    p.add_argument("--pl", type=float, help="prior probability that pfd <= q_L")
    p.add_argument("--ql", type=float, help="pfd bound q_L")


def _add_output(p, table=True):
    p.add_argument("--out", help="write to this path instead of stdout")
    p.add_argument("--precision", choices=("human", "full"), default="human",
                   help="6 (human) or 17 (full) significant digits")
    if table:
        p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="confboot",
        description="Conservative confidence in mishap-free operation from mishap-free history.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="worst-case probability of no mishap over t_fut demands")
    _add_constraint(p)
    p.add_argument("--tpast", type=float, required=True)
    p.add_argument("--tfut", type=float, required=True)
    _add_output(p, table=False)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("figure1", help="mishap probability against t_fut/t_past")
    p.add_argument("--pp", type=float, nargs="+", default=list(FIGURE1_PP))
    p.add_argument("--ratios", default="0:10:0.5", help="start:stop:step or a,b,c")
    _add_output(p)
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("table1", help="extension coefficients k and k_linear")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--pp", type=float, nargs="+", default=list(TABLE1_PP))
    _add_output(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("scenario", help="confidence horizon over a deployment schedule")
    p.add_argument("--schedule", help="path to a schedule JSON document")
    p.add_argument("--schedule-json", help="schedule JSON given inline")
    p.add_argument("--k", type=float, help="extension coefficient")
    _add_constraint(p)
    p.add_argument("--confidence", type=float)
    p.add_argument("--grid", required=True, help="time grid, start:stop:step or a,b,c")
    p.add_argument("--unaware", action="store_true",
                   help="ignore future production changes")
    _add_output(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("validate", help="cross-check a bound against grid and Monte Carlo oracles")
    _add_constraint(p)
    p.add_argument("--tpast", type=float, required=True)
    p.add_argument("--tfut", type=float, required=True)
    p.add_argument("--grid-size", type=int, default=10_000)
    p.add_argument("--good-grid-size", type=int, default=200,
                   help="grid for the constrained atom (--pl/--ql only)")
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=20211020)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-gap", type=float, default=1e-3)
    _add_output(p, table=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfbootError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
