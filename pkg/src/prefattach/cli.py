"""Command-line entry point: ``prefattach {table,closed,simulate,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage error (including an
output path that cannot be written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Sequence

from . import closed_form, recurrence, validation
from .combinatorics import LogFloat
from .simulator import RESIDUAL_RULES, SimulationConfig, SimulationError, run_trials

SCHEMA_VERSION = "1"
DIGITS = 12
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CSV_HEADER = ("m", "n", "k", "exact", "approx")


class UsageError(Exception):
    pass


def exact_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction) -> str:
    if x == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = DIGITS
        return str(Decimal(x.numerator) / Decimal(x.denominator))


def log_decimal_str(x: LogFloat) -> str:
    if x.is_zero:
        return "0"
    if abs(x.log_value) < 700:
        return f"{math.exp(x.log_value):.{DIGITS}g}"
    e10 = x.log_value / math.log(10)
    exponent = math.floor(e10)
    return f"{10 ** (e10 - exponent):.{DIGITS - 1}f}e{exponent:+d}"


def write_atomic(path: str | None, text: str) -> None:
    """Write all of ``text`` to ``path`` or nothing; ``None`` means stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".prefattach-", suffix=".tmp")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise UsageError(f"cannot write {path}: {exc}") from exc


def json_document(command: str, params: dict[str, Any], results: list[dict[str, Any]]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "results": results,
    }
    return json.dumps(doc, indent=2) + "\n"


def _prob_record(m: int, n: int, k: int, value: Fraction, kind: str = "prob_row") -> dict[str, Any]:
    return {
        "kind": kind,
        "m": m,
        "n": n,
        "k": k,
        "exact": exact_str(value),
        "approx": decimal_str(value),
    }


def cmd_table(args: argparse.Namespace) -> int:
    if args.m < 1 or args.n_max < args.m:
        raise UsageError(f"need 1 <= m <= n_max, got m={args.m}, n_max={args.n_max}")
    table = recurrence.general_node_table(args.m, args.n_max)
    records = [
        _prob_record(row.m, row.n, k, p) for row in table for k, p in row.items()
    ]
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([rec[col] for col in CSV_HEADER])
        text = buf.getvalue()
    else:
        text = json_document("table", {"m": args.m, "n_max": args.n_max}, records)
    write_atomic(args.output, text)
    return EXIT_OK


def cmd_closed(args: argparse.Namespace) -> int:
    n, k = args.n, args.k
    if n < 1 or not 1 <= k <= n:
        raise UsageError(f"need 1 <= k <= n, got n={n}, k={k}")
    lines: list[str] = []
    record: dict[str, Any] = {"kind": "prob_row", "m": 1, "n": n, "k": k}
    if args.mode in ("exact", "both"):
        exact = closed_form.p_closed(n, k).exact
        assert exact is not None
        lines.append(exact_str(exact))
        record["exact"] = exact_str(exact)
        record["approx"] = decimal_str(exact)
    if args.mode in ("float", "both"):
        approx = closed_form.p_closed_float(n, k).approx
        assert approx is not None
        lines.append(log_decimal_str(approx))
        record["float"] = log_decimal_str(approx)
        record["log"] = repr(approx.log_value)
    if args.format == "json":
        text = json_document("closed", {"n": n, "k": k, "mode": args.mode}, [record])
    else:
        text = "\n".join(lines) + "\n"
    write_atomic(args.output, text)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = SimulationConfig(args.sim_mode, args.m, args.n, args.trials, args.seed, args.residual)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    empirical = run_trials(config, workers=args.workers)
    params = {
        "mode": config.mode,
        "m": config.m,
        "n": config.n,
        "trials": config.trials,
        "seed": config.master_seed,
        "residual": config.residual,
    }
    record = {
        "kind": "empirical",
        "m": empirical.m,
        "n": empirical.n,
        "trials": empirical.trials,
        "master_seed": empirical.master_seed,
        "counts": {str(k): empirical.counts.get(k, 0) for k in range(1, config.n - config.m + 2)},
    }
    write_atomic(args.output, json_document("simulate", params, [record]))
    return EXIT_OK


def _mismatch_records(report: validation.EquivalenceReport, limit: int = 10) -> list[dict[str, Any]]:
    return [
        {
            "n": mm.n,
            "k": mm.k,
            "label": mm.label,
            "left": exact_str(mm.left),
            "right": exact_str(mm.right),
        }
        for mm in report.mismatches[:limit]
    ]


def _equivalence_record(report: validation.EquivalenceReport) -> dict[str, Any]:
    return {
        "kind": "equivalence",
        "name": report.name,
        "n_max": report.n_max,
        "cells": report.cells,
        "mismatch_count": len(report.mismatches),
        "mismatches": _mismatch_records(report),
        "gated": report.gated,
        "passed": report.passed,
    }


def _identity_record(name: str, k_max: int, r_max: int, failures: list[tuple[int, int]]) -> dict[str, Any]:
    return {
        "kind": "identity",
        "name": name,
        "k_range": [2, k_max],
        "r_range": [0, r_max],
        "failures": [list(kr) for kr in failures[:10]],
        "failure_count": len(failures),
        "passed": not failures,
    }


def _stat_record(label: str, mode: str, m: int, n: int, seed: int, stat: validation.StatReport) -> dict[str, Any]:
    return {
        "kind": "stat",
        "name": label,
        "mode": mode,
        "m": m,
        "n": n,
        "seed": seed,
        "trials": stat.trials,
        "tv_distance": stat.tv_distance,
        "chi_square_statistic": stat.chi_square_statistic,
        "degrees_of_freedom": stat.degrees_of_freedom,
        "critical_value": stat.critical_value if stat.testable else None,
        "testable": stat.testable,
        "passed": stat.passed,
    }


def cmd_validate(args: argparse.Namespace) -> int:
    for name in ("n_max", "k_max", "r_max", "step_k_max", "step_r_max", "sim_n", "trials"):
        if getattr(args, name) < 0 or (name in ("n_max", "trials", "sim_n") and getattr(args, name) < 1):
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    results: list[dict[str, Any]] = []
    failures: list[str] = []

    report = validation.check_equivalence(args.n_max)
    results.append(_equivalence_record(report))
    if not report.passed:
        failures.append(report.name)
        for mm in report.mismatches[:10]:
            print(f"mismatch {mm.label}[{mm.n},{mm.k}]: recurrence {exact_str(mm.left)} "
                  f"closed form {exact_str(mm.right)}", file=sys.stderr)

    bad = [
        (k, r)
        for k in range(2, args.k_max + 1)
        for r in range(args.r_max + 1)
        if not validation.check_induction_identity(k, r)
    ]
    results.append(_identity_record("induction_identity", args.k_max, args.r_max, bad))
    bad_step = [
        (k, r)
        for k in range(2, args.step_k_max + 1)
        for r in range(args.step_r_max + 1)
        if not validation.check_step_identity(k, r)
    ]
    results.append(_identity_record("step_identity", args.step_k_max, args.step_r_max, bad_step))
    for name, items in (("induction_identity", bad), ("step_identity", bad_step)):
        if items:
            failures.append(name)
            print(f"{name} fails at (k, r) = {items[:10]}", file=sys.stderr)

    micro = validation.check_graph_micro_oracle(4, nodes="all", residual=args.residual)
    results.append(_equivalence_record(micro))
    if not micro.passed:
        failures.append(micro.name)
        for mm in micro.mismatches[:10]:
            print(f"micro-oracle {mm.label} n={mm.n} k={mm.k}: enumerated {exact_str(mm.left)} "
                  f"recurrence {exact_str(mm.right)}", file=sys.stderr)

    n = args.sim_n
    sim_cases = [("marginal", 1), ("graph", 1)] + ([("graph", 3)] if n >= 3 else [])
    # one seed per case so the samples are independent
    for offset, (mode, m) in enumerate(sim_cases):
        seed = args.seed + offset
        _, stat = validation.simulation_report(
            mode, m, n, args.trials, seed, residual=args.residual, workers=args.workers
        )
        label = f"{mode}_m{m}"
        results.append(_stat_record(label, mode, m, n, seed, stat))
        if stat.passed is False:
            failures.append(label)
            print(f"{label}: tv={stat.tv_distance:.6f} chi2={stat.chi_square_statistic:.4f} "
                  f"(df={stat.degrees_of_freedom}, critical {stat.critical_value})", file=sys.stderr)

    if n >= 2:
        results.append(_equivalence_record(validation.time_invariance_report(2, min(n, 20) - 1)))

    params = {
        "n_max": args.n_max,
        "k_max": args.k_max,
        "r_max": args.r_max,
        "step_k_max": args.step_k_max,
        "step_r_max": args.step_r_max,
        "trials": args.trials,
        "seed": args.seed,
        "sim_n": n,
        "residual": args.residual,
    }
    doc = json.loads(json_document("validate", params, results))
    doc["passed"] = not failures
    doc["failed_checks"] = failures
    write_atomic(args.output, json.dumps(doc, indent=2) + "\n")
    return EXIT_FAIL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefattach",
        description="Degree laws of single-edge preferential attachment: tables, closed forms, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="exact degree-law rows of node m for n = m .. n_max")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("closed", help="closed-form P(first node has degree k at time n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "float", "both"), default="exact")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_closed)

    p = sub.add_parser("simulate", help="Monte Carlo degree counts as JSON")
    p.add_argument("--mode", dest="sim_mode", choices=("marginal", "graph"), default="marginal")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--residual", choices=RESIDUAL_RULES, default="stub")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run every gated check; exit 0 iff all pass")
    p.add_argument("--n-max", type=int, default=200)
    p.add_argument("--k-max", type=int, default=50)
    p.add_argument("--r-max", type=int, default=50)
    p.add_argument("--step-k-max", type=int, default=100)
    p.add_argument("--step-r-max", type=int, default=100)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sim-n", type=int, default=10)
    p.add_argument("--residual", choices=RESIDUAL_RULES, default="stub")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"prefattach {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"prefattach {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
