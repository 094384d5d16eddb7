"""Command-line front end.

Examples:
  zeno-eraser run --scenario erase-blocked --outer 2 --inner 14 --format json
  zeno-eraser sweep --outer-max 10 --inner-max 50 --output fig3.csv
  zeno-eraser audit --scenario erase-blocked --outer 2 --inner 4 --shots 1000000
  zeno-eraser verify

Exit codes: 0 success, 1 invalid input, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from .cqze_engine import CqzeParams
from .eraser_experiment import Scenario, run_scenario, sweep_visibility
from .stochastic_audit import DETECTORS, ShotConfig, compare_frequencies, counterfactual_audit, sample_outcomes
from .verification import run_checks

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2
SEED_ENV = "ZENO_ERASER_SEED"
SWEEP_HEADER = ["M", "N", "X", "Y", "p_d1", "p_d2", "p_loss", "visibility"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _num(x: float) -> float | None:
    """Round to 12 significant digits; non-finite values become null."""
    return float(fmt(x)) if math.isfinite(x) else None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _params(args) -> CqzeParams | None:
    if args.outer is None and args.inner is None:
        return None
    if args.outer is None or args.inner is None:
        raise UsageError("scenario requires CQZE parameters (both --outer and --inner)")
    return CqzeParams(args.outer, args.inner)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc.strerror}") from None


def _render(record: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(record, indent=2, allow_nan=False) + "\n"
    flat = {}
    for key, value in record.items():
        if isinstance(value, dict):
            flat.update({f"{key}_{k}": v for k, v in value.items()})
        else:
            flat[key] = value
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(flat)
    writer.writerow(["" if v is None else fmt(v) if isinstance(v, float) else v for v in flat.values()])
    return buf.getvalue()


def _shots_block(args, result) -> dict:
    config = ShotConfig(args.shots, _seed(args))
    counts = sample_outcomes(result, config)
    z = compare_frequencies(counts, result)
    return {"shots": config.shots, "seed": config.seed, "counts": counts, "z": {d: _num(z[d]) for d in DETECTORS}}


def cmd_run(args) -> int:
    scenario = Scenario(args.scenario)
    result = run_scenario(scenario, _params(args))
    p = result.params
    record = {
        "scenario": scenario.value,
        "M": p.M if p else None,
        "N": p.N if p else None,
        "p_d1": _num(result.p_d1),
        "p_d2": _num(result.p_d2),
        "p_d3": _num(result.p_d3),
        "p_db": _num(result.p_db),
        "visibility": _num(result.visibility),
    }
    if args.shots is not None:
        record.update(_shots_block(args, result))
    _emit(_render(record, args.format), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = sweep_visibility(args.outer_max, args.inner_max)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in grid:
        writer.writerow([r.M, r.N] + [fmt(v) for v in (r.X, r.Y, r.p_d1, r.p_d2, r.p_loss, r.visibility)])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_audit(args) -> int:
    params = _params(args)
    scenario = Scenario(args.scenario)
    if not scenario.uses_cqze:
        raise UsageError("audit undefined without channel")
    config = ShotConfig(args.shots, _seed(args)) if args.shots is not None else None
    report = counterfactual_audit(scenario, params, config)
    record = {
        "scenario": scenario.value,
        "M": report.params.M,
        "N": report.params.N,
        "tagged_mass_d1": _num(report.tagged_mass_d1),
        "tagged_mass_d2": _num(report.tagged_mass_d2),
        "tagged_mass_lost": _num(report.tagged_mass_lost),
        "mass_d1": _num(report.mass_d1),
        "mass_d2": _num(report.mass_d2),
        "mass_lost": _num(report.mass_lost),
        "total_mass": _num(report.total_mass),
    }
    if config is not None:
        record.update(
            shots=config.shots,
            seed=config.seed,
            counts=report.counts,
            z={d: _num(v) for d, v in report.z_scores.items()},
        )
    _emit(_render(record, args.format), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_checks(args.perturb_angle)
    for c in checks:
        line = f"[{'PASS' if c.passed else 'FAIL'}] {c.name}"
        print(f"{line} ({c.detail})" if c.detail else line)
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed", file=sys.stderr)
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zeno-eraser", description="Counterfactual quantum eraser simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    scenarios = [s.value for s in Scenario]

    def add_common(p, scenario_choices):
        p.add_argument("--scenario", required=True, choices=scenario_choices)
        p.add_argument("--outer", "-M", type=_positive, help="outer cycles M")
        p.add_argument("--inner", "-N", type=_positive, help="inner cycles N")
        p.add_argument("--shots", type=_positive)
        p.add_argument("--seed", type=_seed_arg, help=f"defaults to ${SEED_ENV}, then 0")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--output", "-o")

    run = sub.add_parser("run", help="evaluate one scenario")
    add_common(run, scenarios)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="visibility grid as CSV")
    sweep.add_argument("--outer-max", type=_positive, default=10)
    sweep.add_argument("--inner-max", type=_positive, default=50)
    sweep.add_argument("--output", "-o")
    sweep.set_defaults(func=cmd_sweep)

    audit = sub.add_parser("audit", help="channel-tag audit, optionally with shots")
    add_common(audit, scenarios)
    audit.set_defaults(func=cmd_audit)

    verify = sub.add_parser("verify", help="run the self-check suite")
    verify.add_argument("--perturb-angle", type=float, default=0.0, help=argparse.SUPPRESS)
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"zeno-eraser: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
