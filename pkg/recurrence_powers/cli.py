"""Command line front end: recurrence-powers <command> [options]."""
import argparse
import csv
import json
import logging
import sys
from enum import Enum
from typing import Dict, List, Optional, TextIO

from pydantic import BaseModel, Field

from .abc_lab import estimate_lower_constants, scan_quality, triple, xy_pair
from .bounds import derive_constants, lower_bound_constants
from .config import Settings, load_settings
from .errors import (
    ConfigError,
    DegenerateSequence,
    FactorizationTimeout,
    HypothesisViolated,
    IdentityMismatch,
    InvalidInput,
    SequenceParseError,
    ZeroEncountered,
    ZeroTerm,
)
from .recurrence import (
    Parity,
    check_nondegenerate,
    condition_17,
    load_presets,
    make_sequence,
    parse_seeds,
    resolve_sequence,
)
from .schema import SCHEMA_VERSION
from .solver import SearchMode, SolutionSet, brute_search, family_remark, solve_fixed_x

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_HYPOTHESIS = 2
EXIT_INPUT = 3
EXIT_ZERO_TERM = 4
EXIT_FACTOR_TIMEOUT = 5
EXIT_CAPPED = 10
EXIT_USAGE = 64


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    PRETTY = "pretty"


class RunConfig(BaseModel):
    sequence: str = Field(description="Preset name or 'P,Q,U0,U1'")
    output: OutputFormat = OutputFormat.JSON
    settings: Settings


class Emitter:
    """Writes records in the chosen output format."""

    def __init__(self, output: OutputFormat, stream: TextIO):
        self.output = output
        self.stream = stream

    def record(self, kind: str, payload: Dict):
        if self.output is OutputFormat.JSON:
            self.stream.write(json.dumps({"schema": SCHEMA_VERSION, "kind": kind, **payload}) + "\n")
        elif self.output is OutputFormat.CSV:
            self.table(kind, [payload])
        else:
            self.stream.write(f"== {kind}\n")
            for key, value in payload.items():
                self.stream.write(f"  {key}: {value}\n")

    def table(self, kind: str, rows: List[Dict]):
        if self.output is OutputFormat.JSON:
            for row in rows:
                self.record(kind, row)
            return
        if not rows:
            if self.output is OutputFormat.PRETTY:
                self.stream.write(f"== {kind}: none\n")
            return
        if self.output is OutputFormat.CSV:
            writer = csv.DictWriter(self.stream, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            return
        self.stream.write(f"== {kind} ({len(rows)})\n")
        for row in rows:
            self.stream.write("  " + "  ".join(f"{k}={v}" for k, v in row.items()) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _emit_solution_set(result: SolutionSet, out: Emitter):
    header = result.model_dump(mode="json", exclude={"solutions"})
    header["certified_complete"] = result.certified_complete
    header["count"] = len(result.solutions)
    out.record("solution_set", header)
    out.table("solution", [s.model_dump(mode="json") for s in result.solutions])


def cmd_bound(config: RunConfig, args, out: Emitter) -> int:
    seq = resolve_sequence(config.sequence, config.settings.presets_path)
    bounds = derive_constants(seq, settings=config.settings)
    n_bound = bounds.search_bound(args.x)
    out.record("bound", {
        "seq": seq.descriptor,
        "x": args.x,
        "precision_bits": bounds.precision_bits,
        "n0": bounds.n0,
        "N": str(n_bound),
    })
    out.table("trace_step", bounds.export_trace())
    return EXIT_OK


def cmd_solve(config: RunConfig, args, out: Emitter) -> int:
    seq = resolve_sequence(config.sequence, config.settings.presets_path)
    result = solve_fixed_x(seq, args.x, config.settings.n_cap, config.settings)
    _emit_solution_set(result, out)
    return EXIT_OK if result.certified_complete else EXIT_CAPPED


def cmd_search(config: RunConfig, args, out: Emitter) -> int:
    seq = resolve_sequence(config.sequence, config.settings.presets_path)
    result = brute_search(seq, config.settings.n_cap, args.q_max, config.settings)
    _emit_solution_set(result, out)
    return EXIT_OK


def cmd_abc(config: RunConfig, args, out: Emitter) -> int:
    seq = resolve_sequence(config.sequence, config.settings.presets_path)
    out.record("xy_record", xy_pair(seq, args.n, args.m).model_dump(mode="json"))
    try:
        result = triple(seq, args.n, args.m, not args.no_coprime, config.settings.factor_budget_ms)
    except FactorizationTimeout as e:
        out.record("abc_triple", e.partial.model_dump(mode="json"))
        raise
    out.record("abc_triple", result.model_dump(mode="json"))
    return EXIT_OK


def cmd_abc_scan(config: RunConfig, args, out: Emitter) -> int:
    seq = resolve_sequence(config.sequence, config.settings.presets_path)
    report = scan_quality(seq, config.settings.n_cap, args.epsilon, args.top, config.settings)
    out.record("quality_report", report.model_dump(mode="json", exclude={"entries"}))
    out.table("abc_triple", [t.model_dump(mode="json") for t in report.entries])
    return EXIT_OK


def cmd_family(config: RunConfig, args, out: Emitter) -> int:
    family = family_remark(args.p, args.q, args.k_max)
    seq = make_sequence(args.p, args.q, 2, args.p)
    result = SolutionSet(sequence=seq.descriptor, mode=SearchMode.FAMILY, n_bound_used=4 * args.k_max, solutions=family)
    _emit_solution_set(result, out)
    out.table("condition_17", [
        {"n": sol.n, "m": sol.m, "n_parity": Parity.of(sol.n).value,
         "status": condition_17(seq, Parity.of(sol.n), sol.m).value}
        for sol in family
    ])
    return EXIT_OK


def cmd_check(config: RunConfig, args, out: Emitter) -> int:
    text = config.sequence.strip().lower()
    if "," in text:
        seeds = parse_seeds(text)
    else:
        presets = load_presets(config.settings.presets_path)
        if text not in presets:
            raise SequenceParseError(f"unknown preset {text!r}")
        seeds = presets[text]
    report = check_nondegenerate(seeds)
    out.record("validation", {"seeds": ",".join(map(str, report.seeds)), "passed": report.passed})
    out.table("check", [c.model_dump(mode="json") for c in report.checks])
    return EXIT_OK if report.passed else EXIT_HYPOTHESIS


def cmd_lower(config: RunConfig, args, out: Emitter) -> int:
    seq = resolve_sequence(config.sequence, config.settings.presets_path)
    rigorous = lower_bound_constants(seq, settings=config.settings)
    out.record("lower_bound_constants", {
        name: {"lo": value.lo_str(), "hi": value.hi_str()}
        for name, value in (("d3", rigorous.d3), ("d4", rigorous.d4), ("d5", rigorous.d5))
    } if config.output is OutputFormat.JSON else {
        f"{name}_{end}": getattr(value, f"{end}_str")()
        for name, value in (("d3", rigorous.d3), ("d4", rigorous.d4), ("d5", rigorous.d5))
        for end in ("lo", "hi")
    })
    estimate = estimate_lower_constants(seq, args.n_min, args.n_max, config.settings)
    out.record("empirical_lower_constants", estimate.model_dump(mode="json"))
    return EXIT_OK


COMMANDS = {
    "bound": cmd_bound,
    "solve": cmd_solve,
    "search": cmd_search,
    "abc": cmd_abc,
    "abc-scan": cmd_abc_scan,
    "family": cmd_family,
    "check": cmd_check,
    "lower": cmd_lower,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seq", default="fibonacci", help="Preset name or 'P,Q,U0,U1'")
    common.add_argument("--precision", type=int, default=None, help="Interval precision in bits")
    common.add_argument("--n-cap", type=int, default=None, help="Largest index n to enumerate")
    common.add_argument("--factor-budget-ms", type=int, default=None, help="Time budget per factorization")
    common.add_argument("--output", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    common.add_argument("--workers", type=int, default=None, help="Worker processes for scans")
    common.add_argument("--log-level", default=None, help="Logging level (default from RPL_LOG_LEVEL)")

    parser = _Parser(prog="recurrence-powers", description="Solve U_n + U_m = x^q over binary recurrences")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common], help="Derive the constant chain and the search bound N")
    p.add_argument("--x", type=int, required=True)
    p = sub.add_parser("solve", parents=[common], help="All solutions for a fixed base x")
    p.add_argument("--x", type=int, required=True)
    p = sub.add_parser("search", parents=[common], help="Every perfect power U_n + U_m with n <= n-cap")
    p.add_argument("--q-max", type=int, default=None)
    p = sub.add_parser("abc", parents=[common], help="X/Y record and abc triple for one pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--no-coprime", action="store_true", help="Keep a residual common factor")
    p = sub.add_parser("abc-scan", parents=[common], help="Rank abc triples by quality for n <= n-cap")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--top", type=int, default=None)
    p = sub.add_parser("family", parents=[common], help="Verify the (4k, 0, U_2k, 2) family")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    sub.add_parser("check", parents=[common], help="Itemized non-degeneracy report")
    p = sub.add_parser("lower", parents=[common], help="Rigorous and empirical lower-bound constants")
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=200)
    return parser


def _run_config(args) -> RunConfig:
    settings = load_settings(
        precision_bits=args.precision,
        n_cap=args.n_cap,
        factor_budget_ms=args.factor_budget_ms,
        workers=args.workers,
        log_level=args.log_level,
    )
    return RunConfig(sequence=args.seq, output=OutputFormat(args.output), settings=settings)


def main(argv: Optional[List[str]] = None, stream: Optional[TextIO] = None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    try:
        config = _run_config(args)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(
        level=config.settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    out = Emitter(config.output, stream or sys.stdout)

    try:
        return COMMANDS[args.command](config, args, out)
    except (DegenerateSequence, HypothesisViolated) as e:
        logger.error("%s", e)
        return EXIT_HYPOTHESIS
    except (SequenceParseError, InvalidInput) as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except (ZeroTerm, ZeroEncountered) as e:
        logger.error("%s", e)
        return EXIT_ZERO_TERM
    except FactorizationTimeout as e:
        logger.error("%s", e)
        return EXIT_FACTOR_TIMEOUT
    except IdentityMismatch:
        logger.exception("An exact identity failed")
        return EXIT_INTERNAL


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
