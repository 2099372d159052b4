"""Command line entry point: analyze, verify-tables, plot, simulate.

Exit codes: 0 success, 2 usage, 3 unreadable or malformed input,
4 out-of-domain data, 5 table verification failure, 6 output not writable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import Config, analyze_transcript
from .errors import BallotRunsError, ParseError
from .files import read_key_values, read_transcript, write_atomic
from .plot import transcript_svg
from .report import dumps, render_table
from .simulate import PRESETS, format_rates, run_trials, scenario_from_mapping
from .tables import format_verification, verify_tables

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4
EXIT_VERIFY = 5
EXIT_WRITE = 6

SIMULATION_FORMAT = "ballotruns-simulation/1"


def _u64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must lie in 0..2^64-1")
    return value


def _count(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _load_config(path) -> Config:
    if path is None:
        return Config()
    data = read_key_values(path)
    try:
        return Config.from_dict(data)
    except (KeyError, ValueError) as exc:
        raise ParseError(str(exc).strip("'\""), None, path) from None


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        write_atomic(out, text)
    except OSError as exc:
        raise _WriteError(f"cannot write {out}: {exc.strerror or exc}") from None


class _WriteError(Exception):
    pass


def cmd_analyze(args) -> int:
    config = _load_config(args.config)
    transcript = read_transcript(args.transcript, max_marks=config.max_marks, strict=args.strict)
    report = analyze_transcript(transcript, config)
    _emit(dumps(report) if args.format == "machine" else render_table(report), args.out)
    return EXIT_OK


def cmd_verify_tables(args) -> int:
    v = verify_tables()
    if args.format == "machine":
        doc = {
            "ok": v.ok,
            "checks": [{"name": c.name, "printed": c.printed, "computed": c.computed,
                        "diff": c.diff, "ok": c.ok} for c in v.checks],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = format_verification(v, verbose=not args.quiet)
    _emit(text, args.out)
    return EXIT_OK if v.ok else EXIT_VERIFY


def cmd_plot(args) -> int:
    config = _load_config(args.config)
    transcript = read_transcript(args.transcript, max_marks=config.max_marks)
    svg = transcript_svg(transcript, top_k=config.top_k, tuned_k=config.tuned_k)
    if args.out is None:
        sys.stdout.write(svg)
    else:
        _emit(svg, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    data = dict(PRESETS[args.preset]) if args.preset else read_key_values(args.config)
    if args.trials is not None:
        data["trials"] = str(args.trials)
    if args.seed is not None:
        data["seed"] = str(args.seed)
    sim = scenario_from_mapping(data)

    report_dir = Path(args.reports) if args.reports else None
    if report_dir is not None:
        report_dir.mkdir(parents=True, exist_ok=True)

    def save(k, report):
        _emit(dumps(report), report_dir / f"trial-{k:05d}.json")

    rows, rates = run_trials(sim, on_report=save if report_dir is not None else None)
    if args.format == "machine":
        doc = {
            "format": SIMULATION_FORMAT,
            "trials": sim.trials,
            "seed": sim.seed,
            "rates": {m: {repr(t): r for t, r in by_t.items()} for m, by_t in rates.items()},
            "metrics": rows,
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = format_rates(rates, sim.trials)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballotruns", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, transcript=True):
        if transcript:
            p.add_argument("--transcript", required=True, metavar="PATH", help="transcript CSV")
        p.add_argument("--config", metavar="PATH", help="key = value configuration file")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--format", choices=("table", "machine"), default="table")

    p = sub.add_parser("analyze", help="run every test on one transcript")
    common(p)
    p.add_argument("--strict", action="store_true", help="fail on invalid ballots instead of dropping them")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-tables", help="recompute the shipped result tables")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.add_argument("--quiet", action="store_true", help="list failures only")
    p.set_defaults(func=cmd_verify_tables)

    p = sub.add_parser("plot", help="draw a transcript as SVG")
    p.add_argument("--transcript", required=True, metavar="PATH")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="SVG file (default: stdout)")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("simulate", help="detection rates over synthetic trials")
    common(p, transcript=False)
    p.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario instead of --config")
    p.add_argument("--seed", type=_u64, metavar="U64")
    p.add_argument("--trials", type=_count, metavar="N")
    p.add_argument("--reports", metavar="DIR", help="also write one report file per trial")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and (args.config is None) == (args.preset is None):
        parser.error("simulate needs exactly one of --config SCENARIO or --preset NAME")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"ballotruns: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _WriteError as exc:
        print(f"ballotruns: {exc}", file=sys.stderr)
        return EXIT_WRITE
    except BallotRunsError as exc:
        print(f"ballotruns: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
