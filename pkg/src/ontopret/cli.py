"""Command-line entry point: ``ontopret validate|materialize|query|simulate|explain``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import InvariantBreach, OntoPretError, ParseError
from .query import CQ_REQUIREMENTS, parse_pattern, run_cq, select
from .reasoner import CHECK, SKOLEMIZE, check_consistency, explain, materialize
from .scenarios import BUILDERS, FAST_BET_SECONDS, build_scenario, load_trace, simulate
from .schema import build_tbox, validate_schema
from .turtle import dumps_kb, parse, read_kb

EX_OK = 0
EX_DATA = 1
EX_FINDINGS = 2
EX_USAGE = 64
EX_NOINPUT = 66
EX_SOFTWARE = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EX_USAGE)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load(path: str, tbox: str | None):
    kb = read_kb(path)
    if tbox == "builtin":
        kb.merge(build_tbox())
    elif tbox:
        kb.merge(read_kb(tbox))
    return kb


def _write(path: str, text: str):
    Path(path).write_text(text, encoding="utf-8")


def _parse_assertion(kb, text: str):
    header = "".join(f"@prefix {p}: <{ns}> .\n" for p, ns in sorted(kb.prefixes.items()))
    body = text.strip()
    if not body.endswith("."):
        body += " ."
    doc = parse(header + body + "\n")
    if len(doc.statements) != 1 or doc.tbox():
        raise UsageError(f"--assertion must be a single ABox triple, got {text!r}")
    return doc.statements[0]


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    kb = _load(args.file, args.tbox)
    findings = validate_schema(kb)
    report = check_consistency(kb)
    out = sys.stdout
    for f in findings:
        out.write(f"finding\t{f.kind}\t{f.message}\n")
    for v in report.violations:
        out.write(f"violation\t{kb.compact(v.individual)}\t{kb.compact(v.class_a)} ⊓ {kb.compact(v.class_b)}\n")
    for w in report.incomplete_witnesses:
        out.write(f"note\tincomplete-witness\t{kb.compact(w.individual)}\t{w.axiom}\n")
    clean = not findings and not report.violations
    out.write(f"{'ok' if clean else 'fail'}\tfindings={len(findings)}\tviolations={len(report.violations)}"
              f"\twitnesses={len(report.incomplete_witnesses)}\n")
    return EX_OK if clean else EX_FINDINGS


def cmd_materialize(args) -> int:
    kb = _load(args.file, args.tbox)
    closed, report = materialize(kb, SKOLEMIZE if args.skolemize else CHECK)
    _write(args.output, dumps_kb(closed))
    sys.stdout.write(f"assertions={len(closed.abox)}\tinferred={len(closed.abox) - len(kb.abox)}"
                     f"\twitnesses={len(report.incomplete_witnesses)}\n")
    return EX_OK


def cmd_query(args) -> int:
    kb = _load(args.file, args.tbox)
    closed, _ = materialize(kb)
    if args.cq:
        result = run_cq(closed, args.cq)
    else:
        result = select(closed, parse_pattern(_read_text(args.pattern), closed.prefixes))
    text = result.to_json(closed.prefixes) if args.format == "json" else result.to_tsv(closed.prefixes)
    sys.stdout.write(text)
    return EX_OK


def cmd_simulate(args) -> int:
    bundle = build_scenario(args.scenario)
    name, events = load_trace(args.trace, bundle.kb)
    if name != bundle.name:
        raise OntoPretError(f"trace is for scenario {name!r}, not {bundle.name!r}")
    report = simulate(bundle, events, cqs=args.cq or ())
    _write(args.report, report.to_json())
    if args.kb_out:
        _write(args.kb_out, dumps_kb(report.kb))
    if args.figure:
        from .plotting import plot_report

        plot_report(report.to_dict(), args.figure)
    counts = report.counts
    parts = [f"{k}={v}" for k, v in counts["behavior_class"].items()]
    parts += [f"{k}={v}" for k, v in counts["gems_subtype"].items()]
    sys.stdout.write(f"events={counts['events']}\t" + "\t".join(parts) + "\n")
    return EX_OK


def cmd_explain(args) -> int:
    kb = _load(args.file, args.tbox)
    try:
        target = _parse_assertion(kb, args.assertion)
    except ParseError as exc:
        raise UsageError(f"--assertion: {exc}") from None
    derivation = explain(kb, target)
    out = sys.stdout
    out.write(f"{target}\n")
    if not derivation.steps:
        out.write("asserted\n")
    for i, step in enumerate(derivation.steps, 1):
        out.write(f"{i}. {step}\n")
    return EX_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ontopret", description="Interpret human behavior against role expectations.")
    p.add_argument("--version", action="version", version=f"ontopret {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    tbox_help = "also load this TBox file, or 'builtin' for the shipped schema"

    v = sub.add_parser("validate", help="parse, check structure and consistency")
    v.add_argument("file")
    v.add_argument("--tbox", help=tbox_help)
    v.set_defaults(func=cmd_validate)

    m = sub.add_parser("materialize", help="write the deductive closure")
    m.add_argument("file")
    m.add_argument("-o", "--output", required=True)
    m.add_argument("--skolemize", action="store_true", help="mint fresh individuals for unmet existentials")
    m.add_argument("--tbox", help=tbox_help)
    m.set_defaults(func=cmd_materialize)

    q = sub.add_parser("query", help="answer a competency question or a triple pattern")
    q.add_argument("file")
    which = q.add_mutually_exclusive_group(required=True)
    which.add_argument("--cq", choices=sorted(CQ_REQUIREMENTS), type=str.upper)
    which.add_argument("--pattern", help="pattern file, or - for stdin")
    q.add_argument("--format", choices=("tsv", "json"), default="tsv")
    q.add_argument("--tbox", help=tbox_help)
    q.set_defaults(func=cmd_query)

    s = sub.add_parser(
        "simulate", help="classify a trace against a scenario",
        description=f"Poker cue thresholds (fast bet: response_time < {FAST_BET_SECONDS} s) "
                    "are demonstration constants, not empirical claims.",
    )
    s.add_argument("--scenario", required=True, choices=sorted(BUILDERS))
    s.add_argument("--trace", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--cq", action="append", choices=sorted(CQ_REQUIREMENTS), type=str.upper)
    s.add_argument("--kb-out", help="also write the closed knowledge base as Turtle")
    s.add_argument("--figure", help="also write a PNG timeline of the verdicts")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("explain", help="print a minimal derivation of an assertion")
    e.add_argument("file")
    e.add_argument("--assertion", required=True, help='e.g. "ontopret:b1 a ontopret:Behavior"')
    e.add_argument("--tbox", help=tbox_help)
    e.set_defaults(func=cmd_explain)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"ontopret: error: {exc}\n")
        return EX_USAGE
    except InvariantBreach as exc:
        sys.stderr.write(f"ontopret: internal invariant breach: {exc}\n")
        return EX_SOFTWARE
    except OSError as exc:
        sys.stderr.write(f"ontopret: {exc.filename or ''}: {exc.strerror or exc}\n")
        return EX_NOINPUT
    except OntoPretError as exc:
        sys.stderr.write(f"ontopret: error: {exc}\n")
        return EX_DATA


if __name__ == "__main__":
    sys.exit(main())
