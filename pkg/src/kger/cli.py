"""Command-line interface: check, validate, compile, verbalize.

Exit codes: 0 success, 1 diagnostics or violations found, 2 usage, parse or IO error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .core import Diagnostic, KgerError
from .emitters import TARGETS, emit_dot, verbalize
from .logic import ClassAtom, FALSE, Implies, conj, forall
from .textformat import SchemaSyntaxError, load_graph, parse_schema
from .validator import SEMANTICS, statement_formula, validate
from .wellformed import check_well_formed


class _Fail(Exception):
    def __init__(self, code: int, lines: Sequence[str]):
        self.code, self.lines = code, list(lines)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Fail(2, [f"error: cannot read {path}: {exc}"]) from None


def _schema(path: str):
    try:
        return parse_schema(_read(path))
    except SchemaSyntaxError as exc:
        raise _Fail(2, [f"{path}:{e}" for e in exc.errors]) from None
    except KgerError as exc:
        raise _Fail(2, [f"{path}: {d}" for d in exc.diagnostics]) from None


def _well_formed(schema, path: str):
    found = check_well_formed(schema)
    if found:
        raise _Fail(1, [f"{path}: {d}" for d in found])


def _clause(schema, d: Diagnostic):
    if d.code == "VIOL-IMPLICIT-DISJOINT":
        a, b = d.subject.split(" / ")
        return forall("x", Implies(conj(ClassAtom(a, "x"), ClassAtom(b, "x")), FALSE))
    for s in schema:
        if str(s) == d.subject:
            return statement_formula(schema, s)
    return None


def cmd_check(args, out, err) -> int:
    schema = _schema(args.schema)
    found = check_well_formed(schema)
    for d in found:
        err.write(f"{args.schema}: {d}\n")
    return 1 if found else 0


def cmd_validate(args, out, err) -> int:
    schema = _schema(args.schema)
    try:
        graph = load_graph(_read(args.graph), schema)
    except KgerError as exc:
        raise _Fail(2, [f"{args.graph}: {d}" for d in exc.diagnostics]) from None
    if args.close_isa:
        graph = graph.close_isa(schema)
    report = validate(schema, graph, args.semantics)
    if args.format == "structured":
        out.write(report.to_json())
    else:
        lines = report.render().splitlines()
        out.write(lines[0] + "\n")
        for d in report.diagnostics:
            out.write(f"{d}\n")
            clause = _clause(schema, d) if args.explain else None
            if clause is not None:
                out.write(f"    clause: {clause.render()}\n")
    return 0 if report.conforms else 1


def cmd_compile(args, out, err) -> int:
    schema = _schema(args.schema)
    _well_formed(schema, args.schema)
    if args.target == "dot":
        text, gaps = emit_dot(schema), []
    else:
        result = TARGETS[args.target](schema)
        text, gaps = result.artifact, result.unexpressed
    for d in gaps:
        err.write(f"{d}\n")
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _Fail(2, [f"error: cannot write {args.out}: {exc}"]) from None
    else:
        out.write(text)
    return 0


def cmd_verbalize(args, out, err) -> int:
    schema = _schema(args.schema)
    out.write(verbalize(schema))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kger", description="KG-ER conceptual schema toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="report well-formedness violations")
    p.add_argument("schema")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("validate", help="validate a JSON knowledge graph against a schema")
    p.add_argument("--schema", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--semantics", choices=SEMANTICS, default="core")
    p.add_argument("--close-isa", action="store_true",
                   help="add supertype memberships before checking")
    p.add_argument("--explain", action="store_true", help="print the violated first-order clause")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="translate a schema to another formalism")
    p.add_argument("--schema", required=True)
    p.add_argument("--target", required=True, choices=[*TARGETS, "dot"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verbalize", help="print the schema as English sentences")
    p.add_argument("schema")
    p.set_defaults(func=cmd_verbalize)
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out, err)
    except _Fail as exc:
        for line in exc.lines:
            err.write(line + "\n")
        return exc.code


def main() -> None:
    sys.exit(run())
