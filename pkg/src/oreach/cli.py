"""Command-line driver.

Exit codes: 0 safe or success, 1 unsafe, 2 usage or input error,
3 inconclusive (a resource limit was hit).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .breach import DEFAULT_MAX_ITERS, Breach
from .cover import eliminate_qff
from .errors import InconclusiveError, OReachError, ParseError, ResourceLimitError, ValidationError
from .logic import Var, free_vars, sig_of
from .ontology import Ontology, standard_translate, undefined_value_closure, validate
from .parsing import parse_formula, parse_onto, parse_sas
from .report import dumps, trace_report, verdict_report
from .sas import check_system, eliminate_case_functions

EXIT_OK = 0
EXIT_UNSAFE = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

log = logging.getLogger("oreach")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _UsageError(f"cannot read {path}: {e.strerror or e}") from None


def _load_onto(path: str, undefined: Optional[str] = None) -> Ontology:
    O = parse_onto(_read(path), source=path)
    diags = validate(O)
    if diags:
        raise ValidationError(f"{path}: not an RDFS+ ontology", diags)
    if undefined:
        O = undefined_value_closure(O, undefined)
    return O


def _setup_logging() -> None:
    level = os.environ.get("OREACH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _unsafe_formula(S, text: str, source: str):
    nu = parse_formula(text, [x.name for x in S.vars], source=source)
    sig, have = sig_of(nu), S.signature()
    unknown = sorted((sig.concepts - have.concepts) | (sig.roles - have.roles) | (sig.individuals - have.individuals))
    if unknown:
        raise ValidationError(f"{source}: unknown names", [f"{n!r} is not declared by the ontology or the system" for n in unknown])
    return nu


# -- subcommands ----------------------------------------------------------------


def cmd_check_onto(args) -> int:
    O = _load_onto(args.file)
    sig = O.signature()
    print(
        f"ok: {len(O.concept_inclusions)} concept inclusions, {len(O.role_inclusions)} role inclusions, "
        f"{len(O.abox)} assertions ({sum(1 for a in O.abox if getattr(a, 'positive', True))} positive); "
        f"{len(sig.concepts)} concepts, {len(sig.roles)} roles, {len(sig.individuals)} individuals"
    )
    return EXIT_OK


def cmd_translate(args) -> int:
    T = standard_translate(_load_onto(args.file))
    for line in T.lines():
        print(line)
    return EXIT_OK


def cmd_verify(args) -> int:
    O = _load_onto(args.onto, args.with_undef)
    S = parse_sas(_read(args.sas), O, source=args.sas)
    diags = check_system(S)
    if diags:
        raise ValidationError(f"{args.sas}: ill-formed system", diags)
    if (args.unsafe is None) == (args.unsafe_file is None):
        raise _UsageError("verify: give exactly one of --unsafe and --unsafe-file")
    text = args.unsafe if args.unsafe is not None else _read(args.unsafe_file)
    nu = _unsafe_formula(S, text, args.unsafe_file or "<unsafe>")
    T = S.theory()
    S = eliminate_case_functions(S, T)
    try:
        v = Breach(S, nu, theory=T, max_iters=args.max_iters).run()
        report, code = verdict_report(v), EXIT_UNSAFE if v.status == "unsafe" else EXIT_OK
    except InconclusiveError as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        report, code = trace_report("inconclusive", e.iterations), EXIT_INCONCLUSIVE
    out = dumps(report)
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    sys.stdout.write(out)
    return code


def cmd_qe(args) -> int:
    O = _load_onto(args.onto)
    T = standard_translate(O)
    phi = parse_formula(args.constraint, individuals=O.signature().individuals, source="<constraint>")
    drop = [Var(n.strip()) for n in args.drop.split(",") if n.strip()]
    unknown = [v.name for v in drop if v not in free_vars(phi)]
    if unknown:
        log.warning("not free in the constraint: %s", ", ".join(unknown))
    psi = eliminate_qff(T, phi, drop)
    print(psi)
    return EXIT_OK


def cmd_oracle_verify(args) -> int:
    from .oracle import bounded_forward_verify

    O = _load_onto(args.onto, args.with_undef)
    S = parse_sas(_read(args.sas), O, source=args.sas)
    nu = _unsafe_formula(S, args.unsafe, "<unsafe>")
    T = S.theory()
    S = eliminate_case_functions(S, T)
    r = bounded_forward_verify(S, nu, args.domain, args.depth, theory=T)
    report = {
        "status": "violation" if r.violation else "no-violation",
        "domain": args.domain,
        "depth": args.depth,
        "trace": [{"step": i, "transition": n} for i, n in enumerate(r.trace)],
        "model": r.interpretation.to_json() if r.interpretation is not None else None,
        "nodes": r.nodes,
    }
    sys.stdout.write(json.dumps(report, ensure_ascii=False, indent=2) + "\n")
    return EXIT_UNSAFE if r.violation else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oreach", description="Safety verification for artifact systems over RDFS+ ontologies.")
    p.add_argument("--version", action="version", version=f"oreach {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("check-onto", help="parse and validate an ontology")
    s.add_argument("file")
    s.set_defaults(fn=cmd_check_onto)

    s = sub.add_parser("translate", help="print the universal theory of an ontology, one clause per line")
    s.add_argument("file")
    s.set_defaults(fn=cmd_translate)

    s = sub.add_parser("verify", help="decide safety by backward reachability")
    s.add_argument("--onto", required=True)
    s.add_argument("--sas", required=True)
    s.add_argument("--unsafe")
    s.add_argument("--unsafe-file")
    s.add_argument("--trace-out")
    s.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    s.add_argument("--with-undef", metavar="IND", help="close the ABox for an undefined-value individual")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("qe", help="eliminate variables from a constraint")
    s.add_argument("--onto", required=True)
    s.add_argument("--constraint", required=True)
    s.add_argument("--drop", required=True, help="comma-separated variables")
    s.set_defaults(fn=cmd_qe)

    s = sub.add_parser("oracle", help="reference procedures")
    osub = s.add_subparsers(dest="oracle_command", parser_class=_Parser)
    osub.required = True
    o = osub.add_parser("verify", help="bounded forward search over small finite models")
    o.add_argument("--onto", required=True)
    o.add_argument("--sas", required=True)
    o.add_argument("--unsafe", required=True)
    o.add_argument("--domain", type=int, required=True)
    o.add_argument("--depth", type=int, required=True)
    o.add_argument("--with-undef", metavar="IND")
    o.set_defaults(fn=cmd_oracle_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        for d in e.diagnostics:
            print(f"  {d}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except OReachError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
