"""Command-line entry point.

Subcommands: ``quantify`` (definitional or representation-specific routines,
chosen by ``--repr``), ``brules`` (boundary rules and models, optionally the
quantification transition report), the classifier queries ``decide``,
``reasons``, ``bias`` and ``relevance``, the seeded property harness
``check`` and an interactive ``repl``.

Exit codes: 0 success, 1 logical refusal (undecided population, failed
precondition, exceeded cap), 2 parse or I/O error.  With ``--json`` every
subcommand prints one object with ``kind``, ``result`` and ``items`` fields.
Identical inputs and seeds produce byte-identical output.

The ``QLIT_ENUM_CAP`` environment variable overrides the 24-variable
enumeration cap of the oracle.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from typing import Sequence

from .core import Annotation, Circuit, Formula, Universe, Variable
from .errors import ParseError, QlitError
from . import oracle
from .quantify import quantify_set
from .tractable import (
    Cnf,
    Dnf,
    cnf_exists_literal,
    cnf_forall_literal,
    ddnnf_exists,
    ddnnf_forall,
    dnf_exists_literal,
    dnf_forall_literal,
    sdd_exists,
    sdd_forall,
)
from .xai import (
    Classifier,
    Decision,
    biased_instances,
    decide,
    is_decision_biased,
    relevance_report,
    sufficient_reasons,
)
from .io import (
    emit_dimacs,
    emit_nnf,
    parse_classifier_bundle,
    parse_dimacs,
    parse_formula,
    parse_nnf,
    parse_sdd,
)
from .checks import SUITE_NAMES, run_suite

__all__ = ["main", "run"]


def _sniff(text: str) -> str:
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("c ") or stripped == "c":
            continue
        if stripped.startswith("p cnf"):
            return "cnf"
        if stripped.startswith("nnf"):
            return "ddnnf"
        fields = stripped.split()
        if fields[0] in ("T", "F", "L", "D") and len(fields) > 1 and _all_ints(fields[1:]):
            return "sdd"
        return "formula"
    return "formula"


def _all_ints(fields: Sequence[str]) -> bool:
    try:
        [int(f) for f in fields]
        return True
    except ValueError:
        return False


def _formula_to_dnf(formula: Formula) -> Dnf:
    u = formula.universe
    terms = []
    parts = formula.key[1] if formula.kind == "or" else (formula,)
    for part in parts:
        lits = part.key[1] if part.kind == "and" else (part,)
        codes = []
        for lit in lits:
            if lit.kind != "lit":
                raise ParseError("input is not a disjunction of terms", 1)
            codes.append(lit.key[1])
        terms.append(u.term([u.literal_by_code(c) for c in codes]))
    return Dnf(u, terms)


def _load_input(path: str, repr_: str):
    with open(path, "r", encoding="ascii") as handle:
        text = handle.read()
    kind = _sniff(text) if repr_ == "auto" else repr_
    if kind == "cnf":
        return parse_dimacs(text)
    if kind == "ddnnf":
        return parse_nnf(text)
    if kind == "sdd":
        return parse_sdd(text)
    if kind == "dnf":
        return _formula_to_dnf(parse_formula(text))
    return parse_formula(text)


def _emit_result(value) -> str:
    if isinstance(value, (Cnf, Dnf, Formula)):
        return str(value)
    if isinstance(value, Circuit):
        return emit_nnf(value).rstrip("\n")
    return str(value)


def _write_output(path: str, value) -> None:
    if isinstance(value, Cnf):
        text = emit_dimacs(value)
    elif isinstance(value, Circuit):
        text = emit_nnf(value)
    else:
        text = str(value) + "\n"
    with open(path, "w", encoding="ascii") as handle:
        handle.write(text)


def _print(args, kind: str, result, items: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"kind": kind, "result": result, "items": items}, sort_keys=True))
    else:
        if result is not None:
            print(result)
        for item in items:
            print(item)


# -- subcommand handlers --------------------------------------------------------


def _expand_literals(universe: Universe, resolved: list) -> list:
    """Variables become both of their literals; literals pass through."""
    out = []
    for item in resolved:
        if isinstance(item, Variable):
            pos = universe.literal_by_code(2 * item.index + 1)
            out.extend([pos, ~pos])
        else:
            out.append(item)
    return out


def _cmd_quantify(args, session) -> int:
    value = (
        session.get("loaded")
        if args.input is None
        else _load_input(args.input, args.repr)
    )
    if value is None:
        raise QlitError("no input: pass --in FILE or load one in the repl")
    items = [s for s in args.items.split(",") if s.strip()]
    universe = value.universe
    resolved = [universe.item(s) for s in items]

    if isinstance(value, Cnf):
        out = value
        for lit in _expand_literals(universe, resolved):
            out = (
                cnf_forall_literal(out, lit)
                if args.op == "forall"
                else cnf_exists_literal(out, lit)
            )
    elif isinstance(value, Dnf):
        out = value
        for lit in _expand_literals(universe, resolved):
            out = (
                dnf_exists_literal(out, lit)
                if args.op == "exists"
                else dnf_forall_literal(out, lit)
            )
    elif isinstance(value, Circuit):
        lits = _expand_literals(universe, resolved)
        if value.annotation == Annotation.SDD:
            out = sdd_forall(value, lits) if args.op == "forall" else sdd_exists(value, lits)
        else:
            out = (
                ddnnf_forall(value, lits)
                if args.op == "forall"
                else ddnnf_exists(value, lits)
            )
    else:
        out = quantify_set(value, args.op, resolved)

    if args.out:
        _write_output(args.out, out)
    _print(args, "quantify", _emit_result(out), [])
    return 0


def _cmd_brules(args, session) -> int:
    value = (
        session.get("loaded")
        if args.input is None
        else _load_input(args.input, args.repr)
    )
    if value is None:
        raise QlitError("no input: pass --in FILE or load one in the repl")
    rules = oracle.b_rules(value)
    worlds = sorted({w for w, _ in oracle.boundary_models(value)}, key=lambda w: w.bits)
    summary = f"rules: {len(rules)}, boundary models: {len(worlds)}"
    lines = [str(r) for r in rules] + [str(w) for w in worlds]
    if args.report_transition:
        lit = value.universe.literal(args.report_transition)
        report = oracle.brule_transition_report(value, lit)
        summary += f", transition on {lit}: {'pass' if report.passed else 'FAIL'}"
        lines = report.to_lines()
    _print(args, "brules", summary, lines)
    return 0


def _load_classifier(args, session) -> Classifier:
    if args.classifier is None:
        classifier = session.get("classifier")
        if classifier is None:
            raise QlitError("no classifier: pass --classifier BUNDLE or load one")
    else:
        with open(args.classifier, "r", encoding="ascii") as handle:
            bundle = parse_classifier_bundle(handle.read())
        classifier = Classifier(
            bundle.positive, bundle.negative, protected=bundle.protected
        )
    if getattr(args, "protected", None):
        classifier = Classifier(
            classifier.positive,
            classifier.negative,
            protected=tuple(args.protected),
            check=False,
        )
    return classifier


def _cmd_decide(args, session) -> int:
    classifier = _load_classifier(args, session)
    decision = decide(classifier, classifier.population(args.term))
    _print(args, "decide", str(decision), [])
    return 1 if decision is Decision.UNDEFINED else 0


def _cmd_reasons(args, session) -> int:
    classifier = _load_classifier(args, session)
    result = sufficient_reasons(classifier, classifier.population(args.term))
    items = [str(t) for t in result.sufficient]
    _print(args, "reasons", str(result.decision), items)
    return 0


def _cmd_bias(args, session) -> int:
    classifier = _load_classifier(args, session)
    if args.term:
        biased = is_decision_biased(classifier, classifier.instance(args.term))
        _print(args, "bias", "biased" if biased else "unbiased", [])
        return 0
    items = []
    for side in ("positive", "negative"):
        items.append(f"{side}: {biased_instances(classifier, side)}")
    _print(args, "bias", None if args.json else "\n".join(items), items if args.json else [])
    return 0


def _cmd_relevance(args, session) -> int:
    classifier = _load_classifier(args, session)
    report = relevance_report(classifier, classifier.population(args.term))
    _print(args, "relevance", str(report.decision), report.to_lines())
    return 0


def _cmd_check(args, session) -> int:
    result = run_suite(args.property, args.vars, args.trials, args.seed)
    items = result.failures
    _print(args, "check", result.summary(), items)
    return 0 if result.ok else 1


def _cmd_repl(args, session) -> int:
    print("qlit repl: load/quantify/brules/decide/reasons/bias/relevance/check, quit")
    for raw in sys.stdin:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("quit", "exit"):
            break
        try:
            fields = shlex.split(line)
            if fields[0] == "load":
                _repl_load(fields, session)
                continue
            code = _dispatch(fields, session)
            if code != 0:
                print(f"(exit {code})")
        except (QlitError, OSError, ValueError) as error:
            print(f"error: {error}")
        except SystemExit:  # argparse rejected the line; stay in the loop
            pass
    return 0


def _repl_load(fields: list[str], session) -> None:
    if len(fields) == 3 and fields[1] == "classifier":
        with open(fields[2], "r", encoding="ascii") as handle:
            bundle = parse_classifier_bundle(handle.read())
        session["classifier"] = Classifier(
            bundle.positive, bundle.negative, protected=bundle.protected
        )
        print(f"loaded {session['classifier']!r}")
    elif len(fields) == 3 and fields[1] in ("formula", "cnf", "dnf", "nnf", "sdd"):
        repr_ = {"nnf": "ddnnf"}.get(fields[1], fields[1])
        session["loaded"] = _load_input(fields[2], repr_)
        print(f"loaded {session['loaded']!r}")
    elif len(fields) == 2:
        session["loaded"] = _load_input(fields[1], "auto")
        print(f"loaded {session['loaded']!r}")
    else:
        raise QlitError("usage: load [classifier|formula|cnf|dnf|nnf|sdd] FILE")


# -- argument parsing -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlit",
        description="Boolean literal/variable quantification and classifier explanation queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    quantify = sub.add_parser("quantify", help="quantify literals/variables out of an input")
    quantify.add_argument("--op", choices=("forall", "exists"), required=True)
    quantify.add_argument(
        "--items",
        required=True,
        help="comma list: 'x' positive literal, '~x' negative, 'X' whole variable",
    )
    quantify.add_argument("--in", dest="input", help="input file (omit in the repl to use the loaded object)")
    quantify.add_argument(
        "--repr",
        choices=("auto", "cnf", "dnf", "ddnnf", "sdd", "formula"),
        default="auto",
        help="input representation; auto sniffs the file and picks the fast routine",
    )
    quantify.add_argument("--out", help="write the result to this file")
    quantify.add_argument("--json", action="store_true")
    quantify.set_defaults(handler=_cmd_quantify)

    brules = sub.add_parser("brules", help="print boundary rules and models")
    brules.add_argument("--in", dest="input")
    brules.add_argument("--repr", choices=("auto", "cnf", "dnf", "ddnnf", "sdd", "formula"), default="auto")
    brules.add_argument("--report-transition", metavar="LIT", help="also report rule changes under forall LIT")
    brules.add_argument("--json", action="store_true")
    brules.set_defaults(handler=_cmd_brules)

    for name, handler, takes_term in (
        ("decide", _cmd_decide, True),
        ("reasons", _cmd_reasons, True),
        ("bias", _cmd_bias, False),
        ("relevance", _cmd_relevance, True),
    ):
        command = sub.add_parser(name, help=f"{name} query against a classifier bundle")
        command.add_argument("--classifier", help="bundle file (omit in the repl to use the loaded one)")
        command.add_argument(
            "--term",
            required=takes_term,
            help="comma list of characteristics, e.g. 'e,~f,g'",
        )
        command.add_argument("--protected", nargs="*", help="override the protected features")
        command.add_argument("--json", action="store_true")
        command.set_defaults(handler=handler)

    check = sub.add_parser("check", help="run a seeded property suite")
    check.add_argument("--property", choices=SUITE_NAMES, required=True)
    check.add_argument("--vars", type=int, default=6)
    check.add_argument("--trials", type=int, default=1000)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--json", action="store_true")
    check.set_defaults(handler=_cmd_check)

    repl = sub.add_parser("repl", help="interactive session")
    repl.set_defaults(handler=_cmd_repl)
    return parser


def _dispatch(argv: Sequence[str], session) -> int:
    parser = _build_parser()
    args = parser.parse_args(list(argv))
    return args.handler(args, session)


def run(argv: Sequence[str]) -> int:
    """Parse and execute one command line; returns the exit code."""
    try:
        return _dispatch(argv, {})
    except (ParseError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    except QlitError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
