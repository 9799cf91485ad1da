"""Command-line interface: ``inflogic <command> [options]``.

Exit status is 0 when a query is decided, 2 when it is Unknown within the
instantiation budget and 1 on any error. ``--format records`` prints one
``key=value`` record per line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, borel, families, forcing, structures
from .domains import show_tag
from .force import elementary_leaves, eval_elementary, force, render_elementary, simplify
from .library import BUILTINS
from .parser import parse_formula, render_formula
from .syntax import And, BigAnd, FormulaError, Signature

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


class CliError(Exception):
    pass


class Output:
    def __init__(self, fmt: str, stream):
        self.records = fmt == "records"
        self.stream = stream

    def line(self, text: str = ""):
        print(text, file=self.stream)

    def emit(self, human: str, **fields):
        if self.records:
            for k, v in fields.items():
                print(f"{k}={v}", file=self.stream)
        else:
            self.line(human)


# -- inputs --------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _json(path: str):
    text = _read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_signature(args, fallback=None):
    if getattr(args, "signature", None):
        return Signature.from_json(_json(args.signature))
    return fallback


def load_formula(args, sig=None):
    if getattr(args, "text", None):
        source, where = args.text, "<text>"
    elif getattr(args, "formula", None):
        name = args.formula
        key = name[:-4] if name.endswith(".fml") else name
        if not Path(name).exists() and key in BUILTINS:
            return BUILTINS[key][1]
        source, where = _read(name), name
    else:
        raise CliError("a formula is required (--formula FILE|NAME or --text SEXPR)")
    try:
        return parse_formula(source, sig)
    except FormulaError as exc:
        raise CliError(f"{where}:{exc}") from None


def load_structure(path):
    try:
        return structures.FiniteStructure.from_json(_json(path))
    except (KeyError, TypeError) as exc:
        raise CliError(f"{path}: malformed structure ({exc})") from None


def parse_assignment(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"assignment {item!r} is not of the form var=element")
        out[name] = value
    return out


def _truth_exit(value) -> int:
    return EXIT_UNKNOWN if value is None else EXIT_OK


def _show_truth(t) -> str:
    text = str(t)
    if t.value is None and t.culprit is not None:
        culprit = t.culprit
        shown = render_formula(culprit) if not hasattr(culprit, "child") else \
            render_elementary(culprit)
        text += f" (undecided: {shown})"
    return text


# -- commands ------------------------------------------------------------------


def cmd_classify(args, out):
    q = analysis.classify(load_formula(args, load_signature(args)))

    def show(r):
        return "undefined" if r is None else r
    out.emit(str(q), forall_rank=q.forall_rank, exists_rank=q.exists_rank,
             pi_rank=show(q.pi_rank), sigma_rank=show(q.sigma_rank))
    return EXIT_OK


def cmd_negate(args, out):
    g = analysis.formal_negate(load_formula(args, load_signature(args)))
    out.emit(render_formula(g), formula=render_formula(g))
    return EXIT_OK


def cmd_fragment(args, out):
    members = sorted(render_formula(g) for g in
                     analysis.fragment_closure(load_formula(args, load_signature(args))))
    if out.records:
        out.emit("", size=len(members))
        for m in members:
            out.emit("", member=m)
    else:
        out.line(f"{len(members)} formulas")
        for m in members:
            out.line(m)
    return EXIT_OK


def cmd_check(args, out):
    f = load_formula(args)
    sig = load_signature(args, analysis.infer_signature(f))
    problems = analysis.wellformed(f, sig)
    if not problems:
        out.emit("ok", status="ok")
        return EXIT_OK
    for p in problems:
        out.emit(str(p), violation=str(p))
    return EXIT_ERROR


def cmd_force(args, out):
    f = load_formula(args, load_signature(args))
    e = force(f)
    if args.simplify:
        e = simplify(e)
    out.emit(render_elementary(e), elementary=render_elementary(e))
    if args.leaves:
        ob, ib = args.leaves
        for alpha, beta, leaf in elementary_leaves(e, ob, ib):
            out.emit(f"  alpha={show_tag(alpha)} beta={show_tag(beta)} {render_formula(leaf)}",
                     leaf=f"{show_tag(alpha)}|{show_tag(beta)}|{render_formula(leaf)}")
    return EXIT_OK


def cmd_eval(args, out):
    A = load_structure(args.structure)
    f = load_formula(args, A.signature)
    asg = parse_assignment(args.assign)
    if args.via_force:
        r = eval_elementary(A, force(f), asg, args.budget, mode=args.mode)
    else:
        r = structures.satisfies(A, f, asg, args.budget)
    out.emit(_show_truth(r), value=str(r))
    return _truth_exit(r.value)


def cmd_weak_force(args, out):
    chosen = [x for x in (args.structure, args.tree, args.blocks) if x]
    if len(chosen) != 1:
        raise CliError("give exactly one of --structure, --tree, --blocks")
    if args.structure:
        target = load_structure(args.structure)
        f = load_formula(args, target.signature)
    elif args.tree:
        target = families.tree_from_json(_json(args.tree))
        f = load_formula(args, families.TREE_SIGNATURE)
    else:
        target = families.BlockConfig.from_json(_json(args.blocks))
        f = load_formula(args, families.BLOCK_SIGNATURE)
    q = forcing.ForcingQuery(target, f, parse_assignment(args.assign), args.budget)
    if args.audit:
        rep = forcing.audit(q)
        for v in rep.verdicts:
            out.emit(v.report(), route=v.route, value=str(v.truth))
        out.emit(f"agreement={'yes' if rep.agree else 'NO'}",
                 agreement="yes" if rep.agree else "no")
        return EXIT_ERROR if not rep.agree else _truth_exit(
            rep.decided[0].truth.value if rep.decided else None)
    v = forcing.weak_forces(q)
    fields = {"value": str(v.truth), "route": v.route}
    if v.witness is not None:
        fields["witness"] = forcing.witness_text(v.route, v.witness).split("=", 1)[1]
    out.emit(v.report(), **fields)
    return _truth_exit(v.truth.value)


def cmd_nelem(args, out):
    A, B = load_structure(args.sub), load_structure(args.super)
    ok = structures.n_elementary(A, B, args.n)
    out.emit("TRUE" if ok else "FALSE", value="TRUE" if ok else "FALSE", n=args.n)
    return EXIT_OK


def cmd_realize(args, out):
    A = load_structure(args.structure)
    f = load_formula(args, A.signature)
    if isinstance(f, BigAnd):
        fam = f
    else:
        fam = f.parts if isinstance(f, And) else (f,)
    variables = args.vars.split(",") if args.vars else None
    try:
        tup = structures.type_realized(A, fam, parse_assignment(args.assign), variables,
                                       args.budget)
    except structures.BudgetExhausted as exc:
        out.emit(f"UNKNOWN ({exc})", value="UNKNOWN")
        return EXIT_UNKNOWN
    text = "none" if tup is None else "(" + " ".join(tup) + ")"
    out.emit(text, witness=text)
    return EXIT_OK


def cmd_tree(args, out):
    t = families.tree_from_json(_json(args.spec))
    h = families.build_tree_structure(t)
    did = False
    if args.weak_force:
        v = forcing.weak_forces(forcing.ForcingQuery(t, BUILTINS["psi_tree"][1]))
        out.emit(v.report(), value=str(v.truth), route=v.route,
                 certificate="" if v.witness is None else "cycle " + " ".join(v.witness))
        did = True
    if args.satisfies:
        ok = families.tree_satisfies_psi(t)
        out.emit(f"satisfies={'TRUE' if ok else 'FALSE'}", satisfies="TRUE" if ok else "FALSE")
        did = True
    if args.path:
        p = families.infinite_path(t)
        text = "none" if p is None else \
            f"prefix=[{','.join(map(str, p[0]))}] cycle=[{','.join(map(str, p[1]))}]"
        out.emit(f"path {text}", path=text)
        did = True
    if args.truncate is not None:
        A = families.truncate_to_finite(h, args.truncate)
        out.line(json.dumps(A.to_json(), sort_keys=True))
        did = True
    if not did:
        has = families.tree_has_infinite_path(t)
        out.emit(f"kind={'finite' if isinstance(t, families.FiniteTree) else 'regular'} "
                 f"infinite_path={'TRUE' if has else 'FALSE'}",
                 infinite_path="TRUE" if has else "FALSE")
    return EXIT_OK


def _tf(b) -> str:
    return "T" if b else "F"


def cmd_block(args, out):
    c = families.BlockConfig.from_json(_json(args.config))
    if args.alternate:
        column = []
        for step in range(args.steps + 1):
            sat = families.block_satisfies_psi(c)
            forced = families.block_forces_psi(c)
            column.append(_tf(sat))
            out.emit(f"step {step}: {c.describe()} psi={_tf(sat)} forced={_tf(forced)}",
                     step=step, config=json.dumps(c.to_json(), sort_keys=True),
                     psi=_tf(sat), forced=_tf(forced))
            if step < args.steps:
                c = families.alternate_extension(c)
        out.emit("truth column " + ",".join(column), column=",".join(column))
        return EXIT_OK
    if args.materialize is not None:
        A = families.materialize_blocks(c, args.materialize)
        out.line(json.dumps(A.to_json(), sort_keys=True))
        return EXIT_OK
    sat = families.block_satisfies_psi(c)
    line = f"{c.describe()} psi={_tf(sat)}"
    fields = {"psi": _tf(sat)}
    if c.infinitely_many_blocks():
        line += f" forced={_tf(families.block_forces_psi(c))}"
        fields["forced"] = _tf(families.block_forces_psi(c))
    out.emit(line, **fields)
    return EXIT_OK


def cmd_borel(args, out):
    texts = _json(args.basis)
    if not isinstance(texts, list):
        raise CliError(f"{args.basis}: basis must be a JSON list of formula strings")
    try:
        D = borel.SentenceBasis.parse(texts)
    except FormulaError as exc:
        raise CliError(f"{args.basis}: {exc}") from None
    code = borel.code_from_json(_json(args.code))
    f = borel.borel_to_formula(code, D)
    out.emit(render_formula(f), formula=render_formula(f))
    faces = [tuple(ch == "1" for ch in args.face)] if args.face else list(D.faces())
    if args.face:
        if len(args.face) != len(D) or set(args.face) - {"0", "1"}:
            raise CliError(f"face needs {len(D)} bits of 0/1")
        xi = render_formula(borel.xi_formula(D, faces[0]))
        out.emit(f"xi {xi}", xi=xi)
    if args.face or args.check:
        mismatches = 0
        for S in faces:
            m = borel.borel_membership(code, S)
            p = borel.propositional_value(f, D, S)
            mismatches += m != p
            bits = "".join("1" if b else "0" for b in S)
            out.emit(f"face {bits}: member={_tf(m)} formula={_tf(p)}",
                     face=bits, member=_tf(m), formula_value=_tf(p))
        out.emit(f"agreement={'yes' if not mismatches else 'NO'}",
                 agreement="yes" if not mismatches else "no")
        return EXIT_OK if not mismatches else EXIT_ERROR
    return EXIT_OK


def cmd_demo(args, out):
    out.line("Alternation from countably many standard blocks:")
    c = families.ORIGINAL
    column = []
    for step in range(args.steps + 1):
        sat = families.block_satisfies_psi(c)
        column.append(_tf(sat))
        out.line(f"  step {step}: {c.describe()}  psi={_tf(sat)} "
                 f"forced={_tf(families.block_forces_psi(c))}")
        c = families.alternate_extension(c)
    out.line("  truth column " + ",".join(column))
    out.line("")
    out.line("Forcing versus truth for psi_tree:")
    trees = [
        ("finite tree {<>,<0>,<0,1>}", families.FiniteTree.of([[], [0], [0, 1]])),
        ("self-loop at r", families.RegularTree(("r",), "r", (("r", 0, "r"),))),
        ("root to sink", families.RegularTree(("r", "s"), "r", (("r", 0, "s"),))),
    ]
    for name, t in trees:
        v = forcing.weak_forces(forcing.ForcingQuery(t, BUILTINS["psi_tree"][1]))
        out.line(f"  {name}: forced={v.report()} "
                 f"satisfied={'TRUE' if families.tree_satisfies_psi(t) else 'FALSE'}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _formula_opts(p):
    g = p.add_argument_group("formula")
    g.add_argument("--formula", metavar="FILE|NAME",
                   help="formula file, or a built-in name: " + ", ".join(BUILTINS))
    g.add_argument("--text", metavar="SEXPR", help="formula given inline")
    g.add_argument("--signature", metavar="FILE", help="signature JSON")


def _budget_default() -> int:
    raw = os.environ.get("INFLOGIC_BUDGET")
    if raw is None:
        return structures.DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"INFLOGIC_BUDGET={raw!r} is not an integer") from None
    if value < 1:
        raise CliError("INFLOGIC_BUDGET must be positive")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _natural(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser(budget_default=structures.DEFAULT_BUDGET) -> argparse.ArgumentParser:
    def common_options(p, default):
        # accepted before or after the command; the subcommand copy only
        # overrides when given
        p.add_argument("--format", choices=("human", "records"),
                       default=default("human"))
        p.add_argument("--budget", type=_positive, default=default(budget_default),
                       help=f"index instantiation budget (default {budget_default}, "
                            "or $INFLOGIC_BUDGET)")

    common = argparse.ArgumentParser(add_help=False)
    common_options(common, lambda v: argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="inflogic",
        description="Infinitary formulas, finite structures and weak forcing.",
        epilog="exit status: 0 decided, 1 error, 2 unknown within the budget")
    common_options(parser, lambda v: v)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        return p

    p = add("classify", "quantifier ranks of a formula")
    _formula_opts(p)
    p = add("negate", "formal negation pushed to the atoms")
    _formula_opts(p)
    p = add("fragment", "closure under subformulas and negation")
    _formula_opts(p)
    p = add("check", "well-formedness against a signature")
    _formula_opts(p)
    p = add("force", "print the elementary formula Force_f")
    _formula_opts(p)
    p.add_argument("--leaves", nargs=2, type=_positive, metavar=("OUTER", "INNER"),
                   help="also list leaves for the first OUTER x INNER tags")
    p.add_argument("--simplify", action="store_true", help="drop repeated/neutral members")
    p = add("eval", "satisfaction in a finite structure")
    p.add_argument("--structure", required=True, metavar="FILE")
    _formula_opts(p)
    p.add_argument("--assign", nargs="*", metavar="VAR=ELEM")
    p.add_argument("--via-force", action="store_true", help="evaluate Force_f instead")
    p.add_argument("--mode", choices=("auto", "literal", "structural"), default="auto")
    p = add("weak-force", "weak forcing verdict with the deciding route")
    g = p.add_argument_group("structure (one of)")
    g.add_argument("--structure", metavar="FILE")
    g.add_argument("--tree", metavar="FILE")
    g.add_argument("--blocks", metavar="FILE")
    _formula_opts(p)
    p.add_argument("--assign", nargs="*", metavar="VAR=ELEM")
    p.add_argument("--audit", action="store_true", help="run every applicable route")
    p = add("nelem", "decide A <=_n B by the alternating game")
    p.add_argument("--sub", required=True, metavar="FILE")
    p.add_argument("--super", required=True, metavar="FILE")
    p.add_argument("--n", type=_natural, required=True)
    p = add("realize", "find a tuple realizing a type")
    p.add_argument("--structure", required=True, metavar="FILE")
    _formula_opts(p)
    p.add_argument("--vars", help="comma-separated type variables (default: free variables)")
    p.add_argument("--assign", nargs="*", metavar="VAR=ELEM")
    p = add("tree", "tree structures: paths, forcing, truncation")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--weak-force", action="store_true")
    p.add_argument("--satisfies", action="store_true")
    p.add_argument("--path", action="store_true", help="print an infinite branch")
    p.add_argument("--truncate", type=_natural, metavar="DEPTH")
    p = add("block", "block structures: truth, forcing, alternation")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--alternate", action="store_true")
    p.add_argument("--steps", type=_natural, default=4)
    p.add_argument("--materialize", type=_positive, metavar="CAP")
    p = add("borel", "compile a Borel code and check it face by face")
    p.add_argument("--basis", required=True, metavar="FILE")
    p.add_argument("--code", required=True, metavar="FILE")
    p.add_argument("--face", metavar="BITS", help="one face, e.g. 101")
    p.add_argument("--check", action="store_true", help="check every face")
    p = add("demo", "block alternation and the tree forcing/truth contrast")
    p.add_argument("--steps", type=_natural, default=4)
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "negate": cmd_negate,
    "fragment": cmd_fragment,
    "check": cmd_check,
    "force": cmd_force,
    "eval": cmd_eval,
    "weak-force": cmd_weak_force,
    "nelem": cmd_nelem,
    "realize": cmd_realize,
    "tree": cmd_tree,
    "block": cmd_block,
    "borel": cmd_borel,
    "demo": cmd_demo,
}

# Which command exposes each library operation.
OPERATIONS = {
    "parse_formula": "classify",
    "render_formula": "negate",
    "free_vars": "realize",
    "formal_negate": "negate",
    "classify": "classify",
    "fragment_closure": "fragment",
    "wellformed": "check",
    "satisfies": "eval",
    "is_substructure": "nelem",
    "n_elementary": "nelem",
    "type_realized": "realize",
    "weak_force_finite": "weak-force",
    "force": "force",
    "elementary_leaves": "force",
    "eval_elementary": "eval",
    "build_tree_structure": "tree",
    "truncate_to_finite": "tree",
    "tree_has_infinite_path": "tree",
    "tree_forces_psi": "tree",
    "tree_satisfies_psi": "tree",
    "block_satisfies_psi": "block",
    "block_forces_psi": "block",
    "alternate_extension": "block",
    "xi_formula": "borel",
    "borel_to_formula": "borel",
    "borel_membership": "borel",
    "weak_forces": "weak-force",
    "audit": "weak-force",
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        budget = _budget_default()
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    parser = build_parser(budget)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    out = Output(args.format, stdout)
    try:
        return COMMANDS[args.command](args, out)
    except (CliError, FormulaError, structures.StructureError, families.SpecError,
            borel.BorelError, forcing.UnsupportedQuery) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
