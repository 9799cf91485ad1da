"""Reading and writing the s-expression formula syntax.

    formula ::= (atom NAME term*) | (not formula) | (and formula*) | (or formula*)
              | (And (IDXVAR+) formula) | (Or (IDXVAR+) formula)
              | (exists (VAR+) formula) | (forall (VAR+) formula)
              | (implies formula formula) | (iff formula formula)

Indexed relation names are written ``P_n``, ``P_{n}``, ``R_{i,j}`` or with
numerals (``P_3``, ``R_{1,2}``). A subscripted variable is written ``y_{n}``.
``;`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    EQUALITY, And, ArityError, Atom, BigAnd, BigOr, Const, Exists, Forall,
    FormulaSyntaxError, Not, Or, Signature, UnboundIndexError, UnknownSymbolError,
    Var, iff, implies,
)

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9']*$")
_BRACED = re.compile(r"^(.+?)_\{([^{}]*)\}$")
_PLAIN_SUB = re.compile(r"^([A-Za-z][A-Za-z0-9']*)_([A-Za-z0-9]+(?:,[A-Za-z0-9]+)*)$")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


class SList(list):
    """A parenthesised list remembering where it opened."""

    def __init__(self, items, line, column):
        super().__init__(items)
        self.line = line
        self.column = column


def read_sexprs(text: str) -> list:
    """Tokenise and group ``text`` into a list of top-level s-expressions."""
    stack = [SList([], 1, 1)]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group()
        if tok == "(":
            stack.append(SList([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise FormulaSyntaxError("unexpected ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].append(Token(tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if len(stack) > 1:
        raise FormulaSyntaxError("unexpected end of input, missing ')'", line, col)
    return list(stack[0])


def read_sexpr(text: str):
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise FormulaSyntaxError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def where(node) -> tuple:
    return (node.line, node.column)


def fail(node, message):
    raise FormulaSyntaxError(message, *where(node))


def head_of(node) -> str:
    if not isinstance(node, SList) or not node or not isinstance(node[0], Token):
        fail(node, "expected a form starting with a keyword")
    return node[0].text


# -- names -------------------------------------------------------------------


def _parse_index(text, bound_ivars, node):
    if text.isdigit():
        return int(text)
    if text not in bound_ivars:
        raise UnboundIndexError(f"{where(node)[0]}:{where(node)[1]}: unbound index variable {text}")
    return text


def _split_subscript(name):
    m = _BRACED.match(name)
    if m:
        return m.group(1), m.group(2).split(","), True
    m = _PLAIN_SUB.match(name)
    if m:
        return m.group(1), m.group(2).split(","), False
    return name, None, False


def _relation(tok: Token, sig, bound_ivars):
    name = tok.text
    if name == EQUALITY:
        return EQUALITY, ()
    base, subs, braced = _split_subscript(name)
    if subs is not None:
        indexed = braced or (sig is not None and base in sig.families)
        if sig is None and not braced:
            indexed = all(s.isdigit() or s in bound_ivars for s in subs)
        if indexed:
            return base, tuple(_parse_index(s, bound_ivars, tok) for s in subs)
    if not _IDENT.match(name) and subs is None:
        fail(tok, f"bad relation name {name!r}")
    return name, ()


def _term(tok, sig, bound_ivars):
    if not isinstance(tok, Token):
        fail(tok, "expected a term")
    m = _BRACED.match(tok.text)
    if m:
        return Var(m.group(1), tuple(_parse_index(s, bound_ivars, tok)
                                     for s in m.group(2).split(",")))
    if sig is not None and tok.text in sig.constants:
        return Const(tok.text)
    if not re.match(r"^[A-Za-z][A-Za-z0-9_']*$", tok.text):
        fail(tok, f"bad term {tok.text!r}")
    return Var(tok.text)


def _name_block(node, what):
    if not isinstance(node, SList) or not node:
        fail(node, f"expected a non-empty ({what} ...) block")
    for t in node:
        if not isinstance(t, Token):
            fail(t, f"expected {what} name")
    return node


# -- formulas ----------------------------------------------------------------


def build_formula(node, sig: Signature | None = None, bound_ivars=frozenset()):
    """Turn one s-expression into a Formula, checking symbols against ``sig``.

    With ``sig=None`` every term is a variable and arities are not checked.
    """
    if isinstance(node, Token):
        fail(node, f"expected a formula, found {node.text!r}")
    head = head_of(node)
    args = node[1:]

    def sub(n, extra=()):
        return build_formula(n, sig, bound_ivars | frozenset(extra))

    if head == "atom":
        if not args or not isinstance(args[0], Token):
            fail(node, "atom needs a relation name")
        rel, index = _relation(args[0], sig, bound_ivars)
        terms = tuple(_term(t, sig, bound_ivars) for t in args[1:])
        if sig is not None:
            try:
                arity = sig.arity_of(rel, len(index))
            except UnknownSymbolError as exc:
                raise UnknownSymbolError(f"{args[0].line}:{args[0].column}: {exc}") from None
            if arity != len(terms):
                raise ArityError(f"{node.line}:{node.column}: {args[0].text} expects "
                                 f"{arity} arguments, got {len(terms)}")
        elif rel == EQUALITY and len(terms) != 2:
            raise ArityError(f"{node.line}:{node.column}: = expects 2 arguments")
        return Atom(rel, index, terms)
    if head == "not":
        if len(args) != 1:
            fail(node, "not takes one formula")
        return Not(sub(args[0]))
    if head in ("and", "or"):
        parts = tuple(sub(a) for a in args)
        return And(parts) if head == "and" else Or(parts)
    if head in ("implies", "iff"):
        if len(args) != 2:
            fail(node, f"{head} takes two formulas")
        a, b = sub(args[0]), sub(args[1])
        return implies(a, b) if head == "implies" else iff(a, b)
    if head in ("And", "Or"):
        if len(args) != 2:
            fail(node, f"{head} takes an index block and a formula")
        block = _name_block(args[0], "index variable")
        ivars = tuple(t.text for t in block)
        if len(set(ivars)) != len(ivars):
            fail(block, "repeated index variable")
        body = sub(args[1], ivars)
        return BigAnd(ivars, body) if head == "And" else BigOr(ivars, body)
    if head in ("exists", "forall"):
        if len(args) != 2:
            fail(node, f"{head} takes a variable block and a formula")
        block = _name_block(args[0], "variable")
        vs = tuple(_term(t, None, bound_ivars) for t in block)
        if len(set(vs)) != len(vs):
            fail(block, "repeated variable in block")
        body = sub(args[1])
        return Exists(vs, body) if head == "exists" else Forall(vs, body)
    fail(node, f"unknown form {head!r}")


def parse_formula(text: str, sig: Signature | None = None):
    return build_formula(read_sexpr(text), sig)


# -- rendering ---------------------------------------------------------------


def render_relation(rel: str, index: tuple) -> str:
    if not index:
        return rel
    if len(index) == 1 and "_" not in rel:
        return f"{rel}_{index[0]}"
    return f"{rel}_{{{','.join(map(str, index))}}}"


def render_formula(f) -> str:
    if isinstance(f, Atom):
        bits = [render_relation(f.rel, f.index)] + [str(t) for t in f.args]
        return f"(atom {' '.join(bits)})"
    if isinstance(f, Not):
        return f"(not {render_formula(f.body)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head] + [render_formula(p) for p in f.parts]) + ")"
    if isinstance(f, (BigAnd, BigOr)):
        head = "And" if isinstance(f, BigAnd) else "Or"
        return f"({head} ({' '.join(f.ivars)}) {render_formula(f.body)})"
    if isinstance(f, (Exists, Forall)):
        head = "exists" if isinstance(f, Exists) else "forall"
        return f"({head} ({' '.join(map(str, f.vars))}) {render_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def pretty(f) -> str:
    """Conventional math-style rendering, for human-oriented output only."""
    if isinstance(f, Atom):
        name = render_relation(f.rel, f.index)
        if f.rel == "=" and not f.index:
            return f"{f.args[0]} = {f.args[1]}"
        return f"{name}({', '.join(map(str, f.args))})"
    if isinstance(f, Not):
        return f"¬{pretty(f.body)}"
    if isinstance(f, And):
        return "(" + " ∧ ".join(map(pretty, f.parts)) + ")" if f.parts else "⊤"
    if isinstance(f, Or):
        return "(" + " ∨ ".join(map(pretty, f.parts)) + ")" if f.parts else "⊥"
    if isinstance(f, BigAnd):
        return f"⋀_{{{','.join(f.ivars)}}} {pretty(f.body)}"
    if isinstance(f, BigOr):
        return f"⋁_{{{','.join(f.ivars)}}} {pretty(f.body)}"
    q = "∃" if isinstance(f, Exists) else "∀"
    return f"{q}{''.join(map(str, f.vars))} {pretty(f.body)}"
