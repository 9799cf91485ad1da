"""Syntactic analyses on formulas: free variables, formal negation, quantifier
classification, fragment closure and well-formedness."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import (
    EQUALITY, And, Atom, BigAnd, BigOr, Const, Exists, Forall, FormulaError,
    Not, Or, Signature, Var, children, rebuild,
)


def subformulas(f):
    """Every subformula of ``f`` (templates count once), in preorder."""
    seen = []
    stack = [f]
    while stack:
        g = stack.pop()
        seen.append(g)
        stack.extend(reversed(children(g)))
    return seen


def free_vars(f) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(t for t in f.args if isinstance(t, Var))
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - frozenset(f.vars)
    out = frozenset()
    for g in children(f):
        out |= free_vars(g)
    return out


def is_finitary(f) -> bool:
    return not any(isinstance(g, (BigAnd, BigOr)) for g in subformulas(f))


def is_quantifier_free(f) -> bool:
    return not any(isinstance(g, (Exists, Forall)) for g in subformulas(f))


def index_literals(f) -> set:
    """Natural-number literals occurring in relation or variable subscripts."""
    found = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            found.update(i for i in g.index if isinstance(i, int))
            for t in g.args:
                if isinstance(t, Var):
                    found.update(i for i in t.index if isinstance(i, int))
        elif isinstance(g, (Exists, Forall)):
            for v in g.vars:
                found.update(i for i in v.index if isinstance(i, int))
    return found


def relations_used(f) -> dict:
    """Map from (base, index length) to argument count, over all atoms of ``f``."""
    out = {}
    for g in subformulas(f):
        if isinstance(g, Atom) and g.rel != EQUALITY:
            out[(g.rel, len(g.index))] = len(g.args)
    return out


def infer_signature(f, constants=()) -> Signature:
    rels, fams = {}, {}
    for (rel, k), arity in relations_used(f).items():
        if k:
            fams[rel] = (k, arity)
        else:
            rels[rel] = arity
    return Signature(rels, fams, frozenset(constants))


# -- index instantiation and substitution ------------------------------------


def _inst_index(index, env):
    return tuple(env.get(i, i) if isinstance(i, str) else i for i in index)


def _inst_term(t, env):
    if isinstance(t, Var) and t.index:
        return Var(t.name, _inst_index(t.index, env))
    return t


def instantiate(f, env: dict):
    """Replace free index variables by the numbers given in ``env``."""
    if not env:
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, _inst_index(f.index, env),
                    tuple(_inst_term(t, env) for t in f.args))
    if isinstance(f, (BigAnd, BigOr)):
        inner = {k: v for k, v in env.items() if k not in f.ivars}
        return type(f)(f.ivars, instantiate(f.body, inner))
    if isinstance(f, (Exists, Forall)):
        return type(f)(tuple(_inst_term(v, env) for v in f.vars), instantiate(f.body, env))
    return rebuild(f, [instantiate(g, env) for g in children(f)])


def _all_var_names(f) -> set:
    names = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            names.update(t.name for t in g.args if isinstance(t, Var))
        elif isinstance(g, (Exists, Forall)):
            names.update(v.name for v in g.vars)
    return names


def fresh_var(base: Var, avoid: set) -> Var:
    k = 1
    while f"{base.name}{k}" in avoid:
        k += 1
    return Var(f"{base.name}{k}", base.index)


def substitute(f, mapping: dict):
    """Capture-avoiding replacement of free variables by terms."""
    mapping = {v: t for v, t in mapping.items() if v != t}
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, f.index, tuple(mapping.get(t, t) for t in f.args))
    if isinstance(f, (Exists, Forall)):
        inner = {v: t for v, t in mapping.items() if v not in f.vars}
        incoming = {t.name for t in inner.values() if isinstance(t, Var)}
        block, renames = [], {}
        avoid = _all_var_names(f) | incoming | {v.name for v in inner}
        for v in f.vars:
            if v.name in incoming:
                nv = fresh_var(v, avoid)
                avoid.add(nv.name)
                renames[v] = nv
                block.append(nv)
            else:
                block.append(v)
        body = substitute(f.body, renames) if renames else f.body
        return type(f)(tuple(block), substitute(body, inner))
    return rebuild(f, [substitute(g, mapping) for g in children(f)])


# -- formal negation -----------------------------------------------------------


def nnf(f):
    """Negation normal form: negations sit directly above atoms."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return formal_negate(f.body)
    return rebuild(f, [nnf(g) for g in children(f)])


def formal_negate(f):
    """De Morgan dual of ``f`` with the negation pushed down to the atoms."""
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return nnf(f.body)
    if isinstance(f, And):
        return Or(tuple(formal_negate(g) for g in f.parts))
    if isinstance(f, Or):
        return And(tuple(formal_negate(g) for g in f.parts))
    if isinstance(f, BigAnd):
        return BigOr(f.ivars, formal_negate(f.body))
    if isinstance(f, BigOr):
        return BigAnd(f.ivars, formal_negate(f.body))
    if isinstance(f, Exists):
        return Forall(f.vars, formal_negate(f.body))
    return Exists(f.vars, formal_negate(f.body))


# -- classification ----------------------------------------------------------


@dataclass(frozen=True)
class QuantClass:
    """Minimal levels in the alternation hierarchies.

    ``exists_rank``/``forall_rank`` ignore infinitary connectives;
    ``sigma_rank``/``pi_rank`` count an infinite disjunction like an existential
    and an infinite conjunction like a universal. A rank of ``None`` means no
    finite level applies.
    """

    exists_rank: int
    forall_rank: int
    sigma_rank: Optional[int]
    pi_rank: Optional[int]

    def __str__(self):
        def show(r):
            return "undefined" if r is None else str(r)
        return (f"forall_rank={self.forall_rank} exists_rank={self.exists_rank} "
                f"pi_rank={show(self.pi_rank)} sigma_rank={show(self.sigma_rank)}")


def _quantified(own, other):
    # own: rank of the body in the quantifier's own class; other: in the dual class.
    r = min(max(1, own), other + 1)
    return r, r + 1


def _ranks(f, count_families):
    """Return (existential-side, universal-side) minimal ranks."""
    if isinstance(f, Atom):
        return 0, 0
    if isinstance(f, Not):
        e, a = _ranks(f.body, count_families)
        return a, e
    if isinstance(f, (And, Or)):
        pairs = [_ranks(g, count_families) for g in f.parts]
        return max((p[0] for p in pairs), default=0), max((p[1] for p in pairs), default=0)
    e, a = _ranks(f.body, count_families)
    if isinstance(f, (BigAnd, BigOr)) and not count_families:
        return e, a
    if isinstance(f, (Exists, BigOr)):
        return _quantified(e, a)
    r, s = _quantified(a, e)
    return s, r


def classify(f) -> QuantClass:
    e, a = _ranks(f, False)
    s, p = _ranks(f, True)
    return QuantClass(e, a, s, p)


# -- fragments ---------------------------------------------------------------


def _negation_of(f):
    return f.body if isinstance(f, Not) else Not(f)


def fragment_closure(f) -> frozenset:
    """Least set containing ``f`` closed under subformulas and negation.

    Negating a negation gives back its body, so the closure is finite.
    Templates of infinite families are single members.
    """
    members = set()
    for g in subformulas(f):
        members.add(g)
        members.add(_negation_of(g))
    return frozenset(members)


# -- well-formedness -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def _index_vars_of(v: Var) -> set:
    return {i for i in v.index if isinstance(i, str)}


def wellformed(f, sig: Signature) -> list:
    """All violations of the formula invariants; an empty list means ok."""
    out = []

    def check_term(t, ivars):
        if isinstance(t, Const):
            if t.name not in sig.constants:
                out.append(Violation("unknown-symbol", f"unknown constant {t.name}"))
        elif isinstance(t, Var):
            for i in _index_vars_of(t):
                if i not in ivars:
                    out.append(Violation("unbound-index", f"index {i} of {t} is unbound"))

    def walk(g, ivars):
        if isinstance(g, Atom):
            try:
                arity = sig.arity_of(g.rel, len(g.index))
                if arity != len(g.args):
                    out.append(Violation("arity", f"{g.relation_name} expects {arity} "
                                                  f"arguments, got {len(g.args)}"))
            except FormulaError as exc:
                out.append(Violation("unknown-symbol" if "unknown" in str(exc) else "arity",
                                     str(exc)))
            for i in g.index:
                if isinstance(i, str) and i not in ivars:
                    out.append(Violation("unbound-index", f"index {i} of {g.rel} is unbound"))
            for t in g.args:
                check_term(t, ivars)
            return
        if isinstance(g, (Exists, Forall)):
            if not g.vars:
                out.append(Violation("block", "empty quantifier block"))
            if len(set(g.vars)) != len(g.vars):
                out.append(Violation("block", "repeated variable in quantifier block"))
            for v in g.vars:
                check_term(v, ivars)
        if isinstance(g, (BigAnd, BigOr)):
            if not g.ivars or len(set(g.ivars)) != len(g.ivars):
                out.append(Violation("block", "index block must be non-empty and repetition-free"))
            varying = sorted(str(v) for v in free_vars(g.body)
                             if _index_vars_of(v) & set(g.ivars))
            if varying:
                out.append(Violation("free-variables",
                                     "infinitely many free variables across the family: "
                                     + ", ".join(varying)))
            walk(g.body, ivars | set(g.ivars))
            return
        for h in children(g):
            walk(h, ivars)

    walk(f, frozenset())
    return out
