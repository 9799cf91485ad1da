"""The Force construction: an elementary formula ⋁_α ⋀_β θ_{α,β} defining
weak forcing of a given formula, built one formula constructor at a time.

A node denotes a two-layer formula. ``node.outer`` is the α range,
``node.inner(α)`` the β range for that α and ``node.leaf(α, β)`` the finitary
formula θ_{α,β}. Leaves under an index family may mention the family's index
variables; a family node instantiates them from its tag.

Case by case, with ``out``/``inn``/``θ`` referring to the child:

=============  ==========================  ============================  ==========================
node           α ranges over               β ranges over                 θ_{α,β}
=============  ==========================  ============================  ==========================
Leaf(φ)        one tag                     one tag                       φ
Negated        choice fns f: α ↦ inn(α)    out                           ∼θ_{β, f(β)}
Disjunction    (k, α) for child k          inn_k(α)                      θ^k_{α,β}
Conjunction    (α_1..α_m)                  (k, β) with β ∈ inn_k(α_k)    θ^k_{α_k,β}
FamilyOr       (n, α)                      inn(α)                        θ_{α,β}[n]
FamilyAnd      choice fns f: n ↦ out       (n, β) with β ∈ inn(f(n))     θ_{f(n),β}[n]
Existential    out                         finite sets S ⊆ inn(α)        ∃ȳ ⋀_{β∈S} θ_{α,β}
=============  ==========================  ============================  ==========================

Universal quantifiers go through ``¬∃ȳ¬``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property

from .analysis import formal_negate, index_literals, instantiate
from .domains import Choice, FinSubsets, FnTag, Nat, Product, Sum, SumNat, Unit
from .parser import Token, _term, build_formula, fail, head_of, read_sexpr, render_formula
from .structures import (
    DEFAULT_BUDGET, FALSE, Evaluator, FiniteStructure, Truth,
    _check_assignment, normalize_assignment, search_tuples, unknown,
)
from .syntax import And, Atom, BigAnd, BigOr, Exists, Forall, Not, Or, Signature


class _Node:
    def inner(self, alpha):
        cache = self.__dict__.setdefault("_inner_cache", {})
        if alpha not in cache:
            cache[alpha] = self._inner(alpha)
        return cache[alpha]


@dataclass(frozen=True)
class Leaf(_Node):
    formula: object

    @cached_property
    def outer(self):
        return Unit()

    def _inner(self, alpha):
        return Unit()

    def leaf(self, alpha, beta):
        return self.formula


@dataclass(frozen=True)
class Negated(_Node):
    child: object

    @cached_property
    def outer(self):
        c = self.child
        return Choice(c.outer, c.inner, inner_singleton(c))

    def _inner(self, alpha):
        return self.child.outer

    def leaf(self, f, alpha):
        return formal_negate(self.child.leaf(alpha, self.outer.apply(f, alpha)))


@dataclass(frozen=True)
class Disjunction(_Node):
    children: tuple

    @cached_property
    def outer(self):
        return Sum([c.outer for c in self.children])

    def _inner(self, alpha):
        k, a = alpha
        return self.children[k].inner(a)

    def leaf(self, alpha, beta):
        k, a = alpha
        return self.children[k].leaf(a, beta)


@dataclass(frozen=True)
class Conjunction(_Node):
    children: tuple

    @cached_property
    def outer(self):
        return Product([c.outer for c in self.children])

    def _inner(self, alpha):
        return Sum([c.inner(a) for c, a in zip(self.children, alpha)])

    def leaf(self, alpha, beta):
        k, b = beta
        return self.children[k].leaf(alpha[k], b)


@dataclass(frozen=True)
class FamilyOr(_Node):
    ivars: tuple
    child: object

    @cached_property
    def outer(self):
        return SumNat(len(self.ivars), lambda n: self.child.outer)

    def _inner(self, alpha):
        return self.child.inner(alpha[1])

    def leaf(self, alpha, beta):
        n, a = alpha
        return instantiate(self.child.leaf(a, beta), dict(zip(self.ivars, n)))


@dataclass(frozen=True)
class FamilyAnd(_Node):
    ivars: tuple
    child: object

    @cached_property
    def outer(self):
        c = self.child
        return Choice(Nat(len(self.ivars)), lambda n: c.outer, c.outer.is_singleton())

    def _inner(self, f):
        return SumNat(len(self.ivars), lambda n: self.child.inner(self.outer.apply(f, n)))

    def leaf(self, f, beta):
        n, b = beta
        a = self.outer.apply(f, n)
        return instantiate(self.child.leaf(a, b), dict(zip(self.ivars, n)))


@dataclass(frozen=True)
class Existential(_Node):
    vars: tuple
    child: object

    @cached_property
    def outer(self):
        return self.child.outer

    def _inner(self, alpha):
        return FinSubsets(self.child.inner(alpha))

    def leaf(self, alpha, subset):
        return Exists(self.vars, And(tuple(self.child.leaf(alpha, b) for b in subset)))


NODE_TYPES = (Leaf, Negated, Disjunction, Conjunction, FamilyOr, FamilyAnd, Existential)


def inner_singleton(e) -> bool:
    """Whether every β range of ``e`` has exactly one member."""
    if isinstance(e, Leaf):
        return True
    if isinstance(e, Negated):
        return e.child.outer.is_singleton()
    if isinstance(e, Disjunction):
        return all(inner_singleton(c) for c in e.children)
    if isinstance(e, Conjunction):
        return len(e.children) == 1 and inner_singleton(e.children[0])
    if isinstance(e, FamilyOr):
        return inner_singleton(e.child)
    return False


def node_children(e) -> tuple:
    if isinstance(e, Leaf):
        return ()
    if isinstance(e, (Disjunction, Conjunction)):
        return e.children
    return (e.child,)


# -- construction --------------------------------------------------------------


def force(f):
    """The elementary formula Force_f, one node per constructor of f."""
    if isinstance(f, Atom):
        return Leaf(f)
    if isinstance(f, (And, Or)) and not f.parts:
        # ⊤ and ⊥ have no members to distribute over; they behave like atoms.
        return Leaf(f)
    if isinstance(f, Not):
        return Negated(force(f.body))
    if isinstance(f, Or):
        return Disjunction(_flatten(Disjunction, f.parts))
    if isinstance(f, And):
        return Conjunction(_flatten(Conjunction, f.parts))
    if isinstance(f, BigOr):
        return FamilyOr(f.ivars, force(f.body))
    if isinstance(f, BigAnd):
        return FamilyAnd(f.ivars, force(f.body))
    if isinstance(f, Exists):
        return Existential(f.vars, force(f.body))
    if isinstance(f, Forall):
        return force(Not(Exists(f.vars, Not(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def _flatten(kind, parts) -> tuple:
    out = []
    for p in parts:
        e = force(p)
        out.extend(e.children if isinstance(e, kind) else (e,))
    return tuple(out)


def elementary_leaves(e, outer_bound: int, inner_bound: int) -> list:
    """``(α, β, θ_{α,β})`` for the first ``outer_bound`` α and ``inner_bound`` β of each."""
    if outer_bound < 1 or inner_bound < 1:
        raise ValueError("bounds must be at least 1")
    out = []
    for alpha in e.outer.first(outer_bound):
        for beta in e.inner(alpha).first(inner_bound):
            out.append((alpha, beta, e.leaf(alpha, beta)))
    return out


def simplify(e):
    """Drop repeated and neutral members of finite disjunctions and conjunctions.

    Equivalent on every structure, but no longer one node per constructor.
    """
    if isinstance(e, Leaf):
        return e
    if isinstance(e, (Disjunction, Conjunction)):
        neutral = Leaf(Or(())) if isinstance(e, Disjunction) else Leaf(And(()))
        kids = []
        for c in map(simplify, e.children):
            if c != neutral and c not in kids:
                kids.append(c)
        if len(kids) == 1:
            return kids[0]
        return type(e)(tuple(kids))
    if isinstance(e, Negated):
        return Negated(simplify(e.child))
    if isinstance(e, (FamilyOr, FamilyAnd)):
        return type(e)(e.ivars, simplify(e.child))
    return Existential(e.vars, simplify(e.child))


# -- evaluation ----------------------------------------------------------------


def node_literals(e) -> set:
    if isinstance(e, Leaf):
        return index_literals(e.formula)
    out = set()
    for c in node_children(e):
        out |= node_literals(c)
    return out


class _ElementaryEvaluator:
    """Decides ``∃α ∀β A ⊨ θ_{α,β}`` by recursion on the node shape.

    Each case uses the identity behind its construction: a choice function
    exists iff every fibre is nonempty, and ``⋀_{S finite} ∃ȳ ⋀_{β∈S}`` holds
    in a finite structure iff a single tuple realizes every θ_{α,β}.
    """

    def __init__(self, A, e, budget, limit):
        self.A = A
        self.ev = Evaluator(A, budget, node_literals(e))
        self.budget = budget
        self.limit = limit
        self.span = self.ev.max_index + 2

    def index_range(self, k):
        return list(itertools.product(range(min(self.span, self.budget)), repeat=k))

    def holds(self, e, asg, ienv) -> Truth:
        if isinstance(e, Leaf):
            r = self.ev.eval(e.formula, asg, ienv)
            return Truth(r.value, r.culprit, () if r.value else None)
        if isinstance(e, Negated):
            r = self.holds(e.child, asg, ienv).negate()
            if r.value:
                return Truth(True, witness=self.refuting_choice(e, asg, ienv))
            return r
        if isinstance(e, Disjunction):
            pending = None
            for k, c in enumerate(e.children):
                r = self.holds(c, asg, ienv)
                if r.value:
                    return Truth(True, witness=(k, r.witness))
                if r.value is None and pending is None:
                    pending = r
            return FALSE if pending is None else pending
        if isinstance(e, Conjunction):
            pending, wits = None, []
            for c in e.children:
                r = self.holds(c, asg, ienv)
                if r.value is False:
                    return FALSE
                if r.value is None and pending is None:
                    pending = r
                wits.append(r.witness)
            if pending:
                return pending
            return Truth(True, witness=None if None in wits else tuple(wits))
        if isinstance(e, FamilyOr):
            pending = None
            for n in self.index_range(len(e.ivars)):
                r = self.holds(e.child, asg, {**ienv, **dict(zip(e.ivars, n))})
                if r.value:
                    return Truth(True, witness=(n, r.witness))
                if r.value is None and pending is None:
                    pending = r
            if pending:
                return pending
            return unknown(e) if self.span > self.budget else FALSE
        if isinstance(e, FamilyAnd):
            pending, wits = None, {}
            for n in self.index_range(len(e.ivars)):
                r = self.holds(e.child, asg, {**ienv, **dict(zip(e.ivars, n))})
                if r.value is False:
                    return FALSE
                if r.value is None and pending is None:
                    pending = r
                wits[n] = r.witness
            if pending:
                return pending
            if self.span > self.budget:
                return unknown(e)
            return Truth(True, witness=self.family_choice(e, wits))
        if isinstance(e, Existential):
            def test(tup):
                return self.holds(e.child, self.ev.bind(asg, e.vars, tup, ienv), ienv)
            r, _ = search_tuples(self.A, len(e.vars), test)
            return r
        raise TypeError(f"not an elementary node: {e!r}")

    def family_choice(self, e, wits):
        """FnTag for n ↦ α_n; indices above the support behave like the last one."""
        if None in wits.values():
            return None
        head = e.child.outer.head()
        values = set(wits.values())
        if len(values) == 1:
            v = values.pop()
            return FnTag((), None if v == head else v)
        if len(e.ivars) != 1:
            return None
        default = wits[(self.span - 1,)]
        return e.outer.normalize(sorted(wits.items()), None if default == head else default)

    def refuting_choice(self, e, asg, ienv):
        """For a true negation, a function picking a false leaf in every α, when cheap."""
        child = e.child
        alphas = child.outer.all(self.limit)
        if alphas is None:
            return None
        picks = []
        for a in alphas:
            for b in child.inner(a).first(self.limit):
                if self.ev.eval(child.leaf(a, b), asg, ienv).value is False:
                    picks.append((a, b))
                    break
            else:
                return None
        return e.outer.normalize(picks)

    def literal(self, e, asg):
        """Enumerate every α and β; None when the ranges are too large."""
        alphas = e.outer.all(self.limit)
        if alphas is None:
            return None
        table, total = [], 0
        for a in alphas:
            betas = e.inner(a).all(self.limit)
            if betas is None:
                return None
            total += len(betas)
            if total > self.limit:
                return None
            table.append((a, betas))
        for a, betas in table:
            if all(self.ev.eval(e.leaf(a, b), asg).value for b in betas):
                return Truth(True, witness=a)
        return FALSE


def eval_elementary(A: FiniteStructure, e, asg=None, budget: int = DEFAULT_BUDGET,
                    mode: str = "auto", limit: int = 256) -> Truth:
    """Whether some α has every β-leaf true in ``A``; the witness α when cheap.

    ``mode`` is ``"literal"`` (enumerate the families, Unknown if they are too
    large), ``"structural"`` (recurse on the node shape) or ``"auto"``.
    """
    if mode not in ("auto", "literal", "structural"):
        raise ValueError(f"unknown mode {mode!r}")
    asg = normalize_assignment(asg)
    ee = _ElementaryEvaluator(A, e, budget, limit)
    for _, _, leaf in elementary_leaves(e, 1, 1):
        _check_assignment(A, leaf, asg)
    if mode != "structural":
        r = ee.literal(e, asg)
        if r is not None:
            return r
        if mode == "literal":
            return unknown(e)
    return ee.holds(e, asg, {})


# -- serialization -------------------------------------------------------------


def render_elementary(e) -> str:
    if isinstance(e, Leaf):
        return f"(leaf {render_formula(e.formula)})"
    if isinstance(e, Negated):
        return f"(OrFam (choicefn) {render_elementary(e.child)})"
    if isinstance(e, Disjunction):
        return "(OrFam (sum) " + " ".join(map(render_elementary, e.children)) + ")"
    if isinstance(e, Conjunction):
        return "(AndFam (choicefn) " + " ".join(map(render_elementary, e.children)) + ")"
    if isinstance(e, FamilyOr):
        kind = "nat" if len(e.ivars) == 1 else "natpair"
        return f"(OrFam ({kind} {' '.join(e.ivars)}) {render_elementary(e.child)})"
    if isinstance(e, FamilyAnd):
        kind = "nat" if len(e.ivars) == 1 else "natpair"
        return f"(AndFam (choicefn {kind} {' '.join(e.ivars)}) {render_elementary(e.child)})"
    if isinstance(e, Existential):
        return (f"(AndFam (finsubsets {' '.join(map(str, e.vars))}) "
                f"{render_elementary(e.child)})")
    raise TypeError(f"not an elementary node: {e!r}")


def parse_elementary(text: str, sig: Signature | None = None):
    return _build(read_sexpr(text), sig, frozenset())


def _words(node):
    if not isinstance(node, list) or not all(isinstance(t, Token) for t in node):
        fail(node, "expected a tag specification")
    return [t.text for t in node]


def _build(node, sig, bound):
    head = head_of(node)
    if head == "leaf":
        if len(node) != 2:
            fail(node, "leaf takes one formula")
        return Leaf(build_formula(node[1], sig, bound))
    if head not in ("OrFam", "AndFam") or len(node) < 3:
        fail(node, f"expected (leaf ...), (OrFam ...) or (AndFam ...), found {head!r}")
    spec = _words(node[1])
    rest = node[2:]

    def one():
        if len(rest) != 1:
            fail(node, f"{head} ({' '.join(spec)}) takes one body")
        return rest[0]

    if head == "OrFam":
        if spec == ["choicefn"]:
            return Negated(_build(one(), sig, bound))
        if spec == ["sum"]:
            return Disjunction(tuple(_build(r, sig, bound) for r in rest))
        if spec and spec[0] in ("nat", "natpair"):
            ivars = _index_block(node, spec)
            return FamilyOr(ivars, _build(one(), sig, bound | set(ivars)))
    else:
        if spec == ["choicefn"]:
            return Conjunction(tuple(_build(r, sig, bound) for r in rest))
        if len(spec) >= 2 and spec[0] == "choicefn" and spec[1] in ("nat", "natpair"):
            ivars = _index_block(node, spec[1:])
            return FamilyAnd(ivars, _build(one(), sig, bound | set(ivars)))
        if spec and spec[0] == "finsubsets" and len(spec) > 1:
            vs = tuple(_term(t, None, bound) for t in node[1][1:])
            return Existential(vs, _build(one(), sig, bound))
    fail(node[1], f"bad tag specification ({' '.join(spec)}) for {head}")


def _index_block(node, spec):
    want = 1 if spec[0] == "nat" else 2
    ivars = tuple(spec[1:])
    if len(ivars) != want or not all(re.match(r"^[A-Za-z][A-Za-z0-9]*$", v) for v in ivars):
        fail(node[1], f"{spec[0]} needs {want} index variable(s)")
    return ivars
