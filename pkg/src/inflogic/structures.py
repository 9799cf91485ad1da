"""Finite relational structures and evaluation of (possibly infinitary)
formulas on them.

Indexed relations have *finite support*: only finitely many instances such as
``P_3`` carry a nonempty table. A structure may additionally declare *uniform*
instances, written with ``*`` in place of an index (``R_*,0``), which hold for
every value at that position. Either way, every index value above the largest
numeral mentioned by the structure or the formula behaves identically, so an
index variable only needs the values ``0..M+1``. When that exceeds the
instantiation budget, evaluation answers Unknown instead of guessing.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Optional

from .analysis import free_vars, index_literals
from .syntax import (
    EQUALITY, And, Atom, BigAnd, BigOr, Const, Exists, Forall, FormulaError,
    Not, Or, Signature, UnboundIndexError, UnboundVariableError,
    UnknownSymbolError, Var,
)

DEFAULT_BUDGET = 64


class StructureError(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """An infinite family could not be decided within the instantiation budget."""


# -- three-valued truth ------------------------------------------------------


@dataclass(frozen=True)
class Truth:
    """True, False, or Unknown (``value is None``) with the undecided family."""

    value: Optional[bool]
    culprit: object = None
    witness: object = None

    @property
    def decided(self) -> bool:
        return self.value is not None

    def __bool__(self):
        raise TypeError("Truth is three-valued; test .value explicitly")

    def negate(self) -> "Truth":
        if self.value is None:
            return self
        return Truth(not self.value)

    def __str__(self):
        return {True: "TRUE", False: "FALSE", None: "UNKNOWN"}[self.value]


TRUE = Truth(True)
FALSE = Truth(False)


def unknown(culprit) -> Truth:
    return Truth(None, culprit)


# -- structures --------------------------------------------------------------


def _parse_key(key: str):
    """``"P_3"`` -> ``("P", (3,))``; ``"R_*,0"`` -> ``("R", (None, 0))``."""
    base, sep, sub = key.rpartition("_")
    if sep and sub and all(p == "*" or p.isdigit() for p in sub.split(",")):
        return base, tuple(None if p == "*" else int(p) for p in sub.split(","))
    return key, ()


def _key_text(rel, idx):
    if not idx:
        return rel
    return f"{rel}_{','.join('*' if i is None else str(i) for i in idx)}"


@dataclass(frozen=True)
class FiniteStructure:
    universe: tuple
    tables: MappingProxyType            # (rel, index) -> frozenset of tuples
    uniform: MappingProxyType           # (rel, pattern) -> frozenset; None in pattern = any
    constants: MappingProxyType
    signature: Signature = field(default_factory=Signature)

    @classmethod
    def build(cls, universe, relations=None, constants=None, signature=None):
        """Build from a mapping of relation keys (``"Q"``, ``"P_0"``, ``"R_*,0"``) to tuples."""
        universe = tuple(universe)
        if not universe:
            raise StructureError("universe must be nonempty")
        if len(set(universe)) != len(universe):
            raise StructureError("repeated element in universe")
        members = set(universe)
        tables, uniform = {}, {}
        rels, fams = {}, {}
        for key, rows in (relations or {}).items():
            rel, idx = _parse_key(key)
            rows = frozenset(tuple(r) for r in rows)
            arities = {len(r) for r in rows}
            if len(arities) > 1:
                raise StructureError(f"{key}: tuples of mixed arity")
            for r in rows:
                if not set(r) <= members:
                    raise StructureError(f"{key}: tuple {r} leaves the universe")
            if arities:
                arity = arities.pop()
                if idx:
                    fams[rel] = (len(idx), arity)
                else:
                    rels[rel] = arity
            target = uniform if any(i is None for i in idx) else tables
            if rows:
                target[(rel, idx)] = rows
        consts = dict(constants or {})
        for c, e in consts.items():
            if e not in members:
                raise StructureError(f"constant {c} names a non-element {e}")
        inferred = Signature(rels, fams, frozenset(consts))
        if signature is None:
            signature = inferred
        else:
            for (rel, idx), rows in list(tables.items()) + list(uniform.items()):
                try:
                    arity = signature.arity_of(rel, len(idx))
                except FormulaError as exc:
                    raise StructureError(str(exc)) from None
                if any(len(r) != arity for r in rows):
                    raise StructureError(f"{_key_text(rel, idx)}: arity {arity} expected")
            if set(consts) - set(signature.constants):
                raise StructureError("constant missing from signature")
        return cls(universe, MappingProxyType(tables), MappingProxyType(uniform),
                   MappingProxyType(consts), signature)

    def holds(self, rel: str, idx: tuple, row: tuple) -> bool:
        if rel == EQUALITY and not idx:
            return row[0] == row[1]
        if row in self.tables.get((rel, idx), ()):
            return True
        for (r, pattern), rows in self.uniform.items():
            if r == rel and len(pattern) == len(idx) and row in rows and all(
                    p is None or p == i for p, i in zip(pattern, idx)):
                return True
        return False

    def max_index(self) -> int:
        """Largest numeral in any nonempty indexed table or uniform pattern (-1 if none)."""
        nums = [i for (_, idx) in self.tables for i in idx]
        nums += [i for (_, pat) in self.uniform for i in pat if i is not None]
        return max(nums, default=-1)

    def keys(self):
        return list(self.tables) + list(self.uniform)

    def restrict(self, elements) -> "FiniteStructure":
        """Induced substructure on ``elements`` (which must contain every constant)."""
        keep = [e for e in self.universe if e in set(elements)]
        ks = set(keep)
        rels = {}
        for (rel, idx), rows in list(self.tables.items()) + list(self.uniform.items()):
            rels[_key_text(rel, idx)] = [r for r in rows if set(r) <= ks]
        return FiniteStructure.build(keep, rels, dict(self.constants), self.signature)

    def to_json(self) -> dict:
        rels = {}
        for (rel, idx), rows in sorted(list(self.tables.items()) + list(self.uniform.items()),
                                       key=lambda kv: _key_text(*kv[0])):
            rels[_key_text(rel, idx)] = sorted(list(r) for r in rows)
        out = {"universe": list(self.universe), "relations": rels,
               "constants": dict(self.constants)}
        out["signature"] = self.signature.to_json()
        return out

    @classmethod
    def from_json(cls, data) -> "FiniteStructure":
        if isinstance(data, str):
            data = json.loads(data)
        sig = Signature.from_json(data["signature"]) if "signature" in data else None
        return cls.build(data["universe"], data.get("relations", {}),
                         data.get("constants", {}), sig)


def signatures_compatible(s1: Signature, s2: Signature) -> bool:
    for name in set(s1.relations) & set(s2.relations):
        if s1.relations[name] != s2.relations[name]:
            return False
    for name in set(s1.families) & set(s2.families):
        if s1.families[name] != s2.families[name]:
            return False
    cats1 = {**{n: "r" for n in s1.relations}, **{n: "f" for n in s1.families},
             **{n: "c" for n in s1.constants}}
    cats2 = {**{n: "r" for n in s2.relations}, **{n: "f" for n in s2.families},
             **{n: "c" for n in s2.constants}}
    return all(cats1[n] == cats2[n] for n in set(cats1) & set(cats2))


# -- evaluation ----------------------------------------------------------------


def _and(results) -> Truth:
    pending = None
    for r in results:
        if r.value is False:
            return r
        if r.value is None and pending is None:
            pending = r
    return pending if pending is not None else TRUE


def _or(results) -> Truth:
    pending = None
    for r in results:
        if r.value is True:
            return r
        if r.value is None and pending is None:
            pending = r
    return pending if pending is not None else FALSE


def _unify(template, key, ienv, ivars) -> bool:
    binding = {}
    for t, k in zip(template, key):
        if isinstance(t, str) and t in ivars:
            if k is None:
                continue
            if binding.setdefault(t, k) != k:
                return False
        else:
            v = t if isinstance(t, int) else ienv[t]
            if k is not None and k != v:
                return False
    return True


class Evaluator:
    """Tarskian satisfaction on one finite structure.

    Subclasses change how quantifiers are read; atoms, connectives and index
    families are shared.
    """

    def __init__(self, structure: FiniteStructure, budget: int = DEFAULT_BUDGET,
                 extra_literals=()):
        self.A = structure
        self.budget = budget
        self.max_index = max([structure.max_index(), *extra_literals], default=-1)

    # atoms

    def index_value(self, i, ienv):
        if isinstance(i, int):
            return i
        if i not in ienv:
            raise UnboundIndexError(f"unbound index variable {i}")
        return ienv[i]

    def var_key(self, v: Var, ienv) -> Var:
        if not v.index:
            return v
        return Var(v.name, tuple(self.index_value(i, ienv) for i in v.index))

    def element(self, t, asg, ienv):
        if isinstance(t, Const):
            if t.name not in self.A.constants:
                raise UnknownSymbolError(f"unknown constant {t.name}")
            return self.A.constants[t.name]
        key = self.var_key(t, ienv)
        if key not in asg:
            raise UnboundVariableError(f"unbound variable {key}")
        return asg[key]

    def atom(self, f: Atom, asg, ienv) -> Truth:
        idx = tuple(self.index_value(i, ienv) for i in f.index)
        arity = self.A.signature.arity_of(f.rel, len(idx))
        if arity != len(f.args):
            raise FormulaError(f"{f.rel} expects {arity} arguments")
        row = tuple(self.element(t, asg, ienv) for t in f.args)
        return TRUE if self.A.holds(f.rel, idx, row) else FALSE

    # dispatch

    def eval(self, f, asg, ienv=None) -> Truth:
        ienv = ienv or {}
        if isinstance(f, Atom):
            return self.atom(f, asg, ienv)
        if isinstance(f, Not):
            return self.eval(f.body, asg, ienv).negate()
        if isinstance(f, And):
            return _and(self.eval(g, asg, ienv) for g in f.parts)
        if isinstance(f, Or):
            return _or(self.eval(g, asg, ienv) for g in f.parts)
        if isinstance(f, (BigAnd, BigOr)):
            return self.family(f, asg, ienv)
        if isinstance(f, Exists):
            return self.exists(f, asg, ienv)
        if isinstance(f, Forall):
            return self.forall(f, asg, ienv)
        raise TypeError(f"not a formula: {f!r}")

    # quantifiers: plain satisfaction ranges over the universe

    def tuples(self, structure, k):
        return itertools.product(structure.universe, repeat=k)

    def bind(self, asg, block, values, ienv):
        new = dict(asg)
        for v, e in zip(block, values):
            new[self.var_key(v, ienv)] = e
        return new

    def exists(self, f, asg, ienv) -> Truth:
        return _or(self.eval(f.body, self.bind(asg, f.vars, b, ienv), ienv)
                   for b in self.tuples(self.A, len(f.vars)))

    def forall(self, f, asg, ienv) -> Truth:
        return _and(self.eval(f.body, self.bind(asg, f.vars, b, ienv), ienv)
                    for b in self.tuples(self.A, len(f.vars)))

    # index families

    def family(self, f, asg, ienv) -> Truth:
        conj = isinstance(f, BigAnd)
        shortcut = self.literal_family(f, asg, ienv)
        if shortcut is not None:
            return shortcut
        needed = self.max_index + 2
        values = range(min(needed, self.budget))
        combos = itertools.product(values, repeat=len(f.ivars))
        results = (self.eval(f.body, asg, {**ienv, **dict(zip(f.ivars, c))}) for c in combos)
        out = _and(results) if conj else _or(results)
        if needed > self.budget and out.value is (True if conj else False):
            return unknown(f)
        return out

    def literal_family(self, f, asg, ienv) -> Optional[Truth]:
        """Exact answer for a family whose template is an indexed literal."""
        body, positive = f.body, True
        if isinstance(body, Not):
            body, positive = body.body, False
        if not isinstance(body, Atom) or not body.index:
            return None
        ivars = set(f.ivars)
        if not ivars & set(body.index):
            return None
        if any(isinstance(t, Var) and set(t.index) & ivars for t in body.args):
            return None
        inner_env = {k: v for k, v in ienv.items() if k not in ivars}
        for i in body.index:
            if isinstance(i, str) and i not in ivars:
                self.index_value(i, inner_env)
        self.A.signature.arity_of(body.rel, len(body.index))
        row = tuple(self.element(t, asg, inner_env) for t in body.args)

        def some_true():
            keys = list(self.A.tables.items()) + list(self.A.uniform.items())
            return any(rel == body.rel and len(idx) == len(body.index) and row in rows
                       and _unify(body.index, idx, inner_env, ivars)
                       for (rel, idx), rows in keys)

        def all_true():
            for (rel, pat), rows in self.A.uniform.items():
                if rel != body.rel or len(pat) != len(body.index) or row not in rows:
                    continue
                ok = True
                for t, p in zip(body.index, pat):
                    if isinstance(t, str) and t in ivars:
                        ok = ok and p is None
                    else:
                        v = t if isinstance(t, int) else inner_env[t]
                        ok = ok and (p is None or p == v)
                if ok:
                    return True
            return False

        conj = isinstance(f, BigAnd)
        if conj:
            value = all_true() if positive else not some_true()
        else:
            value = some_true() if positive else not all_true()
        return TRUE if value else FALSE


def _literals(f) -> set:
    return index_literals(f)


def satisfies(A: FiniteStructure, f, asg=None, budget: int = DEFAULT_BUDGET) -> Truth:
    """Three-valued satisfaction ``A ⊨ f[asg]``; assignments map Var (or name) to element."""
    asg = normalize_assignment(asg)
    _check_assignment(A, f, asg)
    return Evaluator(A, budget, _literals(f)).eval(f, asg)


def normalize_assignment(asg) -> dict:
    out = {}
    for k, v in (asg or {}).items():
        out[Var(k) if isinstance(k, str) else k] = v
    return out


def _check_assignment(A, f, asg):
    for v in free_vars(f):
        if not v.index and v not in asg:
            raise UnboundVariableError(f"unbound variable {v}")
    for v, e in asg.items():
        if e not in A.universe:
            raise StructureError(f"{v} is assigned {e!r}, which is not an element")


# -- weak forcing --------------------------------------------------------------


class WeakForcing(Evaluator):
    """Weak forcing read off its recursive clauses.

    Atoms, negation and both kinds of conjunction/disjunction follow the
    satisfaction clauses. An existential asks for some elementary extension
    containing a witness, a universal ranges over every element of every
    elementary extension. A finite structure has exactly one elementary
    extension, itself, since "there are exactly k elements" is a first-order
    sentence, so ``extensions`` yields the structure alone.
    """

    def extensions(self):
        yield self.A

    def exists(self, f, asg, ienv) -> Truth:
        return _or(self.eval(f.body, self.bind(asg, f.vars, b, ienv), ienv)
                   for B in self.extensions() for b in self.tuples(B, len(f.vars)))

    def forall(self, f, asg, ienv) -> Truth:
        return _and(self.eval(f.body, self.bind(asg, f.vars, b, ienv), ienv)
                    for B in self.extensions() for b in self.tuples(B, len(f.vars)))


def weak_force_finite(A: FiniteStructure, f, asg=None, budget: int = DEFAULT_BUDGET) -> Truth:
    asg = normalize_assignment(asg)
    _check_assignment(A, f, asg)
    return WeakForcing(A, budget, _literals(f)).eval(f, asg)


# -- substructures -------------------------------------------------------------


class NotSubstructure(StructureError):
    pass


def is_substructure(A: FiniteStructure, B: FiniteStructure) -> bool:
    if not signatures_compatible(A.signature, B.signature):
        raise StructureError("signature mismatch")
    if not set(A.universe) <= set(B.universe):
        return False
    if dict(A.constants) != dict(B.constants):
        return False
    inside = set(A.universe)
    for store_a, store_b in ((A.tables, B.tables), (A.uniform, B.uniform)):
        for key in set(store_a) | set(store_b):
            mine = store_a.get(key, frozenset())
            theirs = frozenset(r for r in store_b.get(key, ()) if set(r) <= inside)
            if mine != theirs:
                return False
    return True


def _atomic_type(S: FiniteStructure, tup: tuple, keys, const_elems) -> tuple:
    row = tuple(const_elems) + tuple(tup)
    out = []
    for (rel, idx), arity in keys:
        for pos in itertools.product(range(len(row)), repeat=arity):
            if S.holds(rel, idx, tuple(row[p] for p in pos)):
                out.append((rel, idx, pos))
    eq = [(i, j) for i in range(len(row)) for j in range(i + 1, len(row)) if row[i] == row[j]]
    return frozenset(out), tuple(eq)


def n_elementary(A: FiniteStructure, B: FiniteStructure, n: int) -> bool:
    """Decide ``A ≼_n B`` by an exhaustive alternating game.

    ``transfer(k, ...)`` holds when every finitary ∃_k formula true of the
    source tuple is true of the target tuple. A round lets the spoiler pick a
    block of fresh distinct elements in the source; the duplicator answers in
    the target, and the game continues with the roles swapped at level k-1.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not is_substructure(A, B):
        raise NotSubstructure("first structure is not a substructure of the second")
    if n == 0:
        return True
    keys = {}
    for S in (A, B):
        for (rel, idx) in S.keys():
            keys[(rel, idx)] = S.signature.arity_of(rel, len(idx))
    keys = sorted(keys.items(), key=lambda kv: (kv[0][0], tuple(-1 if i is None else i
                                                                for i in kv[0][1])))
    consts = [A.constants[c] for c in sorted(A.constants)]
    structs = (A, B)

    @lru_cache(maxsize=None)
    def tp(side, tup):
        return _atomic_type(structs[side], tup, keys, consts)

    @lru_cache(maxsize=None)
    def transfer(k, src, a, b):
        tgt = 1 - src
        if tp(src, a) != tp(tgt, b):
            return False
        if k == 0:
            return True
        if not transfer(k - 1, tgt, b, a):
            return False
        rest_src = [e for e in structs[src].universe if e not in a]
        rest_tgt = [e for e in structs[tgt].universe if e not in b]
        for m in range(1, len(rest_src) + 1):
            for ys in itertools.combinations(rest_src, m):
                if not any(transfer(k - 1, tgt, b + zs, a + ys)
                           for zs in itertools.permutations(rest_tgt, m)):
                    return False
        return True

    for m in range(len(A.universe) + 1):
        for params in itertools.combinations(A.universe, m):
            if not (transfer(n, 0, params, params) and transfer(n, 1, params, params)):
                return False
    return True


# -- types -------------------------------------------------------------------


def search_tuples(A: FiniteStructure, k: int, test):
    """First k-tuple (in universe order) whose three-valued ``test`` is True.

    Returns ``(Truth, tuple)``; the truth is Unknown when no tuple passes but
    some test was undecided.
    """
    pending = None
    for tup in itertools.product(A.universe, repeat=k):
        r = test(tup)
        if r.value:
            return r, tup
        if r.value is None and pending is None:
            pending = r
    return (FALSE if pending is None else pending), None


def type_realized(A: FiniteStructure, fam, asg=None, variables=None,
                  budget: int = DEFAULT_BUDGET) -> Optional[tuple]:
    """A tuple realizing every member of ``fam``, or None.

    ``fam`` is a finite list of formulas or a ``BigAnd`` template over the
    naturals. In a finite structure a finitely satisfiable type is realized:
    there are finitely many candidate tuples, and one that failed some member
    each would leave the finite set of those members unsatisfied.
    """
    asg = normalize_assignment(asg)
    whole = fam if isinstance(fam, BigAnd) else And(tuple(fam))
    if variables is None:
        variables = sorted(v for v in free_vars(whole) if v not in asg)
    variables = tuple(Var(v) if isinstance(v, str) else v for v in variables)
    ev = Evaluator(A, budget, _literals(whole))

    found, tup = search_tuples(
        A, len(variables), lambda t: ev.eval(whole, {**asg, **dict(zip(variables, t))}))
    if found.value is None:
        raise BudgetExhausted(f"family undecided within budget {budget}")
    return tup
