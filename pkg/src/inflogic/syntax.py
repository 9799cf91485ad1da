"""Formula AST for finitary and infinitary first-order logic.

Formulas are immutable trees. Infinite conjunctions and disjunctions are kept
symbolic: ``BigAnd(("n",), body)`` stands for the conjunction of ``body`` over
every natural-number value of the index variable ``n``. Index variables may
only occur inside relation subscripts (``P_n``, ``R_{i,j}``) and inside
subscripted variable names (``y_{n}``).

Equality is the built-in binary relation ``=``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Union

EQUALITY = "="

IndexExpr = Union[int, str]


class FormulaError(ValueError):
    """Base class for every error raised while building or reading formulas."""


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownSymbolError(FormulaError):
    pass


class ArityError(FormulaError):
    pass


class UnboundIndexError(FormulaError):
    pass


class UnboundVariableError(FormulaError):
    pass


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Var:
    name: str
    index: tuple = ()

    def __str__(self) -> str:
        if not self.index:
            return self.name
        return f"{self.name}_{{{','.join(map(str, self.index))}}}"


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Const]


# -- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    rel: str
    index: tuple
    args: tuple

    @property
    def relation_name(self) -> str:
        """Concrete name, e.g. ``P_3`` or ``R_1,2``; symbolic when indices are variables."""
        if not self.index:
            return self.rel
        return f"{self.rel}_{','.join(map(str, self.index))}"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class BigAnd:
    """Conjunction of ``body`` over all values in N^k of the index variables."""

    ivars: tuple
    body: "Formula"


@dataclass(frozen=True)
class BigOr:
    ivars: tuple
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: "Formula"


Formula = Union[Atom, Not, And, Or, BigAnd, BigOr, Exists, Forall]

CONNECTIVES = (And, Or)
FAMILIES = (BigAnd, BigOr)
QUANTIFIERS = (Exists, Forall)


def children(f) -> tuple:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, (And, Or)):
        return f.parts
    return (f.body,)


def rebuild(f, kids):
    """Same node as ``f`` with its immediate subformulas replaced."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, And):
        return And(tuple(kids))
    if isinstance(f, Or):
        return Or(tuple(kids))
    if isinstance(f, BigAnd):
        return BigAnd(f.ivars, kids[0])
    if isinstance(f, BigOr):
        return BigOr(f.ivars, kids[0])
    if isinstance(f, Exists):
        return Exists(f.vars, kids[0])
    return Forall(f.vars, kids[0])


def atom(rel: str, *args, index=()) -> Atom:
    """Convenience constructor: ``atom("R", "x", "y")`` with string args as variables."""
    terms = tuple(Var(a) if isinstance(a, str) else a for a in args)
    return Atom(rel, tuple(index), terms)


def implies(a, b):
    return Or((Not(a), b))


def iff(a, b):
    return And((Or((Not(a), b)), Or((Not(b), a))))


# -- signatures --------------------------------------------------------------

_INDEXED_NAME = re.compile(r"^(.+?)_(\d+(?:,\d+)*)$")


def split_indexed(name: str):
    """``"R_1,2"`` -> ``("R", (1, 2))``; plain names come back with ``()``."""
    m = _INDEXED_NAME.match(name)
    if not m:
        return name, ()
    return m.group(1), tuple(int(p) for p in m.group(2).split(","))


@dataclass(frozen=True)
class Signature:
    """Relational signature with indexed relation families and constants.

    ``relations`` maps plain names to arities; ``families`` maps a base name to
    ``(index_arity, arity)``.
    """

    relations: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    constants: frozenset = frozenset()

    def __post_init__(self):
        names = list(self.relations) + list(self.families) + list(self.constants)
        if len(names) != len(set(names)):
            raise FormulaError("signature names must be distinct across categories")
        if EQUALITY in names:
            raise FormulaError("'=' is built in")
        for name in self.relations:
            base, idx = split_indexed(name)
            if idx and base in self.families:
                raise FormulaError(f"relation {name} collides with family {base}")
        for base, (k, arity) in self.families.items():
            if k not in (1, 2) or arity < 1:
                raise FormulaError(f"bad indexed family {base}")
        for arity in self.relations.values():
            if arity < 1:
                raise FormulaError("relation arities must be positive")

    def __hash__(self):
        return hash((tuple(sorted(self.relations.items())),
                     tuple(sorted(self.families.items())), self.constants))

    def arity_of(self, rel: str, index_len: int) -> int:
        if rel == EQUALITY and index_len == 0:
            return 2
        if index_len == 0:
            if rel not in self.relations:
                raise UnknownSymbolError(f"unknown relation {rel}")
            return self.relations[rel]
        if rel not in self.families:
            raise UnknownSymbolError(f"unknown indexed family {rel}")
        k, arity = self.families[rel]
        if k != index_len:
            raise ArityError(f"family {rel} takes {k} indices, got {index_len}")
        return arity

    def merge(self, other: "Signature") -> "Signature":
        return Signature({**self.relations, **other.relations},
                         {**self.families, **other.families},
                         self.constants | other.constants)

    def to_json(self) -> dict:
        return {
            "relations": dict(sorted(self.relations.items())),
            "indexed_families": {b: {"index_arity": k, "arity": a}
                                 for b, (k, a) in sorted(self.families.items())},
            "constants": sorted(self.constants),
        }

    @classmethod
    def from_json(cls, data) -> "Signature":
        if isinstance(data, str):
            data = json.loads(data)
        fams = {}
        for base, spec in data.get("indexed_families", {}).items():
            fams[base] = (int(spec["index_arity"]), int(spec["arity"]))
        return cls({k: int(v) for k, v in data.get("relations", {}).items()},
                   fams, frozenset(data.get("constants", ())))
