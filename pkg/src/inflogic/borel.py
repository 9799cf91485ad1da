"""Borel codes over a finite basis of sentences and their compilation into
formulas that are propositional over the basis.

A face S ⊆ D is a tuple of booleans in basis order. Codes denote sets of
faces: ``Basic(i)`` is the set of faces containing D[i], ``Complement`` and
``Union`` act as usual.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .analysis import free_vars, is_finitary
from .parser import parse_formula, render_formula
from .syntax import And, Not, Or, children


class BorelError(ValueError):
    pass


@dataclass(frozen=True)
class Basic:
    index: int


@dataclass(frozen=True)
class BasicNeg:
    index: int


@dataclass(frozen=True)
class Complement:
    of: object


@dataclass(frozen=True)
class Union:
    of: tuple


def Intersection(codes) -> Complement:
    """Sugar: ⋂ Y_k as the complement of ⋃ of complements."""
    return Complement(Union(tuple(Complement(c) for c in codes)))


@dataclass(frozen=True)
class SentenceBasis:
    sentences: tuple

    def __post_init__(self):
        if len(set(self.sentences)) != len(self.sentences):
            raise BorelError("basis members must be distinct")
        for s in self.sentences:
            if not is_finitary(s):
                raise BorelError(f"basis member {render_formula(s)} is not finitary")
            if free_vars(s):
                raise BorelError(f"basis member {render_formula(s)} is not a sentence")

    def __len__(self):
        return len(self.sentences)

    @classmethod
    def parse(cls, texts, sig=None) -> "SentenceBasis":
        return cls(tuple(parse_formula(t, sig) for t in texts))

    def faces(self):
        return itertools.product((False, True), repeat=len(self.sentences))


def _check(c, D: SentenceBasis):
    if isinstance(c, (Basic, BasicNeg)):
        if not 0 <= c.index < len(D):
            raise BorelError(f"basis index {c.index} out of range")
    elif isinstance(c, Complement):
        _check(c.of, D)
    elif isinstance(c, Union):
        for d in c.of:
            _check(d, D)
    else:
        raise BorelError(f"not a Borel code: {c!r}")


def xi_formula(D: SentenceBasis, S) -> And:
    """The sentence pinning every basis member to its truth value in S."""
    if len(S) != len(D):
        raise BorelError("face and basis differ in length")
    parts = tuple(s if inside else Not(s) for s, inside in zip(D.sentences, S))
    return parts[0] if len(parts) == 1 else And(parts)


def borel_to_formula(c, D: SentenceBasis):
    _check(c, D)
    return _compile(c, D)


def _compile(c, D):
    if isinstance(c, Basic):
        return D.sentences[c.index]
    if isinstance(c, BasicNeg):
        return Not(D.sentences[c.index])
    if isinstance(c, Complement):
        return Not(_compile(c.of, D))
    return Or(tuple(_compile(d, D) for d in c.of))


def borel_membership(c, S) -> bool:
    """Whether the face S lies in the set coded by ``c``."""
    if isinstance(c, Basic):
        return bool(S[c.index])
    if isinstance(c, BasicNeg):
        return not S[c.index]
    if isinstance(c, Complement):
        return not borel_membership(c.of, S)
    if isinstance(c, Union):
        return any(borel_membership(d, S) for d in c.of)
    raise BorelError(f"not a Borel code: {c!r}")


def propositional_value(f, D: SentenceBasis, S) -> bool:
    """Truth of ``f`` when each basis member is an atom valued by S.

    Anything other than a basis member under ¬, ∧, ∨ is rejected, which also
    checks that ``f`` is propositional over the basis.
    """
    for s, v in zip(D.sentences, S):
        if f == s:
            return bool(v)
    if isinstance(f, Not):
        return not propositional_value(f.body, D, S)
    if isinstance(f, And):
        return all(propositional_value(g, D, S) for g in f.parts)
    if isinstance(f, Or):
        return any(propositional_value(g, D, S) for g in f.parts)
    raise BorelError(f"{render_formula(f)} is not built from basis members")


def basis_members_in(f, D: SentenceBasis) -> list:
    """Basis members occurring in a compiled formula, in order of occurrence."""
    if f in D.sentences:
        return [f]
    out = []
    for g in children(f):
        out.extend(basis_members_in(g, D))
    return out


def code_depth(c) -> int:
    if isinstance(c, (Basic, BasicNeg)):
        return 0
    if isinstance(c, Complement):
        return 1 + code_depth(c.of)
    return 1 + max((code_depth(d) for d in c.of), default=0)


def code_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    op = data.get("op")
    if op == "basic":
        return Basic(int(data["theta"]))
    if op == "basicneg":
        return BasicNeg(int(data["theta"]))
    if op == "complement":
        return Complement(code_from_json(data["of"]))
    if op == "union":
        return Union(tuple(code_from_json(d) for d in data["of"]))
    if op == "intersection":
        return Intersection([code_from_json(d) for d in data["of"]])
    raise BorelError(f"unknown code op {op!r}")


def code_to_json(c) -> dict:
    if isinstance(c, Basic):
        return {"op": "basic", "theta": c.index}
    if isinstance(c, BasicNeg):
        return {"op": "basicneg", "theta": c.index}
    if isinstance(c, Complement):
        return {"op": "complement", "of": code_to_json(c.of)}
    return {"op": "union", "of": [code_to_json(d) for d in c.of]}
