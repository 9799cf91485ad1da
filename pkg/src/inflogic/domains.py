"""Index families used as the α and β ranges of elementary formulas.

Every domain is nonempty and enumerates its members ("tags") in a fixed
canonical order built from stages: stage ``s`` only draws on the first
``s + 1`` members of each component domain, so the order is fair across
infinite components and the same on every run.

Tags are plain hashable values:

* ``Unit``: ``()``
* ``Nat(k)``: a k-tuple of naturals, ordered by maximum then lexicographically
* ``Sum``: ``(k, tag)`` for the k-th summand
* ``SumNat``: ``(index tuple, tag)``
* ``Product``: a tuple with one tag per factor
* ``FinSubsets``: a tuple of base tags in the base's canonical order
* ``Choice``: an ``FnTag``, a finite table of exceptions plus a default
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

@dataclass(frozen=True)
class FnTag:
    """A choice function given by finitely many entries and a default value.

    ``default=None`` means the first member of each codomain. Entries that
    agree with the default are dropped, so equal functions have equal tags.
    """

    entries: tuple = ()
    default: object = None

    def table(self) -> dict:
        return dict(self.entries)


class Domain:
    label = "domain"

    def __init__(self):
        self._seq = []
        self._seen = set()
        self._stage = 0
        self._current = None

    def stage(self, s: int):
        raise NotImplementedError

    def size(self, cap: int) -> Optional[int]:
        """Exact size when it is at most ``cap``, otherwise None."""
        raise NotImplementedError

    def first(self, n: int) -> list:
        """The first ``n`` members in canonical order (fewer if the domain is smaller)."""
        if len(self._seq) >= n:
            return self._seq[:n]
        total = self.size(max(n, 1) * 64)
        # Without a known size a finite domain would never signal the end of
        # its enumeration, so the number of stages is capped.
        stage_cap = None if total is not None else n * 4 + 16
        if total is not None:
            n = min(n, total)
        while len(self._seq) < n:
            if self._current is None:
                if stage_cap is not None and self._stage > stage_cap:
                    break
                self._current = iter(self.stage(self._stage))
                self._stage += 1
            for tag in self._current:
                if tag not in self._seen:
                    self._seen.add(tag)
                    self._seq.append(tag)
                    if len(self._seq) >= n:
                        break
            else:
                self._current = None
        return self._seq[:n]

    def head(self):
        return self.first(1)[0]

    def all(self, cap: int) -> Optional[list]:
        total = self.size(cap)
        if total is None:
            return None
        return self.first(total)

    def is_singleton(self) -> bool:
        return self.size(1) == 1


def _bounded(n, cap):
    return n if n <= cap else None


class Unit(Domain):
    label = "unit"

    def stage(self, s):
        return [()]

    def size(self, cap):
        return _bounded(1, cap)


class Nat(Domain):
    def __init__(self, k: int = 1):
        super().__init__()
        self.k = k
        self.label = "nat" if k == 1 else "natpair"

    def stage(self, s):
        return sorted(itertools.product(range(s + 1), repeat=self.k),
                      key=lambda t: (max(t), t))

    def size(self, cap):
        return None


class Sum(Domain):
    label = "sum"

    def __init__(self, parts):
        super().__init__()
        self.parts = list(parts)

    def stage(self, s):
        return [(k, t) for k, d in enumerate(self.parts) for t in d.first(s + 1)]

    def size(self, cap):
        total = 0
        for d in self.parts:
            n = d.size(cap)
            if n is None:
                return None
            total += n
        return _bounded(total, cap)


class Product(Domain):
    label = "product"

    def __init__(self, parts):
        super().__init__()
        self.parts = list(parts)

    def stage(self, s):
        return itertools.product(*(d.first(s + 1) for d in self.parts))

    def size(self, cap):
        total = 1
        for d in self.parts:
            n = d.size(cap)
            if n is None:
                return None
            total *= n
            if total > cap:
                return None
        return total

    def is_singleton(self):
        return all(d.is_singleton() for d in self.parts)


class SumNat(Domain):
    """Disjoint union over index tuples; the fibre may depend on the index."""

    def __init__(self, k: int, fibre: Callable):
        super().__init__()
        self.index = Nat(k)
        self.fibre = fibre
        self.label = self.index.label

    def stage(self, s):
        return [(n, t) for n in self.index.stage(s) for t in self.fibre(n).first(s + 1)]

    def size(self, cap):
        return None


class FinSubsets(Domain):
    label = "finsubsets"

    def __init__(self, base: Domain):
        super().__init__()
        self.base = base

    def stage(self, s):
        pool = self.base.first(s + 1)
        for m in range(min(s, len(pool)) + 1):
            yield from itertools.combinations(pool, m)

    def size(self, cap):
        n = self.base.size(cap.bit_length() + 1)
        if n is None:
            return None
        return _bounded(2 ** n, cap)


class Choice(Domain):
    """Functions picking a member of ``cod(α)`` for every α in ``dom``."""

    label = "choicefn"

    def __init__(self, dom: Domain, cod: Callable, fibres_singleton: bool = False):
        super().__init__()
        self.dom = dom
        self.cod = cod
        self.fibres_singleton = fibres_singleton

    def apply(self, f: FnTag, alpha):
        table = f.table()
        if alpha in table:
            return table[alpha]
        if f.default is not None:
            return f.default
        return self.cod(alpha).head()

    def normalize(self, entries, default=None) -> FnTag:
        kept = []
        for a, b in entries:
            fallback = default if default is not None else self.cod(a).head()
            if b != fallback:
                kept.append((a, b))
        return FnTag(tuple(kept), default)

    def stage(self, s):
        pool = self.dom.first(s + 1)
        options = [[(a, b) for b in self.cod(a).first(s + 1)] for a in pool]
        for combo in itertools.product(*options):
            yield self.normalize(combo)

    def size(self, cap):
        if self.fibres_singleton:
            return _bounded(1, cap)
        n = self.dom.size(cap)
        if n is None:
            return None
        total = 1
        for a in self.dom.first(n):
            m = self.cod(a).size(cap)
            if m is None:
                return None
            total *= m
            if total > cap:
                return None
        return total


def show_tag(tag) -> str:
    """Compact human rendering of a tag."""
    if isinstance(tag, FnTag):
        parts = [f"{show_tag(a)}->{show_tag(b)}" for a, b in tag.entries]
        parts.append("*->" + ("first" if tag.default is None else show_tag(tag.default)))
        return "{" + ", ".join(parts) + "}"
    if isinstance(tag, tuple):
        if tag and all(isinstance(x, int) for x in tag):
            return ",".join(map(str, tag))
        return "(" + " ".join(show_tag(x) for x in tag) + ")"
    return str(tag)
