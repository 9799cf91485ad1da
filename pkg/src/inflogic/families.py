"""Closed-form oracles for two infinite structure families.

Trees. A tree T of finite natural-number sequences is coded by a structure
whose elements are the nodes of T, where a node σ satisfies exactly the unary
relations ``R_{i,σ(i)}`` for ``i < |σ|``. Infinite trees are given as regular
trees: a finite rooted graph with labelled edges, standing for its unfolding.

Blocks. A standard block is a root satisfying ``Q`` together with children
``b_n`` (``R(root, b_n)``), one for each n, where ``b_n`` satisfies ``P_n``
and no other ``P_m``. A non-standard block adds children satisfying no
``P_n`` at all. Counts of blocks and of extra children may be infinite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from .structures import FiniteStructure
from .syntax import Signature


class SpecError(ValueError):
    pass


TREE_SIGNATURE = Signature({}, {"R": (2, 1)})
BLOCK_SIGNATURE = Signature({"Q": 1, "R": 2}, {"P": (1, 1)})


# -- trees ---------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteTree:
    nodes: frozenset

    def __post_init__(self):
        if () not in self.nodes:
            raise SpecError("tree must contain the root ()")
        for s in self.nodes:
            if any(not isinstance(x, int) or x < 0 for x in s):
                raise SpecError(f"node {list(s)} is not a sequence of naturals")
            if s and s[:-1] not in self.nodes:
                raise SpecError(f"tree is not prefix-closed: {list(s)} lacks its parent")

    @classmethod
    def of(cls, nodes) -> "FiniteTree":
        return cls(frozenset(tuple(s) for s in nodes))

    def children(self, s):
        return sorted(t[-1] for t in self.nodes if len(t) == len(s) + 1 and t[:-1] == s)


@dataclass(frozen=True)
class RegularTree:
    states: tuple
    root: str
    edges: tuple    # (source, label, target)

    def __post_init__(self):
        names = set(self.states)
        if len(names) != len(self.states):
            raise SpecError("repeated state name")
        if self.root not in names:
            raise SpecError(f"root {self.root!r} is not a state")
        seen = set()
        for src, label, dst in self.edges:
            if src not in names or dst not in names:
                raise SpecError(f"edge {src}->{dst} mentions an unknown state")
            if not isinstance(label, int) or label < 0:
                raise SpecError(f"edge label {label!r} is not a natural number")
            if (src, label) in seen:
                raise SpecError(f"state {src} has two edges labelled {label}")
            seen.add((src, label))

    def successors(self, state):
        return sorted((label, dst) for src, label, dst in self.edges if src == state)

    def children(self, s):
        state = self.walk(s)
        return [label for label, _ in self.successors(state)] if state is not None else []

    def walk(self, s):
        """The state reached by following the labels in ``s``, or None."""
        state = self.root
        for label in s:
            nxt = dict(self.successors(state)).get(label)
            if nxt is None:
                return None
            state = nxt
        return state


TreeSpec = Union[FiniteTree, RegularTree]


def tree_from_json(data) -> TreeSpec:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind")
    if kind == "finite":
        return FiniteTree.of(data["nodes"])
    if kind == "regular":
        return RegularTree(tuple(data["nodes"]), data["root"],
                           tuple((s, int(l), d) for s, l, d in data.get("edges", [])))
    raise SpecError(f"unknown tree kind {kind!r}")


def tree_to_json(t: TreeSpec) -> dict:
    if isinstance(t, FiniteTree):
        return {"kind": "finite", "nodes": sorted(list(s) for s in t.nodes)}
    return {"kind": "regular", "nodes": list(t.states), "root": t.root,
            "edges": [list(e) for e in t.edges]}


def node_name(s) -> str:
    return "<" + ",".join(map(str, s)) + ">"


@dataclass(frozen=True)
class TreeHandle:
    """The structure coding a tree; atomic facts are answered exactly."""

    tree: TreeSpec
    signature: Signature = TREE_SIGNATURE

    def contains(self, s) -> bool:
        s = tuple(s)
        if isinstance(self.tree, FiniteTree):
            return s in self.tree.nodes
        return self.tree.walk(s) is not None

    def holds(self, i: int, j: int, s) -> bool:
        s = tuple(s)
        return self.contains(s) and i < len(s) and s[i] == j

    def nodes(self, depth: int):
        """Nodes of length at most ``depth`` in breadth-first, label order."""
        layer, out = [()], []
        for d in range(depth + 1):
            out.extend(layer)
            if d == depth:
                break
            layer = [s + (c,) for s in layer for c in self.tree.children(s)]
        return out


def build_tree_structure(t: TreeSpec) -> TreeHandle:
    if not isinstance(t, (FiniteTree, RegularTree)):
        raise SpecError("not a tree specification")
    return TreeHandle(t)


def truncate_to_finite(h: TreeHandle, depth: int) -> FiniteStructure:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    nodes = h.nodes(depth)
    rels = {}
    for s in nodes:
        for i, j in enumerate(s):
            rels.setdefault(f"R_{i},{j}", []).append([node_name(s)])
    return FiniteStructure.build([node_name(s) for s in nodes], rels, {}, h.signature)


def find_cycle(t: TreeSpec) -> Optional[list]:
    """A cycle of states reachable from the root, or None.

    Depth-first search with an explicit stack; a back edge to a state still on
    the stack closes a cycle.
    """
    if isinstance(t, FiniteTree):
        return None
    colour = {s: 0 for s in t.states}      # 0 new, 1 on stack, 2 done
    path = []
    stack = [(t.root, iter(t.successors(t.root)))]
    colour[t.root] = 1
    path.append(t.root)
    while stack:
        state, it = stack[-1]
        step = next(it, None)
        if step is None:
            colour[state] = 2
            stack.pop()
            path.pop()
            continue
        _, nxt = step
        if colour[nxt] == 1:
            return path[path.index(nxt):]
        if colour[nxt] == 0:
            colour[nxt] = 1
            path.append(nxt)
            stack.append((nxt, iter(t.successors(nxt))))
    return None


def infinite_path(t: TreeSpec) -> Optional[tuple]:
    """An eventually periodic infinite branch as ``(prefix labels, cycle labels)``."""
    cycle = find_cycle(t)
    if cycle is None:
        return None
    # labels from the root to the cycle entry, found by breadth-first search
    start = cycle[0]
    frontier, seen = [(t.root, ())], {t.root}
    prefix = None
    while frontier:
        nxt_frontier = []
        for state, labels in frontier:
            if state == start:
                prefix = labels
                break
            for label, dst in t.successors(state):
                if dst not in seen:
                    seen.add(dst)
                    nxt_frontier.append((dst, labels + (label,)))
        if prefix is not None:
            break
        frontier = nxt_frontier
    loop = []
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        loop.append(min(label for label, dst in t.successors(a) if dst == b))
    return prefix, tuple(loop)


def tree_has_infinite_path(t: TreeSpec) -> bool:
    return find_cycle(t) is not None


def tree_forces_psi(t: TreeSpec) -> bool:
    """Weak forcing of ∃x ⋀_i ⋁_j R_{i,j}(x) in the tree structure.

    A generic extension adds an element realizing a path exactly when the tree
    has an infinite branch.
    """
    return tree_has_infinite_path(t)


def tree_satisfies_psi(t: TreeSpec) -> bool:
    """Truth of the same sentence: always false, since every node is a finite
    sequence and fails the conjunct at ``i = |σ|``."""
    build_tree_structure(t)
    return False


# -- blocks --------------------------------------------------------------------


class Omega:
    """The first infinite cardinal, closed under adding naturals."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "omega"

    __str__ = __repr__

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return isinstance(other, Omega)

    def __hash__(self):
        return hash("omega")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, Omega)


OMEGA = Omega()
Count = Union[int, Omega]


def _count(value, what) -> Count:
    if value in ("omega", "ω") or isinstance(value, Omega):
        return OMEGA
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise SpecError(f"{what} must be a natural number or omega, got {value!r}")
    return value


@dataclass(frozen=True)
class NonstandardBlocks:
    """``count`` non-standard blocks, each with ``extra`` unlabelled children."""

    extra: Count
    count: Count = 1

    def __post_init__(self):
        object.__setattr__(self, "extra", _count(self.extra, "extra"))
        object.__setattr__(self, "count", _count(self.count, "count"))
        if self.extra == 0 or self.count == 0:
            raise SpecError("non-standard descriptors need extra >= 1 and count >= 1")


@dataclass(frozen=True)
class BlockConfig:
    standard: Count
    nonstandard: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "standard", _count(self.standard, "standard"))
        object.__setattr__(self, "nonstandard", tuple(self.nonstandard))
        if self.standard == 0 and not self.nonstandard:
            raise SpecError("a configuration needs at least one block")

    def infinitely_many_blocks(self) -> bool:
        return self.standard == OMEGA or any(d.count == OMEGA for d in self.nonstandard)

    def to_json(self) -> dict:
        def enc(c):
            return "omega" if c == OMEGA else c
        out = []
        for d in self.nonstandard:
            item = {"extra": enc(d.extra)}
            if d.count != 1:
                item["count"] = enc(d.count)
            out.append(item)
        return {"standard": enc(self.standard), "nonstandard": out}

    @classmethod
    def from_json(cls, data) -> "BlockConfig":
        if isinstance(data, str):
            data = json.loads(data)
        descs = tuple(NonstandardBlocks(d["extra"], d.get("count", 1))
                      for d in data.get("nonstandard", []))
        return cls(data.get("standard", 0), descs)

    def describe(self) -> str:
        parts = [f"standard={self.standard}"]
        for d in self.nonstandard:
            parts.append(f"nonstandard(extra={d.extra}" + (f", count={d.count})"
                                                          if d.count != 1 else ")"))
        return " ".join(parts)


ORIGINAL = BlockConfig(OMEGA)


def block_satisfies_psi(c: BlockConfig) -> bool:
    """Every Q-root has an unlabelled child iff no block is standard."""
    return c.standard == 0


def block_forces_psi(c: BlockConfig) -> bool:
    """The structure of countably many standard blocks forces ψ, and so does
    every elementary extension of it.

    Only configurations with infinitely many blocks arise that way; a finite
    configuration is rejected rather than answered.
    """
    if not c.infinitely_many_blocks():
        raise SpecError("forcing is only known for configurations with infinitely many blocks")
    return True


def alternate_extension(c: BlockConfig) -> BlockConfig:
    """One move of the alternation: flip the truth of ψ by an elementary extension.

    If ψ holds, add one standard block. Otherwise give every standard block one
    unlabelled child, turning it non-standard.
    """
    if block_satisfies_psi(c):
        return BlockConfig(c.standard + 1, c.nonstandard)
    if c.standard == OMEGA:
        added = (NonstandardBlocks(1, OMEGA),)
    else:
        added = tuple(NonstandardBlocks(1) for _ in range(c.standard))
    return BlockConfig(0, c.nonstandard + added)


def materialize_blocks(c: BlockConfig, cap: int = 2) -> FiniteStructure:
    """A finite stand-in: at most ``cap`` of each infinite count, and standard
    children b_0..b_{cap-1}. The truth value of ψ is unchanged."""
    def n(x):
        return cap if x == OMEGA else x
    universe, rels = [], {"Q": [], "R": []}
    blocks = [0] * n(c.standard)
    for d in c.nonstandard:
        blocks += [n(d.extra)] * n(d.count)
    for k, extra in enumerate(blocks):
        root = f"a{k}"
        universe.append(root)
        rels["Q"].append([root])
        for m in range(cap):
            child = f"b{k}_{m}"
            universe.append(child)
            rels["R"].append([root, child])
            rels.setdefault(f"P_{m}", []).append([child])
        for m in range(extra):
            star = f"s{k}_{m}"
            universe.append(star)
            rels["R"].append([root, star])
    return FiniteStructure.build(universe, rels, {}, BLOCK_SIGNATURE)
