"""One entry point for "does A weakly force f(ā)?" across structure kinds.

Routes, tried in this order:

* ``tree-oracle``: a tree specification with the built-in tree sentence
* ``block-oracle``: a block configuration with the built-in block sentence
* ``finite-collapse``: a finite structure, through the forcing clauses
* ``force-elementary``: a finite structure, through the elementary formula

The first route that applies decides. ``audit`` runs every applicable route.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .families import (
    BlockConfig, FiniteTree, RegularTree, block_forces_psi, build_tree_structure,
    find_cycle, truncate_to_finite,
)
from .domains import show_tag
from .force import eval_elementary, force
from .library import PSI_BLOCKS, PSI_TREE
from .structures import (
    DEFAULT_BUDGET, Evaluator, FiniteStructure, Truth, normalize_assignment,
    search_tuples, weak_force_finite,
)
from .syntax import Exists

ROUTES = ("tree-oracle", "block-oracle", "finite-collapse", "force-elementary")


class UnsupportedQuery(ValueError):
    pass


@dataclass(frozen=True)
class ForcingQuery:
    structure: object
    formula: object
    assignment: dict = field(default_factory=dict)
    budget: int = DEFAULT_BUDGET


@dataclass(frozen=True)
class ForcingVerdict:
    truth: Truth
    route: str
    witness: object = None

    def report(self) -> str:
        text = f"{self.truth} route={self.route}"
        if self.witness is not None:
            text += f" {witness_text(self.route, self.witness)}"
        return text


def witness_text(route, witness) -> str:
    if route == "tree-oracle":
        return "certificate=[cycle " + " ".join(witness) + "]"
    if isinstance(witness, tuple) and all(isinstance(x, str) for x in witness):
        return "witness=(" + " ".join(witness) + ")"
    return f"witness={show_tag(witness)}"


def _tree_route(q):
    if q.formula != PSI_TREE:
        raise UnsupportedQuery("tree specifications only answer the built-in psi_tree")
    cycle = find_cycle(q.structure)
    return ForcingVerdict(Truth(cycle is not None), "tree-oracle",
                          tuple(cycle) if cycle else None)


def _block_route(q):
    if q.formula != PSI_BLOCKS:
        raise UnsupportedQuery("block configurations only answer the built-in psi_blocks")
    return ForcingVerdict(Truth(block_forces_psi(q.structure)), "block-oracle")


def _collapse_route(q):
    A, f = q.structure, q.formula
    r = weak_force_finite(A, f, q.assignment, q.budget)
    witness = None
    if r.value and isinstance(f, Exists):
        # a realizing tuple for the outermost existential block
        ev = Evaluator(A, q.budget)
        asg = normalize_assignment(q.assignment)
        _, witness = search_tuples(
            A, len(f.vars), lambda t: ev.eval(f.body, ev.bind(asg, f.vars, t, {})))
    return ForcingVerdict(r, "finite-collapse", witness)


def _force_route(q):
    r = eval_elementary(q.structure, force(q.formula), q.assignment, q.budget)
    return ForcingVerdict(Truth(r.value, r.culprit), "force-elementary", r.witness)


def applicable_routes(q: ForcingQuery) -> list:
    s = q.structure
    if isinstance(s, (FiniteTree, RegularTree)):
        routes = [("tree-oracle", _tree_route)]
        if isinstance(s, FiniteTree):
            # a finite tree is coded by a finite structure
            routes += [("finite-collapse", lambda q: _collapse_route(_as_finite(q))),
                       ("force-elementary", lambda q: _force_route(_as_finite(q)))]
        return routes
    if isinstance(s, BlockConfig):
        return [("block-oracle", _block_route)]
    if isinstance(s, FiniteStructure):
        return [("finite-collapse", _collapse_route), ("force-elementary", _force_route)]
    raise UnsupportedQuery(f"unsupported structure kind {type(s).__name__}")


def _as_finite(q):
    t = q.structure
    depth = max(len(s) for s in t.nodes)
    A = truncate_to_finite(build_tree_structure(t), depth)
    return ForcingQuery(A, q.formula, q.assignment, q.budget)


def weak_forces(q: ForcingQuery) -> ForcingVerdict:
    """Verdict from the highest-priority route; Unknown only on a budget limit."""
    verdict = None
    for _, run in applicable_routes(q):
        verdict = run(q)
        if verdict.truth.value is not None:
            return verdict
    return verdict


@dataclass(frozen=True)
class AuditReport:
    verdicts: tuple

    @property
    def decided(self) -> list:
        return [v for v in self.verdicts if v.truth.value is not None]

    @property
    def agree(self) -> bool:
        return len({v.truth.value for v in self.decided}) <= 1

    def report(self) -> str:
        lines = [v.report() for v in self.verdicts]
        lines.append(f"agreement={'yes' if self.agree else 'NO'} routes={len(self.decided)}")
        return "\n".join(lines)


def audit(q: ForcingQuery) -> AuditReport:
    verdicts = [run(q) for _, run in applicable_routes(q)]
    verdicts.sort(key=lambda v: ROUTES.index(v.route))
    return AuditReport(tuple(verdicts))
