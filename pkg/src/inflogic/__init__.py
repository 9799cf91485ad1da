"""Infinitary first-order formulas, finite structures and weak forcing."""

from .analysis import (
    QuantClass, classify, formal_negate, fragment_closure, free_vars, wellformed,
)
from .families import (
    OMEGA, BlockConfig, FiniteTree, RegularTree, alternate_extension,
    block_forces_psi, block_satisfies_psi, build_tree_structure, tree_forces_psi,
    tree_has_infinite_path, tree_satisfies_psi, truncate_to_finite,
)
from .force import elementary_leaves, eval_elementary, force
from .forcing import ForcingQuery, ForcingVerdict, audit, weak_forces
from .library import PSI_BLOCKS, PSI_TREE
from .parser import parse_formula, render_formula
from .structures import (
    FiniteStructure, Truth, is_substructure, n_elementary, satisfies, type_realized,
    weak_force_finite,
)
from .syntax import Signature

__all__ = [
    "QuantClass", "classify", "formal_negate", "fragment_closure", "free_vars",
    "wellformed", "OMEGA", "BlockConfig", "FiniteTree", "RegularTree",
    "alternate_extension", "block_forces_psi", "block_satisfies_psi",
    "build_tree_structure", "tree_forces_psi", "tree_has_infinite_path",
    "tree_satisfies_psi", "truncate_to_finite", "elementary_leaves",
    "eval_elementary", "force", "ForcingQuery", "ForcingVerdict", "audit",
    "weak_forces", "PSI_BLOCKS", "PSI_TREE", "parse_formula", "render_formula",
    "FiniteStructure", "Truth", "is_substructure", "n_elementary", "satisfies",
    "type_realized", "weak_force_finite", "Signature",
]
