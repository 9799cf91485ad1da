"""Built-in named sentences and their signatures."""

from __future__ import annotations

from .families import BLOCK_SIGNATURE, TREE_SIGNATURE
from .parser import parse_formula

# Every Q-root has a child satisfying none of the P_n.
PSI_BLOCKS_TEXT = """\
(forall (x)
  (implies (atom Q x)
           (exists (y) (and (atom R x y) (And (n) (not (atom P_n y)))))))
"""

# Some element lies on every level of an infinite branch.
PSI_TREE_TEXT = "(exists (x) (And (i) (Or (j) (atom R_{i,j} x))))\n"

PSI_BLOCKS = parse_formula(PSI_BLOCKS_TEXT, BLOCK_SIGNATURE)
PSI_TREE = parse_formula(PSI_TREE_TEXT, TREE_SIGNATURE)

BUILTINS = {
    "psi_blocks": (PSI_BLOCKS_TEXT, PSI_BLOCKS, BLOCK_SIGNATURE),
    "psi_tree": (PSI_TREE_TEXT, PSI_TREE, TREE_SIGNATURE),
}


def builtin(name: str):
    """Formula for a built-in name, also accepting a ``.fml`` suffix."""
    key = name[:-4] if name.endswith(".fml") else name
    if key not in BUILTINS:
        raise KeyError(name)
    return BUILTINS[key][1]
