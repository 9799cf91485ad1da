import itertools
import random

import pytest
from generators import SIG, formulas, random_assignment, structures
from hypothesis import given, settings

from inflogic.analysis import (
    classify, formal_negate, fragment_closure, free_vars, instantiate, nnf,
    substitute, wellformed,
)
from inflogic.library import PSI_BLOCKS, PSI_TREE
from inflogic.parser import parse_formula, render_formula
from inflogic.structures import FiniteStructure, satisfies
from inflogic.syntax import (
    And, ArityError, Atom, BigAnd, BigOr, Exists, Forall, FormulaSyntaxError, Not, Or,
    Signature, children, UnboundIndexError, UnknownSymbolError, Var,
)

x, y = Var("x"), Var("y")
PSI_TEXT = ("(forall (x) (or (not (atom Q x)) (exists (y) (and (atom R x y) "
            "(And (n) (not (atom P_n y)))))))")


def test_parse_atom():
    assert parse_formula("(atom Q x)", SIG) == Atom("Q", (), (x,))
    assert render_formula(Atom("Q", (), (x,))) == "(atom Q x)"


def test_parse_psi_matches_builtin_after_desugaring():
    assert parse_formula(PSI_TEXT, SIG) == PSI_BLOCKS
    assert parse_formula(render_formula(PSI_BLOCKS), SIG) == PSI_BLOCKS


@pytest.mark.parametrize("text, error, where", [
    ("(atom R x", FormulaSyntaxError, "1:10"),
    (")", FormulaSyntaxError, "1:1"),
    ("(foo x)", FormulaSyntaxError, "1:1"),
    ("(exists (x x) (atom Q x))", FormulaSyntaxError, "1:9"),
    ("(atom R x y z)", ArityError, "1:1"),
    ("(atom Nope x)", UnknownSymbolError, "1:7"),
    ("(And (n) (atom P_m x))", UnboundIndexError, "1:16"),
])
def test_parse_errors_carry_positions(text, error, where):
    with pytest.raises(error) as info:
        parse_formula(text, SIG)
    assert str(info.value).startswith(where)


def test_implication_is_sugar():
    f = parse_formula("(implies (atom Q x) (atom Q y))", SIG)
    assert f == Or((Not(Atom("Q", (), (x,))), Atom("Q", (), (y,))))


def test_free_vars_examples():
    assert free_vars(Atom("R", (), (x, y))) == {x, y}
    assert free_vars(PSI_BLOCKS) == frozenset()
    fam = parse_formula("(And (n) (not (atom P_n y)))", SIG)
    assert free_vars(fam) == {y}
    for n in range(6):
        assert free_vars(instantiate(fam.body, {"n": n})) == {y}


def test_formal_negate_examples():
    p = Atom("P", (0,), (x,))
    assert formal_negate(p) == Not(p)
    f = parse_formula("(And (i) (Or (j) (atom R_{i,j} x)))")
    assert formal_negate(f) == parse_formula("(Or (i) (And (j) (not (atom R_{i,j} x))))")
    g = parse_formula("(forall (x) (exists (y) (atom R x y)))", SIG)
    assert formal_negate(g) == parse_formula("(exists (x) (forall (y) (not (atom R x y))))", SIG)


def _all_binary_structures(max_size):
    for m in range(1, max_size + 1):
        universe = [f"e{i}" for i in range(m)]
        pairs = list(itertools.product(universe, repeat=2))
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            rows = [list(p) for p, b in zip(pairs, bits) if b]
            yield FiniteStructure.build(universe, {"R": rows}, {}, SIG)


def test_formal_negate_extensional_on_small_structures():
    g = parse_formula("(forall (x) (exists (y) (atom R x y)))", SIG)
    ng = formal_negate(g)
    count = 0
    for A in _all_binary_structures(3):
        count += 1
        assert satisfies(A, ng).value == (not satisfies(A, g).value)
    assert count == 2 + 16 + 512


def test_classify_examples():
    inner = parse_formula("(And (i) (exists (x) (atom P_i x)))", SIG)
    q = classify(inner)
    assert (q.exists_rank, q.forall_rank) == (1, 2)
    assert q.sigma_rank == 3 and q.pi_rank == 2
    a = classify(Atom("Q", (), (x,)))
    assert (a.exists_rank, a.forall_rank, a.sigma_rank, a.pi_rank) == (0, 0, 0, 0)
    assert classify(PSI_BLOCKS).forall_rank == 2
    assert str(classify(PSI_BLOCKS)) == "forall_rank=2 exists_rank=3 pi_rank=3 sigma_rank=4"


def test_fragment_closure_examples():
    p = Atom("P", (0,), (x,))
    assert fragment_closure(p) == {p, Not(p)}
    e = parse_formula("(exists (y) (atom R x y))", SIG)
    r = Atom("R", (), (x, y))
    assert fragment_closure(e) == {e, Not(e), r, Not(r)}
    assert len(fragment_closure(PSI_BLOCKS)) == 16


def test_wellformed_examples():
    sig = Signature({"Q": 1, "R": 2}, {"P": (1, 1)})
    assert wellformed(PSI_BLOCKS, sig) == []
    kinds = [v.kind for v in wellformed(Atom("R", (), (x,)), sig)]
    assert kinds == ["arity"]
    varying = parse_formula("(And (n) (atom P_n y_{n}))")
    assert [v.kind for v in wellformed(varying, sig)] == ["free-variables"]
    assert [v.kind for v in wellformed(Atom("S", (), (x,)), sig)] == ["unknown-symbol"]


def test_substitute_avoids_capture():
    f = parse_formula("(exists (y) (atom R x y))", SIG)
    g = substitute(f, {x: y})
    assert free_vars(g) == {y}
    assert isinstance(g, Exists) and g.vars[0] != y


@settings(max_examples=200, deadline=None)
@given(formulas(depth=6))
def test_render_parse_round_trip(f):
    assert parse_formula(render_formula(f), SIG) == f


@settings(max_examples=200, deadline=None)
@given(formulas(depth=5))
def test_formal_negate_is_involution_up_to_nnf(f):
    assert formal_negate(formal_negate(f)) == nnf(f)


def _negation_only_above_atoms(f):
    if isinstance(f, Not):
        return isinstance(f.body, Atom)
    return all(_negation_only_above_atoms(g) for g in children(f))


@settings(max_examples=200, deadline=None)
@given(formulas(depth=5))
def test_formal_negate_output_shape(f):
    assert _negation_only_above_atoms(formal_negate(f))


@settings(max_examples=150, deadline=None)
@given(formulas(depth=4), structures())
def test_formal_negate_extensional(f, A):
    asg = random_assignment(random.Random(len(A.universe)), A, f)
    pos, neg = satisfies(A, f, asg).value, satisfies(A, formal_negate(f), asg).value
    if pos is not None and neg is not None:
        assert neg == (not pos)


@settings(max_examples=300, deadline=None)
@given(formulas(depth=5))
def test_classify_monotone_and_dual(f):
    q, nq = classify(f), classify(formal_negate(f))
    if q.sigma_rank is not None:
        assert q.exists_rank <= q.sigma_rank
    if q.pi_rank is not None:
        assert q.forall_rank <= q.pi_rank
    assert nq.forall_rank == q.exists_rank and nq.exists_rank == q.forall_rank


@settings(max_examples=100, deadline=None)
@given(formulas(depth=4))
def test_fragment_closure_is_closed(f):
    closure = fragment_closure(f)
    assert f in closure
    for g in closure:
        for h in children(g):
            assert h in closure
        assert (g.body if isinstance(g, Not) else Not(g)) in closure


def test_ranks_of_tree_sentence():
    q = classify(PSI_TREE)
    assert (q.forall_rank, q.exists_rank, q.pi_rank, q.sigma_rank) == (2, 1, 4, 3)


def test_big_connectives_do_not_raise_quantifier_ranks():
    body = Atom("P", ("n",), (x,))
    for fam in (BigAnd(("n",), body), BigOr(("n",), body)):
        q = classify(fam)
        assert (q.exists_rank, q.forall_rank) == (0, 0)
    assert classify(Forall((x,), And((body,)))).forall_rank == 1
