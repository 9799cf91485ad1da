import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inflogic.analysis import classify
from inflogic.borel import (
    Basic, BasicNeg, BorelError, Complement, Intersection, SentenceBasis, Union,
    basis_members_in, borel_membership, borel_to_formula, code_depth, code_from_json,
    code_to_json, propositional_value, xi_formula,
)
from inflogic.parser import parse_formula
from inflogic.syntax import And, Not, Or

POOL = SentenceBasis.parse([
    "(exists (x) (atom Q x))",
    "(forall (x) (atom Q x))",
    "(exists (x y) (atom R x y))",
    "(forall (x) (exists (y) (atom R x y)))",
])
T1, T2 = POOL.sentences[:2]
PAIR = SentenceBasis((T1, T2))


def test_xi_examples():
    assert xi_formula(SentenceBasis((T1,)), (True,)) == T1
    assert xi_formula(PAIR, (True, False)) == And((T1, Not(T2)))
    assert xi_formula(PAIR, (False, False)) == And((Not(T1), Not(T2)))
    with pytest.raises(BorelError):
        xi_formula(PAIR, (True,))


def test_compile_examples():
    assert borel_to_formula(Basic(0), PAIR) == T1
    assert borel_to_formula(Complement(Basic(0)), PAIR) == Not(T1)
    assert borel_to_formula(Union((Basic(0), BasicNeg(1))), PAIR) == Or((T1, Not(T2)))


def test_membership_examples():
    assert borel_membership(Basic(0), (True,))
    for S in POOL.faces():
        assert borel_membership(Complement(Union(())), S)
        assert not borel_membership(Union(()), S)


def test_basis_must_be_finitary_sentences():
    with pytest.raises(BorelError):
        SentenceBasis.parse(["(atom Q x)"])
    with pytest.raises(BorelError):
        SentenceBasis.parse(["(exists (x) (Or (n) (atom P_n x)))"])
    with pytest.raises(BorelError):
        SentenceBasis((T1, T1))


def test_codes_must_fit_the_basis():
    with pytest.raises(BorelError):
        borel_to_formula(Basic(2), PAIR)
    with pytest.raises(BorelError):
        code_from_json({"op": "meet"})


def test_propositional_value_rejects_foreign_formulas():
    with pytest.raises(BorelError):
        propositional_value(parse_formula("(exists (x) (not (atom Q x)))"), PAIR, (True, True))


def codes(size):
    leaves = st.builds(Basic, st.integers(0, size - 1)) | \
        st.builds(BasicNeg, st.integers(0, size - 1))
    return st.recursive(
        leaves,
        lambda inner: st.builds(Complement, inner)
        | st.builds(lambda xs: Union(tuple(xs)), st.lists(inner, max_size=3))
        | st.builds(Intersection, st.lists(inner, max_size=3)),
        max_leaves=12)


bases = st.integers(1, 4).map(lambda k: SentenceBasis(POOL.sentences[:k]))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_compiler_correct_on_every_face(data):
    D = data.draw(bases)
    c = data.draw(codes(len(D)))
    f = borel_to_formula(c, D)
    for S in D.faces():
        assert borel_membership(c, S) == propositional_value(f, D, S)
        assert borel_membership(Complement(c), S) == (not borel_membership(c, S))
        # the face's own description decides the code
        assert propositional_value(xi_formula(D, S), D, S)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_output_is_propositional_over_the_basis(data):
    D = data.draw(bases)
    c = data.draw(codes(len(D)))
    f = borel_to_formula(c, D)
    members = basis_members_in(f, D)
    assert set(members) <= set(D.sentences)
    worst = max((classify(s).exists_rank for s in D.sentences), default=0)
    assert all(classify(s).exists_rank <= worst for s in members)


@settings(max_examples=100, deadline=None)
@given(codes(4))
def test_code_json_round_trip(c):
    back = code_from_json(code_to_json(c))
    assert back == c
    assert code_depth(back) == code_depth(c)
