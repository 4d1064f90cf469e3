import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from oreach.logic import (
    FALSE,
    TRUE,
    Concept,
    Constraint,
    Eq,
    Ind,
    Lit,
    Role,
    Var,
    atoms_of,
    conj,
    disj,
    evaluate,
    free_vars,
    from_dnf,
    neg,
    nnf,
    substitute,
    to_dnf,
)

x, y, z = Var("x"), Var("y"), Var("z")
a = Ind("a")
ATOMS = [Concept("A", x), Concept("B", y), Role("r", x, y), Eq(x, z), Concept("A", a)]


def formulas():
    leaf = st.sampled_from(ATOMS + [TRUE, FALSE])
    return st.recursive(
        leaf,
        lambda kids: st.one_of(
            kids.map(neg),
            st.lists(kids, min_size=2, max_size=3).map(lambda fs: conj(*fs)),
            st.lists(kids, min_size=2, max_size=3).map(lambda fs: disj(*fs)),
        ),
        max_leaves=8,
    )


def valuations():
    for bits in itertools.product([False, True], repeat=len(ATOMS)):
        yield dict(zip(ATOMS, bits))


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_dnf_preserves_truth_table(f):
    d = from_dnf(to_dnf(f))
    for v in valuations():
        assert evaluate(f, v) == evaluate(d, v)


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_nnf_preserves_truth_table(f):
    g = nnf(f)
    for v in valuations():
        assert evaluate(f, v) == evaluate(g, v)


def test_dnf_drops_contradictory_disjuncts():
    f = conj(Concept("A", x), neg(Concept("A", x)))
    assert to_dnf(f) == []
    assert to_dnf(TRUE) == [Constraint()]


def test_substitute_renames_terms_everywhere():
    f = conj(Role("r", x, y), neg(Eq(x, a)))
    g = substitute(f, {x: z, y: a})
    assert free_vars(g) == {z}
    assert Role("r", z, a) in set(atoms_of(g))


def test_constant_folding():
    assert conj(TRUE, Concept("A", x)) == Concept("A", x)
    assert disj(TRUE, Concept("A", x)) == TRUE
    assert conj(FALSE, Concept("A", x)) == FALSE
    assert neg(neg(Concept("A", x))) == Concept("A", x)


def test_equality_is_symmetric():
    assert Eq(x, y) == Eq(y, x)


def test_literal_rendering():
    assert str(Lit(Concept("A", x), False)) == "!A(x)"
    assert str(Lit(Eq(x, y), False)) == "x != y"


def test_constraint_contradiction():
    assert Constraint((Lit(Eq(x, x), False),)).is_contradictory()
    assert not Constraint((Lit(Eq(x, x)),)).simplified().lits
