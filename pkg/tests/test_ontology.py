from oreach.logic import Concept, Ind, Lit, Role
from oreach.ontology import (
    ConceptAssertion,
    ConceptInclusion,
    Conj,
    Exists,
    Ontology,
    RoleExpr,
    RoleInclusion,
    X,
    Y,
    standard_translate,
    undefined_value_closure,
    validate,
)
from oreach.parsing import parse_onto

import gen


def clause_of(text):
    return standard_translate(parse_onto(text)).clauses[0]


def test_shapes_of_the_translation():
    c = clause_of("AcademicPosition <= JobPosition")
    assert (c.shape, c.body, c.head) == (1, (Concept("AcademicPosition", X),), Lit(Concept("JobPosition", X)))
    c = clause_of("exists appliesFor- <= JobPosition")
    assert (c.shape, c.body) == (2, (Role("appliesFor", Y, X),))
    c = clause_of("exists r.B <= not A")
    assert (c.shape, c.body, c.head) == (3, (Role("r", X, Y), Concept("B", Y)), Lit(Concept("A", X), False))
    assert clause_of("r <= s-").shape == 4
    assert clause_of("role r, s\nr <= not s").shape == 5


def test_conjunction_stays_n_ary():
    c = clause_of("A & B & C <= D")
    assert len(c.body) == 3


def test_one_clause_per_axiom_and_literal_per_assertion():
    O, _, _ = gen.hiring()
    T = standard_translate(O)
    assert len(T.clauses) == len(O.tbox) == 12
    assert len(T.ground) == len(O.abox)
    assert Lit(Concept("AcademicPosition", Ind("professor123"))) in T.ground


def test_undefined_closure_is_idempotent():
    O = Ontology((ConceptInclusion(Exists(RoleExpr("r")), "A"),), (ConceptAssertion("A", "a"),))
    once = undefined_value_closure(O, "u")
    assert undefined_value_closure(once, "u") == once
    facts = {str(a) for a in once.abox}
    assert {"not A(u)", "not r(u, a)", "not r(a, u)", "not r(u, u)"} <= facts


def test_shipped_ontology_is_closed_for_u():
    O, _, _ = gen.hiring()
    assert undefined_value_closure(O, "u").abox == O.abox


def test_validate_flags_kind_clashes():
    O = Ontology((ConceptInclusion(Conj(("A",)), "B"), RoleInclusion(RoleExpr("A"), RoleExpr("r"))))
    assert any("more than one kind" in d for d in validate(O))
    assert validate(parse_onto("A <= B\nA(a)")) == []


def test_translation_lines_render():
    lines = standard_translate(parse_onto("A & B <= not C\nA(a)")).lines()
    assert lines == ["forall x (A(x) & B(x) -> !C(x))", "A(a)"]
