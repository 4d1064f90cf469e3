import random

import pytest

from oreach.errors import ParseError
from oreach.logic import Concept, Ind, Role, Var, atoms_of
from oreach.ontology import ConceptInclusion, Conj, Exists, RoleExpr
from oreach.parsing import parse_formula, parse_onto, parse_sas, print_onto, print_sas
from oreach.sas import CaseFunction

import gen


def test_concept_inclusions():
    ax = parse_onto("AcademicPosition <= JobPosition").tbox[0]
    assert ax == ConceptInclusion(Conj(("AcademicPosition",)), "JobPosition")
    ax = parse_onto("exists appliesFor- <= JobPosition").tbox[0]
    assert ax.lhs == Exists(RoleExpr("appliesFor", True))


def test_case_update():
    O = parse_onto("concept A\nindividual a, u")
    S = parse_sas("vars x\ninit x := u\ntransition t : guard true ==> x := case { A(x) -> a | not A(x) -> x }", O)
    u = S.transitions[0].update_of(Var("x"))
    assert isinstance(u, CaseFunction)
    assert [str(l) for l, _ in u.branches] == ["A(x)", "!A(x)"]
    assert [t for _, t in u.branches] == [Ind("a"), Var("x")]


def test_omitted_updates_are_identity():
    O, S, _ = gen.hiring()
    t = S.transition("tau1")
    assert t.update_of(Var("x_job")) == Var("x_job")
    assert len(t.updates) == len(S.vars)


def test_formula_syntax():
    f = parse_formula("!(A(x) | r(x, a)) & x != y", ["x", "y"])
    assert Concept("A", Var("x")) in set(atoms_of(f))
    g = parse_formula("r(x, a)", ["x"])
    assert g == Role("r", Var("x"), Ind("a"))


@pytest.mark.parametrize(
    "text, line",
    [("A <= B\nA <= <=", 2), ("A(a\n", 1), ("\n\nexists <= A", 3)],
)
def test_onto_errors_are_positioned(text, line):
    with pytest.raises(ParseError) as e:
        parse_onto(text, source="t.onto")
    assert e.value.line == line
    assert str(e.value).startswith(f"t.onto:{line}:")


def test_sas_rejects_unknown_names():
    O = parse_onto("concept A\nindividual u")
    with pytest.raises(ParseError):
        parse_sas("vars x\ninit x := u\ntransition t : guard Nope(x) ==> x := x", O)
    with pytest.raises(ParseError):
        parse_sas("vars x\ninit x := u\ntransition t : guard A(z) ==> x := x", O)


def test_nested_case_rejected():
    O = parse_onto("concept A\nindividual a, u")
    text = "vars x\ninit x := u\ntransition t : guard true ==> x := case { A(x) -> case { A(x) -> a } | not A(x) -> x }"
    with pytest.raises(ParseError):
        parse_sas(text, O)


def test_ontology_round_trip():
    rng = random.Random(3)
    for _ in range(200):
        O = gen.random_ontology(rng, n_axioms=6, n_assertions=4)
        again = parse_onto(print_onto(O))
        assert again.tbox == O.tbox
        assert again.abox == O.abox
        assert again.signature() == O.signature()


def test_corpus_round_trip():
    for name in ("hiring.sas", "hiring_weak.sas", "hiring_case.sas"):
        O, S, _ = gen.hiring(name)
        S2 = parse_sas(print_sas(S), O)
        assert print_sas(S2) == print_sas(S)
        assert S2.vars == S.vars and S2.init == S.init
        assert [t.guard for t in S2.transitions] == [t.guard for t in S.transitions]


def test_random_system_round_trip():
    rng = random.Random(9)
    for idx in range(100):
        S = gen.random_case_system(rng, idx)
        S2 = parse_sas(print_sas(S), S.ontology)
        assert print_sas(S2) == print_sas(S)
        for t1, t2 in zip(S.transitions, S2.transitions):
            assert (t1.name, t1.params, t1.guard) == (t2.name, t2.params, t2.guard)
            for (_, u1), (_, u2) in zip(t1.updates, t2.updates):
                if isinstance(u1, CaseFunction):
                    assert u1.branches == u2.branches
                else:
                    assert u1 == u2
