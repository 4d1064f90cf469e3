import random

from oreach.grounding import GroundSolver, eliminate_equalities, entails, sat_qff
from oreach.logic import Concept, Eq, Ind, Var, conj, neg
from oreach.ontology import standard_translate
from oreach.oracle import check_model, oracle_sat
from oreach.parsing import parse_formula, parse_onto

import gen

x, y = Var("x"), Var("y")


def T_of(text):
    return standard_translate(parse_onto(text))


def test_no_unique_name_assumption():
    T = T_of("A(a)\nnot A(b)")
    assert sat_qff(T, Eq(Ind("a"), Ind("c"))).satisfiable
    assert not sat_qff(T, Eq(Ind("a"), Ind("b"))).satisfiable


def test_disjointness_through_roles():
    T = T_of("exists r <= A\nexists r- <= B\nA <= not B")
    assert sat_qff(T, parse_formula("r(x, y)")).satisfiable
    assert not sat_qff(T, parse_formula("r(x, y) & x = y")).satisfiable


def test_equality_elimination_keeps_aliases():
    f, aliases = eliminate_equalities(conj(Eq(x, y), Concept("A", x)))
    assert f == Concept("A", y) or f == Concept("A", x)
    assert len(aliases) == 1


def test_entailment_examples():
    O, _, _ = gen.hiring()
    T = standard_translate(O)
    assert entails(T, parse_formula("EligibleUser(x)"), parse_formula("Graduate(x) & User(x)"))
    assert entails(T, parse_formula("suitableFor(x, y)"), parse_formula("JobPosition(y) & !User(y)"))
    assert not entails(T, parse_formula("User(x)"), parse_formula("EligibleUser(x)"))


def test_witness_is_a_model():
    T = T_of("A <= B\nexists r.B <= C\nA(a)")
    v = sat_qff(T, parse_formula("r(x, a) & !C(y)", individuals=["a"]))
    assert v.satisfiable
    assert v.witness[Concept("C", x)] if Concept("C", x) in v.witness else True


def test_agrees_with_oracle_on_random_instances():
    rng = random.Random(11)
    for _ in range(150):
        O = gen.random_ontology(rng)
        T = standard_translate(O)
        phi = gen.random_formula(rng, gen.vars_("x", "y") + gen.inds_("a"), ["A", "B", "C"], ["r"])
        assert sat_qff(T, phi).satisfiable == (oracle_sat(T, phi) is not None)
        m = oracle_sat(T, phi)
        if m is not None:
            assert check_model(m.interpretation, T)
            assert m.interpretation.holds(phi, m.assignment)


def test_incremental_solver_reuse():
    T = T_of("A <= not B")
    gs = GroundSolver(T, (x, y), None)
    assert gs.is_sat(Concept("A", x))
    assert not gs.is_sat(conj(Concept("A", x), Concept("B", x)))
    assert gs.entails(conj(Concept("A", x), Eq(x, y)), neg(Concept("B", y)))
    assert gs.queries == 3


def test_dimacs_dump(tmp_path):
    p = tmp_path / "q.cnf"
    sat_qff(T_of("A <= B"), parse_formula("A(x) & !B(x)"), dimacs_path=str(p))
    assert p.read_text().startswith("p cnf")


def test_instance_count_for_the_hiring_ontology():
    from oreach.grounding import GroundingDomain, ground

    O, _, _ = gen.hiring()
    T = standard_translate(O)
    D = GroundingDomain.for_query(T)
    assert len(D) == 5
    unary = sum(1 for c in T.clauses if len(c.variables) == 1)
    assert (unary, len(T.clauses) - unary) == (7, 5)
    assert ground(T, D).instance_count == 7 * 5 + 5 * 25 == 160
