import pytest

from oreach.errors import ValidationError
from oreach.grounding import sat_qff
from oreach.logic import Concept, Eq, Ind, Lit, Var, free_vars
from oreach.ontology import standard_translate
from oreach.parsing import parse_formula, parse_onto, parse_sas
from oreach.sas import (
    OPartition,
    build_unsafe_formula,
    check_system,
    eliminate_case_functions,
    preimage,
    step_name,
    system_size,
    validate_partition,
)

import gen

x = Var("x")

ONTO = parse_onto("concept A, B\nA <= not B\nindividual a, u")

CASE_SAS = """
vars x
init x := u
transition t params y : guard A(y) ==> x := case { A(x) -> a | not A(x) -> y }
"""


def test_partitions():
    T = standard_translate(ONTO)
    ok, _ = validate_partition(T, OPartition((Lit(Concept("A", x)), Lit(Concept("A", x), False))))
    assert ok
    ok, diags = validate_partition(T, OPartition((Lit(Concept("A", x)), Lit(Concept("B", x)))))
    assert not ok and any("exhaustive" in d for d in diags)
    ok, diags = validate_partition(T, OPartition((Lit(Concept("A", x)), Lit(Concept("A", x), False), Lit(Eq(x, Ind("a"))))))
    assert not ok and any("overlapping" in d for d in diags)


def test_case_elimination_expands_branches():
    S = parse_sas(CASE_SAS, ONTO)
    S2 = eliminate_case_functions(S)
    assert [t.name for t in S2.transitions] == ["t.1", "t.2"]
    assert all(t.is_case_free for t in S2.transitions)
    assert str(S2.transitions[0].guard) == "A(y) & A(x)"
    assert S2.transitions[1].update_of(Var("x")) == Var("y")
    assert system_size(S2) <= system_size(S) ** 2


def test_case_elimination_rejects_bad_partitions():
    S = parse_sas(CASE_SAS.replace("not A(x)", "B(x)"), ONTO)
    with pytest.raises(ValidationError):
        eliminate_case_functions(S)


def test_preimage_inlines_updates():
    S = parse_sas("vars x, z\ninit x := u, z := u\ntransition t params y : guard A(y) ==> x := y", ONTO)
    t = S.transitions[0]
    cs, params = preimage(t, parse_formula("B(x) & A(z)", ["x", "z"]))
    assert params == (Var("y"),)
    assert [str(c) for c in cs] == ["A(y) & B(y) & A(z)"]


def test_preimage_distributes_over_disjunction():
    S = parse_sas("vars x\ninit x := u\ntransition t : guard A(x) ==> x := x", ONTO)
    cs, _ = preimage(S.transitions[0], parse_formula("B(x) | x = a", ["x"], ["a"]))
    assert len(cs) == 2


def test_unsafe_formula_is_stepwise():
    O, S, nu = gen.hiring("hiring_weak.sas")
    f = build_unsafe_formula(S, nu, [0, 1, 2, 3])
    assert step_name(Var("x_winner"), 4) in free_vars(f)
    assert sat_qff(S.theory(), f).satisfiable
    assert not sat_qff(S.theory(), build_unsafe_formula(S, nu, [0, 1, 2])).satisfiable


def test_structural_diagnostics():
    S = parse_sas("vars x\ninit x := u\ntransition t : guard A(x) ==> x := x", ONTO)
    assert check_system(S) == []
    bad = S.__class__(S.ontology, S.vars, (), S.transitions)
    assert check_system(bad)
