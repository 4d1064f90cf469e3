import pytest

from oreach.breach import Breach, breach
from oreach.errors import InconclusiveError
from oreach.oracle import check_model, step_successors
from oreach.parsing import parse_formula

import gen


def test_original_system_is_safe():
    O, S, nu = gen.hiring()
    v = breach(S, nu)
    assert v.safe and v.trace is None
    assert v.iterations == 3
    assert v.stats["checks"]["stability"] == 1


def test_weakened_system_is_unsafe_with_replayable_witness():
    O, S, nu = gen.hiring("hiring_weak.sas")
    v = breach(S, nu)
    assert v.status == "unsafe"
    assert v.trace.transitions == ("tau1", "tau2", "tau3", "tau4")
    w = v.trace.witness
    I = w.interpretation
    assert check_model(I, S.theory())
    names = [x.name for x in S.vars]
    states = [tuple(s.values[n] for n in names) for s in w.steps]
    for a, b in zip(states, states[1:]):
        assert b in step_successors(S, I, a)
    last = dict(zip(S.vars, states[-1]))
    assert I.holds(nu, last)


def test_initial_state_already_bad():
    O, S, _ = gen.hiring()
    v = breach(S, parse_formula("x_applicant = u", [x.name for x in S.vars]))
    assert v.status == "unsafe" and v.iterations == 0 and v.trace.transitions == ()


def test_unreachable_by_theory_is_safe_immediately():
    O, S, _ = gen.hiring()
    v = breach(S, parse_formula("User(x_job) & JobPosition(x_job)", [x.name for x in S.vars]))
    assert v.safe and v.iterations == 0


def test_iteration_limit():
    O, S, nu = gen.hiring("hiring_weak.sas")
    with pytest.raises(InconclusiveError) as e:
        Breach(S, nu, max_iters=2).run()
    assert e.value.iterations == 2


def test_frames_record_provenance():
    O, S, nu = gen.hiring("hiring_weak.sas")
    v = breach(S, nu)
    for f in v.frames[1:]:
        for d in f.disjuncts:
            assert d.transition is not None and d.parent is not None


def test_rejects_stray_variables():
    O, S, _ = gen.hiring()
    with pytest.raises(ValueError):
        Breach(S, parse_formula("User(q)", ["q"]))
