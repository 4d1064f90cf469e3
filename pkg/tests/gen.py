"""Random instance generators shared by the test modules."""

from __future__ import annotations

import random
from importlib import resources
from typing import Sequence

from oreach.logic import Concept, Constraint, Eq, Ind, Lit, Role, Signature, Term, Var
from oreach.ontology import (
    ConceptAssertion,
    ConceptInclusion,
    Conj,
    EqualityAssertion,
    Exists,
    Ontology,
    RoleAssertion,
    RoleExpr,
    RoleInclusion,
)
from oreach.parsing import parse_formula, parse_onto, parse_sas
from oreach.sas import ArtifactSystem, CaseFunction, OPartition, Transition


def corpus_text(name: str) -> str:
    return resources.files("oreach").joinpath("corpus", name).read_text(encoding="utf-8")


def corpus_path(name: str) -> str:
    return str(resources.files("oreach").joinpath("corpus", name))


def hiring(sas: str = "hiring.sas", unsafe: str = "hiring.unsafe"):
    O = parse_onto(corpus_text("hiring.onto"), source="hiring.onto")
    S = parse_sas(corpus_text(sas), O, source=sas)
    nu = parse_formula(corpus_text(unsafe), [x.name for x in S.vars])
    return O, S, nu


def random_role(rng: random.Random, roles: Sequence[str]) -> RoleExpr:
    return RoleExpr(rng.choice(roles), rng.random() < 0.3)


def random_axiom(rng: random.Random, concepts: Sequence[str], roles: Sequence[str]):
    kind = rng.random() if roles else 0.0
    neg = rng.random() < 0.3
    if kind < 0.45:
        lhs = Conj(tuple(rng.sample(list(concepts), rng.randint(1, min(2, len(concepts))))))
        return ConceptInclusion(lhs, rng.choice(concepts), neg)
    if kind < 0.85:
        filler = rng.choice(concepts) if rng.random() < 0.4 else None
        return ConceptInclusion(Exists(random_role(rng, roles), filler), rng.choice(concepts), neg)
    return RoleInclusion(random_role(rng, roles), random_role(rng, roles), neg)


def random_assertion(rng: random.Random, concepts, roles, inds):
    r = rng.random()
    pos = rng.random() < 0.7
    if r < 0.55 or not roles:
        return ConceptAssertion(rng.choice(concepts), rng.choice(inds), pos)
    if r < 0.85:
        return RoleAssertion(rng.choice(roles), rng.choice(inds), rng.choice(inds), pos)
    a, b = rng.choice(inds), rng.choice(inds)
    return EqualityAssertion(a, b, pos)


def random_ontology(
    rng: random.Random,
    concepts=("A", "B", "C"),
    roles=("r",),
    inds=("a", "b"),
    n_axioms: int = 4,
    n_assertions: int = 2,
) -> Ontology:
    tbox = tuple(random_axiom(rng, concepts, roles) for _ in range(rng.randint(0, n_axioms)))
    abox = tuple(random_assertion(rng, concepts, roles, inds) for _ in range(rng.randint(0, n_assertions))) if inds else ()
    return Ontology(tbox, abox, Signature(frozenset(concepts), frozenset(roles), frozenset(inds)))


def random_literal(rng: random.Random, terms: Sequence[Term], concepts, roles) -> Lit:
    r = rng.random()
    pos = rng.random() < 0.6
    if r < 0.5 or (not roles and r < 0.75):
        return Lit(Concept(rng.choice(concepts), rng.choice(terms)), pos)
    if r < 0.75:
        return Lit(Role(rng.choice(roles), rng.choice(terms), rng.choice(terms)), pos)
    a, b = rng.sample(list(terms), 2) if len(terms) > 1 else (terms[0], terms[0])
    return Lit(Eq(a, b), pos)


def random_constraint(rng: random.Random, terms, concepts, roles, size: int) -> Constraint:
    return Constraint(tuple(random_literal(rng, terms, concepts, roles) for _ in range(size)))


def vars_(*names: str) -> tuple[Var, ...]:
    return tuple(Var(n) for n in names)


def inds_(*names: str) -> tuple[Ind, ...]:
    return tuple(Ind(n) for n in names)


def random_formula(rng: random.Random, terms, concepts, roles, depth: int = 2):
    from oreach.logic import conj, disj, neg

    if depth == 0 or rng.random() < 0.3:
        return random_literal(rng, terms, concepts, roles).to_formula()
    kids = [random_formula(rng, terms, concepts, roles, depth - 1) for _ in range(rng.randint(2, 3))]
    f = conj(*kids) if rng.random() < 0.5 else disj(*kids)
    return neg(f) if rng.random() < 0.2 else f


def qe_contract(T, delta, kept, consts, dropped, psi, signature=None, max_len: int = 3):
    """Check ``psi`` against ``exists dropped. delta``: returns (sound, failing cubes).

    Strength is clause entailment for every clause of length <= ``max_len`` over
    the target vocabulary. Given soundness it is enough to show that every cube
    of at most ``max_len`` target literals consistent with ``psi`` is consistent
    with ``delta``; cubes true in a model of ``delta`` are covered in bulk.
    """
    from itertools import combinations

    from oreach.cover import TargetVocabulary
    from oreach.grounding import GroundSolver
    from oreach.logic import neg, sig_of

    sig = T.signature() | sig_of(delta) | sig_of(psi) | (signature or Signature())
    consts = sorted(set(consts) | {Ind(n) for n in sig.individuals}, key=lambda t: t.name)
    gs = GroundSolver(T, tuple(consts) + tuple(kept) + tuple(dropped), sig)
    enc = gs.encoding
    d = gs.encode(delta.to_formula() if hasattr(delta, "to_formula") else delta)
    p = gs.encode(psi)
    if gs.solve([d, gs.encode(neg(psi))]):
        return False, []
    voc = TargetVocabulary(tuple(kept), tuple(consts), Signature(sig.concepts, sig.roles))
    lits = sorted({s * enc.var(a) for a in voc.atoms() for s in (1, -1)}, key=lambda l: (abs(l), l))
    covered: set[tuple[int, ...]] = set()
    unsat: set[tuple[int, ...]] = set()
    failures = []
    for k in range(1, max_len + 1):
        for cube in combinations(lits, k):
            if cube in covered or len({abs(l) for l in cube}) < k:
                continue
            if any(sub in unsat for j in range(1, k) for sub in combinations(cube, j)):
                continue
            if gs.solve([d, *cube]):
                m = gs.solver.model
                true = [l for l in lits if (m[abs(l)] == 1) == (l > 0)]
                for j in range(1, max_len + 1):
                    covered.update(combinations(true, j))
            else:
                unsat.add(cube)
                if gs.solve([p, *cube]):
                    failures.append(cube)
    return True, failures


# A equals B and D is empty, so {A(t), !A(t), D(s)} and {A(t), !B(t)} are partitions.
CASE_ONTO = Ontology(
    (
        ConceptInclusion(Conj(("A",)), "B"),
        ConceptInclusion(Conj(("B",)), "A"),
        ConceptInclusion(Conj(("D",)), "D", True),
    ),
    (),
    Signature(frozenset({"A", "B", "D"}), frozenset(), frozenset({"a"})),
)


def random_partition(rng: random.Random, terms, k: int) -> OPartition:
    t = rng.choice(terms)
    s = rng.choice([u for u in terms if u != t] or terms)
    if k == 2:
        options = [
            (Lit(Concept("A", t)), Lit(Concept("A", t), False)),
            (Lit(Concept("A", t)), Lit(Concept("B", t), False)),
            (Lit(Eq(t, s)), Lit(Eq(t, s), False)),
        ]
        if t == s:
            options.pop()
    else:
        options = [
            (Lit(Concept("A", t)), Lit(Concept("A", t), False), Lit(Concept("D", s))),
            (Lit(Concept("B", t), False), Lit(Concept("D", s)), Lit(Concept("A", t))),
        ]
    lits = list(rng.choice(options))
    rng.shuffle(lits)
    return OPartition(tuple(lits))


def random_case_system(rng: random.Random, idx: int) -> ArtifactSystem:
    xs = tuple(Var(f"x{i}") for i in range(rng.randint(1, 2)))
    a = Ind("a")
    transitions = []
    n_case = 0
    for j in range(rng.randint(1, 2)):
        params = tuple(Var(f"y{j}_{i}") for i in range(rng.randint(0, 1)))
        scope = list(xs) + list(params) + [a]
        guard = random_constraint(rng, scope, ["A", "B"], [], rng.randint(0, 1))
        updates = []
        for x in xs:
            if n_case < 2 and rng.random() < 0.6:
                k = rng.randint(2, 3)
                part = random_partition(rng, scope, k)
                updates.append((x, CaseFunction(f"F{idx}_{n_case}", part, tuple(rng.choice(scope) for _ in range(k)))))
                n_case += 1
            else:
                updates.append((x, rng.choice(scope)))
        transitions.append(Transition(f"t{j}", params, guard, tuple(updates)))
    if n_case == 0:
        t = transitions[0]
        part = random_partition(rng, list(xs) + list(t.params) + [a], 2)
        ups = list(t.updates)
        ups[0] = (xs[0], CaseFunction(f"F{idx}_0", part, (a, xs[0])))
        transitions[0] = Transition(t.name, t.params, t.guard, tuple(ups))
    return ArtifactSystem(CASE_ONTO, xs, tuple((x, a) for x in xs), tuple(transitions))
