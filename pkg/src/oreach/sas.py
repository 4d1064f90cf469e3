"""Simple artifact systems over an ontology: transitions, case-defined updates, preimages."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import ValidationError
from .logic import (
    Constraint,
    Eq,
    Formula,
    Ind,
    Lit,
    Signature,
    Term,
    Var,
    conj,
    free_vars,
    individuals_of,
    neg,
    sig_of,
    substitute,
    term_key,
    to_dnf,
)
from .ontology import Ontology, SourceSpan, UniversalTheory, standard_translate


@dataclass(frozen=True)
class OPartition:
    lits: tuple[Lit, ...]

    def __str__(self) -> str:
        return " | ".join(str(l) for l in self.lits)


@dataclass(frozen=True)
class CaseFunction:
    symbol: str
    partition: OPartition
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.partition.lits):
            raise ValueError(f"case function {self.symbol}: {len(self.terms)} terms for {len(self.partition.lits)} branches")

    @property
    def branches(self) -> list[tuple[Lit, Term]]:
        return list(zip(self.partition.lits, self.terms))

    def __str__(self) -> str:
        return "case { " + " | ".join(f"{l} -> {t}" for l, t in self.branches) + " }"


Update = Union[Var, Ind, CaseFunction]


@dataclass(frozen=True)
class Transition:
    name: str
    params: tuple[Var, ...]
    guard: Constraint
    # one entry per artifact variable, in the system's variable order
    updates: tuple[tuple[Var, Update], ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def update_of(self, x: Var) -> Update:
        for v, u in self.updates:
            if v == x:
                return u
        return x

    @property
    def is_case_free(self) -> bool:
        return not any(isinstance(u, CaseFunction) for _, u in self.updates)

    def case_functions(self) -> list[CaseFunction]:
        return [u for _, u in self.updates if isinstance(u, CaseFunction)]

    def renamed(self, sigma: Mapping[Var, Var]) -> "Transition":
        """Rename parameters (never artifact variables)."""

        def upd(u: Update) -> Update:
            if isinstance(u, CaseFunction):
                part = OPartition(tuple(substitute(l, sigma) for l in u.partition.lits))
                return CaseFunction(u.symbol, part, tuple(sigma.get(t, t) if isinstance(t, Var) else t for t in u.terms))
            return sigma.get(u, u) if isinstance(u, Var) else u

        return Transition(
            self.name,
            tuple(sigma.get(p, p) for p in self.params),
            Constraint(tuple(substitute(l, sigma) for l in self.guard)),
            tuple((v, upd(u)) for v, u in self.updates),
            self.span,
        )


@dataclass(frozen=True)
class ArtifactSystem:
    ontology: Ontology
    vars: tuple[Var, ...]
    init: tuple[tuple[Var, Ind], ...]
    transitions: tuple[Transition, ...]
    # individuals declared by the system itself on top of those of the ontology
    consts: tuple[str, ...] = ()

    def theory(self) -> UniversalTheory:
        return standard_translate(self.ontology)

    def init_formula(self) -> Formula:
        return Constraint(tuple(Lit(Eq(x, a)) for x, a in self.init)).to_formula()

    def constants(self) -> tuple[Ind, ...]:
        names = set(self.ontology.signature().individuals) | set(self.consts)
        names |= {a.name for _, a in self.init}
        for t in self.transitions:
            names |= {i.name for i in individuals_of(t.guard)}
            for _, u in t.updates:
                if isinstance(u, Ind):
                    names.add(u.name)
                elif isinstance(u, CaseFunction):
                    names |= {i.name for i in individuals_of(Constraint(u.partition.lits))}
                    names |= {x.name for x in u.terms if isinstance(x, Ind)}
        return tuple(Ind(n) for n in sorted(names))

    def signature(self) -> Signature:
        sig = self.ontology.signature()
        for t in self.transitions:
            sig = sig | sig_of(t.guard)
            for cf in t.case_functions():
                sig = sig | sig_of(Constraint(cf.partition.lits))
        return sig | Signature(frozenset(), frozenset(), frozenset(c.name for c in self.constants()))

    def transition(self, name: str) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def max_params(self) -> int:
        return max((len(t.params) for t in self.transitions), default=0)


def check_system(S: ArtifactSystem) -> list[str]:
    """Structural diagnostics (scoping and totality); semantic partition checks are separate."""
    diags: list[str] = []
    xs = set(S.vars)
    if len(xs) != len(S.vars):
        diags.append("duplicate artifact variable")
    init_vars = [x for x, _ in S.init]
    if sorted(init_vars, key=term_key) != sorted(S.vars, key=term_key):
        diags.append("init must assign every artifact variable exactly once")
    seen = set()
    for t in S.transitions:
        if t.name in seen:
            diags.append(f"duplicate transition name {t.name!r}")
        seen.add(t.name)
        scope = xs | set(t.params)
        if set(t.params) & xs:
            diags.append(f"{t.name}: parameter shadows an artifact variable")
        if [v for v, _ in t.updates] != list(S.vars):
            diags.append(f"{t.name}: updates must list every artifact variable in order")
        stray = free_vars(t.guard) - scope
        for cf in t.case_functions():
            stray |= free_vars(Constraint(cf.partition.lits)) - scope
            stray |= {x for x in cf.terms if isinstance(x, Var)} - scope
        stray |= {u for _, u in t.updates if isinstance(u, Var)} - scope
        for v in sorted(stray, key=term_key):
            diags.append(f"{t.name}: unbound variable {v}")
    return diags


# --- O-partitions and case elimination ---------------------------------------


def validate_partition(T: UniversalTheory, P: OPartition) -> tuple[bool, list[str]]:
    from .grounding import sat_qff

    diags = []
    if not P.lits:
        return False, ["empty partition"]
    if sat_qff(T, conj(*(neg(l.to_formula()) for l in P.lits))).satisfiable:
        diags.append(f"not exhaustive: {P}")
    for a, b in combinations(P.lits, 2):
        if sat_qff(T, conj(a.to_formula(), b.to_formula())).satisfiable:
            diags.append(f"overlapping branches: {a} and {b}")
    return not diags, diags


def eliminate_case_functions(S: ArtifactSystem, T: Optional[UniversalTheory] = None, check: bool = True) -> ArtifactSystem:
    """Expand every transition into one transition per combination of case branches."""
    if all(t.is_case_free for t in S.transitions):
        return S
    T = T if T is not None else S.theory()
    if check:
        done = set()
        for t in S.transitions:
            for cf in t.case_functions():
                if cf.partition in done:
                    continue
                ok, diags = validate_partition(T, cf.partition)
                if not ok:
                    raise ValidationError(f"{t.name}: invalid partition for {cf.symbol}", diags)
                done.add(cf.partition)
    out: list[Transition] = []
    for t in S.transitions:
        if t.is_case_free:
            out.append(t)
            continue
        options = []
        for v, u in t.updates:
            if isinstance(u, CaseFunction):
                options.append([(v, l, term) for l, term in u.branches])
            else:
                options.append([(v, None, u)])
        k = 0
        for combo in product(*options):
            extra = tuple(l for _, l, _ in combo if l is not None)
            guard = Constraint(t.guard.lits + extra)
            if guard.is_contradictory():
                continue
            k += 1
            out.append(Transition(f"{t.name}.{k}", t.params, guard, tuple((v, term) for v, _, term in combo), t.span))
    return ArtifactSystem(S.ontology, S.vars, S.init, tuple(out), S.consts)


def system_size(S: ArtifactSystem) -> int:
    """Symbol count: variables, init pairs, guard literals, update terms and case branches."""
    n = len(S.vars) + len(S.init)
    for t in S.transitions:
        n += 1 + len(t.params) + len(t.guard)
        for _, u in t.updates:
            n += 2 * len(u.terms) if isinstance(u, CaseFunction) else 1
    return n


# --- preimages and the unsafe-trace formula ------------------------------------


def preimage(t: Transition, phi: Formula) -> tuple[list[Constraint], tuple[Var, ...]]:
    """DNF of ``guard & phi[x := update(x)]``; the parameters are left to be eliminated.

    Updates are functional, so inlining them is equivalent to conjoining
    ``x' = t`` and eliminating the primed copies.
    """
    if not t.is_case_free:
        raise ValueError(f"{t.name}: eliminate case functions before taking preimages")
    sigma = {v: u for v, u in t.updates if u != v}
    body = conj(t.guard.to_formula(), substitute(phi, sigma))
    return to_dnf(body), t.params


def step_name(v: Var, h: int) -> Var:
    return Var(f"{v.name}@{h}")


def build_unsafe_formula(S: ArtifactSystem, nu: Formula, js: Sequence[int]) -> Formula:
    """``init(x0) & tau_j0(x0, x1) & ... & nu(xk)`` with parameters as fresh variables."""
    parts: list[Formula] = [substitute(S.init_formula(), {x: step_name(x, 0) for x in S.vars})]
    for h, j in enumerate(js):
        t = S.transitions[j]
        if not t.is_case_free:
            raise ValueError(f"{t.name}: eliminate case functions first")
        sigma: dict[Var, Term] = {x: step_name(x, h) for x in S.vars}
        sigma.update({y: step_name(y, h) for y in t.params})
        parts.append(substitute(t.guard.to_formula(), sigma))
        for x, u in t.updates:
            rhs = sigma.get(u, u) if isinstance(u, Var) else u
            parts.append(Eq(step_name(x, h + 1), rhs))
    parts.append(substitute(nu, {x: step_name(x, len(js)) for x in S.vars}))
    return conj(*parts)


def identity_updates(vars: Iterable[Var], given: Mapping[Var, Update]) -> tuple[tuple[Var, Update], ...]:
    return tuple((x, given.get(x, x)) for x in vars)
