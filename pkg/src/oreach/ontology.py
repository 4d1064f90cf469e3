"""RDFS+ ontologies and their translation into a universal first-order theory."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .logic import (
    Clause,
    Concept,
    Eq,
    Ind,
    Lit,
    Role,
    Signature,
    Var,
    lit_key,
)

X = Var("x")
Y = Var("y")


@dataclass(frozen=True)
class SourceSpan:
    source: str
    line: int
    column: int
    end_line: int = 0
    end_column: int = 0

    def __str__(self) -> str:
        return f"{self.source}:{self.line}:{self.column}"


@dataclass(frozen=True)
class RoleExpr:
    name: str
    inverse: bool = False

    def __str__(self) -> str:
        return f"{self.name}-" if self.inverse else self.name

    def atom(self, first=X, second=Y) -> Role:
        """``R(first, second)``, swapping the arguments for an inverse role."""
        return Role(self.name, second, first) if self.inverse else Role(self.name, first, second)


@dataclass(frozen=True)
class Conj:
    names: tuple[str, ...]

    def __str__(self) -> str:
        return " & ".join(self.names)


@dataclass(frozen=True)
class Exists:
    """``exists R`` when ``filler`` is None, otherwise the qualified ``exists R.A``."""

    role: RoleExpr
    filler: Optional[str] = None

    def __str__(self) -> str:
        return f"exists {self.role}" + (f".{self.filler}" if self.filler else "")


ConceptExpr = Union[Conj, Exists]


@dataclass(frozen=True)
class ConceptInclusion:
    lhs: ConceptExpr
    rhs: str
    negated: bool = False
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.lhs} <= {'not ' if self.negated else ''}{self.rhs}"


@dataclass(frozen=True)
class RoleInclusion:
    lhs: RoleExpr
    rhs: RoleExpr
    negated: bool = False
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.lhs} <= {'not ' if self.negated else ''}{self.rhs}"


@dataclass(frozen=True)
class ConceptAssertion:
    concept: str
    individual: str
    positive: bool = True
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{'' if self.positive else 'not '}{self.concept}({self.individual})"


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    first: str
    second: str
    positive: bool = True
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{'' if self.positive else 'not '}{self.role}({self.first}, {self.second})"


@dataclass(frozen=True)
class EqualityAssertion:
    first: str
    second: str
    positive: bool = True
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.first} {'=' if self.positive else '!='} {self.second}"


Axiom = Union[ConceptInclusion, RoleInclusion]
Assertion = Union[ConceptAssertion, RoleAssertion, EqualityAssertion]


@dataclass(frozen=True)
class Ontology:
    tbox: tuple[Axiom, ...] = ()
    abox: tuple[Assertion, ...] = ()
    # names declared with `concept`/`role` lines but possibly unused elsewhere
    declared: Signature = field(default_factory=Signature)

    def signature(self) -> Signature:
        concepts, roles, inds = set(self.declared.concepts), set(self.declared.roles), set(self.declared.individuals)
        for ax in self.tbox:
            if isinstance(ax, ConceptInclusion):
                concepts.add(ax.rhs)
                if isinstance(ax.lhs, Conj):
                    concepts.update(ax.lhs.names)
                else:
                    roles.add(ax.lhs.role.name)
                    if ax.lhs.filler:
                        concepts.add(ax.lhs.filler)
            else:
                roles.update((ax.lhs.name, ax.rhs.name))
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                concepts.add(a.concept)
                inds.add(a.individual)
            elif isinstance(a, RoleAssertion):
                roles.add(a.role)
                inds.update((a.first, a.second))
            else:
                inds.update((a.first, a.second))
        return Signature(frozenset(concepts), frozenset(roles), frozenset(inds))

    @property
    def concept_inclusions(self) -> list[ConceptInclusion]:
        return [a for a in self.tbox if isinstance(a, ConceptInclusion)]

    @property
    def role_inclusions(self) -> list[RoleInclusion]:
        return [a for a in self.tbox if isinstance(a, RoleInclusion)]


# --- universal theory ---------------------------------------------------------


@dataclass(frozen=True)
class UniversalClause:
    """``forall x[, y] (body -> head)`` with a positive body; shapes 1-5 of the translation."""

    shape: int
    body: tuple[Union[Concept, Role], ...]
    head: Lit

    @property
    def variables(self) -> tuple[Var, ...]:
        return (X,) if self.shape == 1 else (X, Y)

    def as_clause(self) -> Clause:
        return Clause([Lit(a, False) for a in self.body] + [self.head])

    def __str__(self) -> str:
        qs = ", ".join(v.name for v in self.variables)
        return f"forall {qs} ({' & '.join(str(a) for a in self.body)} -> {self.head})"


@dataclass(frozen=True)
class UniversalTheory:
    clauses: tuple[UniversalClause, ...] = ()
    ground: tuple[Lit, ...] = ()
    # symbols of the source ontology, kept so that unused declarations survive translation
    declared: Signature = field(default_factory=Signature)

    def signature(self) -> Signature:
        concepts, roles, inds = set(self.declared.concepts), set(self.declared.roles), set(self.declared.individuals)
        for c in self.clauses:
            for a in c.body + (c.head.atom,):
                if isinstance(a, Concept):
                    concepts.add(a.pred)
                else:
                    roles.add(a.pred)
        for l in self.ground:
            a = l.atom
            if isinstance(a, Concept):
                concepts.add(a.pred)
            elif isinstance(a, Role):
                roles.add(a.pred)
            inds.update(t.name for t in a.terms())
        return Signature(frozenset(concepts), frozenset(roles), frozenset(inds))

    @property
    def individuals(self) -> list[Ind]:
        return [Ind(n) for n in sorted(self.signature().individuals)]

    def lines(self) -> list[str]:
        return [str(c) for c in self.clauses] + [str(l) for l in self.ground]


EMPTY_THEORY = UniversalTheory()


# --- operations ---------------------------------------------------------------


def validate(onto: Ontology) -> list[str]:
    """Well-formedness diagnostics; an empty list means the ontology is RDFS+."""
    diags: list[str] = []
    sig = onto.signature()
    clash = (sig.concepts & sig.roles) | ((sig.concepts | sig.roles) & sig.individuals)
    for name in sorted(clash):
        diags.append(f"name {name!r} is used with more than one kind")
    for ax in onto.tbox:
        where = f" ({ax.span})" if ax.span else ""
        if isinstance(ax, ConceptInclusion):
            if not isinstance(ax.rhs, str):
                diags.append(f"rhs must be a concept name: {ax}{where}")
            if isinstance(ax.lhs, Conj) and not ax.lhs.names:
                diags.append(f"empty conjunction on lhs{where}")
            if not isinstance(ax.lhs, (Conj, Exists)):
                diags.append(f"lhs is not an RDFS+ concept: {ax.lhs!r}{where}")
        elif isinstance(ax, RoleInclusion):
            if not isinstance(ax.lhs, RoleExpr) or not isinstance(ax.rhs, RoleExpr):
                diags.append(f"role inclusion sides must be roles: {ax}{where}")
        else:
            diags.append(f"not a TBox axiom: {ax!r}")
    for a in onto.abox:
        if not isinstance(a, (ConceptAssertion, RoleAssertion, EqualityAssertion)):
            diags.append(f"not an ABox assertion: {a!r}")
    return diags


def _translate_axiom(ax: Axiom) -> UniversalClause:
    if isinstance(ax, RoleInclusion):
        head = Lit(ax.rhs.atom(), not ax.negated)
        return UniversalClause(5 if ax.negated else 4, (ax.lhs.atom(),), head)
    head = Lit(Concept(ax.rhs, X), not ax.negated)
    lhs = ax.lhs
    if isinstance(lhs, Conj):
        return UniversalClause(1, tuple(Concept(n, X) for n in lhs.names), head)
    if lhs.filler is None:
        return UniversalClause(2, (lhs.role.atom(),), head)
    return UniversalClause(3, (lhs.role.atom(), Concept(lhs.filler, Y)), head)


def _translate_assertion(a: Assertion) -> Lit:
    if isinstance(a, ConceptAssertion):
        return Lit(Concept(a.concept, Ind(a.individual)), a.positive)
    if isinstance(a, RoleAssertion):
        return Lit(Role(a.role, Ind(a.first), Ind(a.second)), a.positive)
    return Lit(Eq(Ind(a.first), Ind(a.second)), a.positive)


def standard_translate(onto: Ontology) -> UniversalTheory:
    """One universal clause per TBox axiom, one ground literal per ABox assertion."""
    return UniversalTheory(
        tuple(_translate_axiom(ax) for ax in onto.tbox),
        tuple(_translate_assertion(a) for a in onto.abox),
        onto.signature(),
    )


def undefined_value_closure(onto: Ontology, undefined: str) -> Ontology:
    """Add ``not A(u)``, ``not P(u, a)`` and ``not P(a, u)`` for every concept
    ``A``, role ``P`` and individual ``a`` of the ontology (``u`` included)."""
    sig = onto.signature()
    inds = sorted(sig.individuals | {undefined})
    extra: list[Assertion] = [ConceptAssertion(c, undefined, False) for c in sorted(sig.concepts)]
    for p in sorted(sig.roles):
        for a in inds:
            extra.append(RoleAssertion(p, undefined, a, False))
            if a != undefined:
                extra.append(RoleAssertion(p, a, undefined, False))
    have = set(onto.abox)
    new = tuple(a for a in extra if a not in have)
    declared = Signature(onto.declared.concepts, onto.declared.roles, onto.declared.individuals | {undefined})
    return Ontology(onto.tbox, onto.abox + new, declared)


def clause_lits(c: UniversalClause) -> list[Lit]:
    return sorted(c.as_clause().lits, key=lit_key)


def theory_from_lits(ground: Iterable[Lit], clauses: Iterable[UniversalClause] = ()) -> UniversalTheory:
    return UniversalTheory(tuple(clauses), tuple(ground))
