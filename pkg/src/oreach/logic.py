"""Function-free first-order syntax: terms, atoms, literals, quantifier-free
formulas, constraints, clauses and signatures.

Terms are flat (a variable or an individual name). Case-defined update
functions are compiled away before anything in here sees them, so there is no
unification or occurs-check machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Union

from .errors import ResourceLimitError

DEFAULT_DNF_BUDGET = 10**6


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Ind:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Ind]


def term_key(t: Term) -> tuple[int, str]:
    return (0 if isinstance(t, Ind) else 1, t.name)


@dataclass(frozen=True, slots=True)
class Concept:
    pred: str
    arg: Term

    def terms(self) -> tuple[Term, ...]:
        return (self.arg,)

    def __str__(self) -> str:
        return f"{self.pred}({self.arg})"


@dataclass(frozen=True, slots=True)
class Role:
    pred: str
    left: Term
    right: Term

    def terms(self) -> tuple[Term, ...]:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"{self.pred}({self.left},{self.right})"


@dataclass(frozen=True, slots=True)
class Eq:
    """Equality atom; arguments are stored in canonical order."""

    left: Term
    right: Term

    def __post_init__(self) -> None:
        if term_key(self.right) < term_key(self.left):
            a, b = self.left, self.right
            object.__setattr__(self, "left", b)
            object.__setattr__(self, "right", a)

    def terms(self) -> tuple[Term, ...]:
        return (self.left, self.right)

    def is_trivial(self) -> bool:
        return self.left == self.right

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


Atom = Union[Concept, Role, Eq]


def atom_key(a: Atom) -> tuple:
    if isinstance(a, Eq):
        return (2, "", term_key(a.left), term_key(a.right))
    if isinstance(a, Concept):
        return (0, a.pred, term_key(a.arg))
    return (1, a.pred, term_key(a.left), term_key(a.right))


@dataclass(frozen=True, slots=True)
class Lit:
    atom: Atom
    positive: bool = True

    def __invert__(self) -> "Lit":
        return Lit(self.atom, not self.positive)

    def to_formula(self) -> "Formula":
        return self.atom if self.positive else Not(self.atom)

    def __str__(self) -> str:
        if self.positive:
            return str(self.atom)
        if isinstance(self.atom, Eq):
            return f"{self.atom.left} != {self.atom.right}"
        return f"!{self.atom}"


def lit_key(l: Lit) -> tuple:
    return (atom_key(l.atom), not l.positive)


# --- quantifier-free formulas -------------------------------------------------


@dataclass(frozen=True, slots=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, slots=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        if isinstance(self.arg, Eq):
            return f"{self.arg.left} != {self.arg.right}"
        if isinstance(self.arg, (And, Or)):
            return f"!({self.arg})"
        return f"!{self.arg}"


@dataclass(frozen=True, slots=True)
class And:
    args: tuple["Formula", ...]

    def __str__(self) -> str:
        return " & ".join(f"({a})" if isinstance(a, Or) else str(a) for a in self.args)


@dataclass(frozen=True, slots=True)
class Or:
    args: tuple["Formula", ...]

    def __str__(self) -> str:
        return " | ".join(str(a) for a in self.args)


Formula = Union[Concept, Role, Eq, Const, Not, And, Or]
ATOM_TYPES = (Concept, Role, Eq)


def conj(*parts: Formula) -> Formula:
    args: list[Formula] = []
    for p in parts:
        if isinstance(p, Const):
            if not p.value:
                return FALSE
            continue
        if isinstance(p, And):
            args.extend(p.args)
        else:
            args.append(p)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*parts: Formula) -> Formula:
    args: list[Formula] = []
    for p in parts:
        if isinstance(p, Const):
            if p.value:
                return TRUE
            continue
        if isinstance(p, Or):
            args.extend(p.args)
        else:
            args.append(p)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


# --- constraints and clauses --------------------------------------------------


def _dedupe(lits: Iterable[Lit]) -> tuple[Lit, ...]:
    seen: dict[Lit, None] = {}
    for l in lits:
        seen.setdefault(l, None)
    return tuple(seen)


@dataclass(frozen=True, slots=True)
class Constraint:
    """Conjunction of literals (duplicates removed, order kept)."""

    lits: tuple[Lit, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "lits", _dedupe(self.lits))

    def __iter__(self) -> Iterator[Lit]:
        return iter(self.lits)

    def __len__(self) -> int:
        return len(self.lits)

    def is_contradictory(self) -> bool:
        s = set(self.lits)
        for l in self.lits:
            if ~l in s:
                return True
            if isinstance(l.atom, Eq) and l.atom.is_trivial() and not l.positive:
                return True
        return False

    def simplified(self) -> "Constraint":
        """Drop trivially true literals (t = t)."""
        return Constraint(tuple(l for l in self.lits if not (isinstance(l.atom, Eq) and l.atom.is_trivial() and l.positive)))

    def to_formula(self) -> Formula:
        return conj(*(l.to_formula() for l in self.lits))

    def __str__(self) -> str:
        return " & ".join(str(l) for l in self.lits) if self.lits else "true"


@dataclass(frozen=True, slots=True, init=False)
class Clause:
    lits: frozenset[Lit]

    def __init__(self, lits: Iterable[Lit]):
        object.__setattr__(self, "lits", frozenset(lits))

    def is_tautology(self) -> bool:
        return any(~l in self.lits for l in self.lits) or any(
            isinstance(l.atom, Eq) and l.atom.is_trivial() and l.positive for l in self.lits
        )

    def sorted_lits(self) -> list[Lit]:
        return sorted(self.lits, key=lit_key)

    def to_formula(self) -> Formula:
        return disj(*(l.to_formula() for l in self.sorted_lits()))

    def __str__(self) -> str:
        return " | ".join(str(l) for l in self.sorted_lits()) if self.lits else "false"


@dataclass(frozen=True)
class Signature:
    concepts: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(self.concepts | other.concepts, self.roles | other.roles, self.individuals | other.individuals)

    def __le__(self, other: "Signature") -> bool:
        return self.concepts <= other.concepts and self.roles <= other.roles and self.individuals <= other.individuals


EMPTY_SIGNATURE = Signature()


# --- traversal ----------------------------------------------------------------


def atoms_of(obj) -> Iterator[Atom]:
    if isinstance(obj, ATOM_TYPES):
        yield obj
    elif isinstance(obj, Lit):
        yield obj.atom
    elif isinstance(obj, Const):
        return
    elif isinstance(obj, Not):
        yield from atoms_of(obj.arg)
    elif isinstance(obj, (And, Or)):
        for a in obj.args:
            yield from atoms_of(a)
    elif isinstance(obj, (Constraint, Clause)):
        for l in obj.lits:
            yield l.atom
    elif isinstance(obj, (list, tuple, frozenset, set)):
        for x in obj:
            yield from atoms_of(x)
    else:
        raise TypeError(f"not a syntax object: {obj!r}")


def terms_of(obj) -> Iterator[Term]:
    for a in atoms_of(obj):
        yield from a.terms()


def free_vars(obj) -> frozenset[Var]:
    return frozenset(t for t in terms_of(obj) if isinstance(t, Var))


def individuals_of(obj) -> frozenset[Ind]:
    return frozenset(t for t in terms_of(obj) if isinstance(t, Ind))


def sig_of(obj) -> Signature:
    """Signature of a syntax object; anything with a ``signature()`` method is delegated to it."""
    if hasattr(obj, "signature") and not isinstance(obj, (list, tuple)):
        return obj.signature()
    concepts, roles, inds = set(), set(), set()
    for a in atoms_of(obj):
        if isinstance(a, Concept):
            concepts.add(a.pred)
        elif isinstance(a, Role):
            roles.add(a.pred)
        for t in a.terms():
            if isinstance(t, Ind):
                inds.add(t.name)
    return Signature(frozenset(concepts), frozenset(roles), frozenset(inds))


# --- substitution -------------------------------------------------------------


def _sub_term(t: Term, sigma: Mapping[Var, Term]) -> Term:
    return sigma.get(t, t) if isinstance(t, Var) else t


def substitute_atom(a: Atom, sigma: Mapping[Var, Term]) -> Atom:
    if isinstance(a, Concept):
        return Concept(a.pred, _sub_term(a.arg, sigma))
    if isinstance(a, Role):
        return Role(a.pred, _sub_term(a.left, sigma), _sub_term(a.right, sigma))
    return Eq(_sub_term(a.left, sigma), _sub_term(a.right, sigma))


def substitute(obj, sigma: Mapping[Var, Term]):
    """Replace mapped variables simultaneously; unmapped variables pass through."""
    if not sigma:
        return obj
    if isinstance(obj, ATOM_TYPES):
        return substitute_atom(obj, sigma)
    if isinstance(obj, Lit):
        return Lit(substitute_atom(obj.atom, sigma), obj.positive)
    if isinstance(obj, Const):
        return obj
    if isinstance(obj, Not):
        return Not(substitute(obj.arg, sigma))
    if isinstance(obj, And):
        return And(tuple(substitute(a, sigma) for a in obj.args))
    if isinstance(obj, Or):
        return Or(tuple(substitute(a, sigma) for a in obj.args))
    if isinstance(obj, Constraint):
        return Constraint(tuple(substitute(l, sigma) for l in obj.lits))
    if isinstance(obj, Clause):
        return Clause(substitute(l, sigma) for l in obj.lits)
    raise TypeError(f"cannot substitute into {obj!r}")


# --- normal forms -------------------------------------------------------------


def nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, ATOM_TYPES):
        return f if positive else Not(f)
    if isinstance(f, Const):
        return f if positive else neg(f)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    parts = [nnf(a, positive) for a in f.args]
    if isinstance(f, And) == positive:
        return conj(*parts)
    return disj(*parts)


def _literal_of(f: Formula) -> Lit:
    if isinstance(f, Not):
        return Lit(f.arg, False)
    return Lit(f, True)


def to_dnf(f: Formula, budget: int = DEFAULT_DNF_BUDGET) -> list[Constraint]:
    """Disjunctive normal form as a list of non-contradictory constraints.

    ``budget`` bounds the total number of literals materialised; exceeding it
    raises ResourceLimitError instead of letting the distribution blow up.
    """
    used = 0

    def charge(n: int) -> None:
        nonlocal used
        used += n
        if used > budget:
            raise ResourceLimitError(f"DNF conversion exceeded budget of {budget} literals")

    def go(g: Formula) -> list[tuple[Lit, ...]]:
        if isinstance(g, Const):
            return [()] if g.value else []
        if isinstance(g, Or):
            out: list[tuple[Lit, ...]] = []
            for a in g.args:
                out.extend(go(a))
            return out
        if isinstance(g, And):
            acc: list[tuple[Lit, ...]] = [()]
            for a in g.args:
                sub = go(a)
                nxt = []
                for c1, c2 in product(acc, sub):
                    merged = c1 + c2
                    charge(len(merged))
                    if not _clashes(merged):
                        nxt.append(merged)
                acc = nxt
                if not acc:
                    break
            return acc
        lit = _literal_of(g)
        charge(1)
        return [(lit,)]

    result: list[Constraint] = []
    seen: set[Constraint] = set()
    for lits in go(nnf(f)):
        c = Constraint(lits).simplified()
        if c.is_contradictory() or c in seen:
            continue
        seen.add(c)
        result.append(c)
    return result


def _clashes(lits: tuple[Lit, ...]) -> bool:
    s = set(lits)
    return any(~l in s for l in lits)


def from_dnf(cs: Iterable[Constraint]) -> Formula:
    return disj(*(c.to_formula() for c in cs))


def evaluate(f: Formula, valuation: Mapping[Atom, bool]) -> bool:
    """Propositional evaluation; ``t = t`` is true regardless of the valuation."""
    if isinstance(f, Eq) and f.is_trivial():
        return True
    if isinstance(f, ATOM_TYPES):
        return valuation[f]
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.arg, valuation)
    if isinstance(f, And):
        return all(evaluate(a, valuation) for a in f.args)
    return any(evaluate(a, valuation) for a in f.args)
