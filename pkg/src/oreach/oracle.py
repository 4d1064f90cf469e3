"""Brute-force semantic ground truth.

Everything here works on explicit finite interpretations and never touches the
CDCL solver or the grounding encoder: constraints are evaluated in three-valued
logic over partial interpretations, and a tiny propagating search enumerates
total ones. Description logic axioms are evaluated from their set semantics,
not through the universal translation, so comparing the two checkers is a real
two-sided test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import MissingSymbolError, ResourceLimitError, ValidationError
from .logic import (
    And,
    Concept,
    Const,
    Constraint,
    Eq,
    Formula,
    Ind,
    Lit,
    Not,
    Or,
    Role,
    Signature,
    Term,
    Var,
    free_vars,
    individuals_of,
    sig_of,
    term_key,
    to_dnf,
)
from .ontology import (
    ConceptAssertion,
    ConceptInclusion,
    Conj,
    EqualityAssertion,
    Ontology,
    RoleAssertion,
    RoleExpr,
    UniversalTheory,
)
from .sas import ArtifactSystem, CaseFunction

TV = Optional[bool]
DEFAULT_BUDGET = 2_000_000


# --- interpretations ------------------------------------------------------------


@dataclass
class FiniteInterpretation:
    domain: tuple[str, ...]
    concepts: dict[str, set[str]] = field(default_factory=dict)
    roles: dict[str, set[tuple[str, str]]] = field(default_factory=dict)
    constants: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.domain = tuple(self.domain)
        self.concepts = {c: set(v) for c, v in self.concepts.items()}
        self.roles = {r: {tuple(p) for p in v} for r, v in self.roles.items()}
        self.constants = dict(self.constants)
        dom = set(self.domain)
        for c, ext in self.concepts.items():
            if not ext <= dom:
                raise ValidationError(f"extension of {c} leaves the domain")
        for r, ext in self.roles.items():
            if any(a not in dom or b not in dom for a, b in ext):
                raise ValidationError(f"extension of {r} leaves the domain")
        if any(e not in dom for e in self.constants.values()):
            raise ValidationError("constant interpreted outside the domain")

    def signature(self) -> Signature:
        return Signature(frozenset(self.concepts), frozenset(self.roles), frozenset(self.constants))

    def element(self, t: Term, assignment: Mapping[Var, str] = {}) -> str:
        if isinstance(t, Var):
            try:
                return assignment[t]
            except KeyError:
                raise MissingSymbolError(f"no value for variable {t}") from None
        try:
            return self.constants[t.name]
        except KeyError:
            raise MissingSymbolError(f"individual {t.name} is not interpreted") from None

    def concept(self, name: str) -> set[str]:
        try:
            return self.concepts[name]
        except KeyError:
            raise MissingSymbolError(f"concept {name} is not interpreted") from None

    def role(self, name: str) -> set[tuple[str, str]]:
        try:
            return self.roles[name]
        except KeyError:
            raise MissingSymbolError(f"role {name} is not interpreted") from None

    def holds(self, f, assignment: Mapping[Var, str] = {}) -> bool:
        if isinstance(f, Lit):
            return self.holds(f.atom, assignment) == f.positive
        if isinstance(f, Constraint):
            return all(self.holds(l, assignment) for l in f)
        if isinstance(f, Concept):
            return self.element(f.arg, assignment) in self.concept(f.pred)
        if isinstance(f, Role):
            return (self.element(f.left, assignment), self.element(f.right, assignment)) in self.role(f.pred)
        if isinstance(f, Eq):
            return self.element(f.left, assignment) == self.element(f.right, assignment)
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Not):
            return not self.holds(f.arg, assignment)
        if isinstance(f, And):
            return all(self.holds(a, assignment) for a in f.args)
        if isinstance(f, Or):
            return any(self.holds(a, assignment) for a in f.args)
        raise TypeError(f"cannot evaluate {f!r}")

    def key(self) -> tuple:
        return (
            self.domain,
            tuple(sorted((c, tuple(sorted(v))) for c, v in self.concepts.items())),
            tuple(sorted((r, tuple(sorted(v))) for r, v in self.roles.items())),
            tuple(sorted(self.constants.items())),
        )

    def to_json(self) -> dict:
        return {
            "domain": list(self.domain),
            "concepts": {c: sorted(self.concepts[c]) for c in sorted(self.concepts)},
            "roles": {r: [list(p) for p in sorted(self.roles[r])] for r in sorted(self.roles)},
            "constants": {a: self.constants[a] for a in sorted(self.constants)},
        }


@dataclass(frozen=True)
class Morphism:
    source: FiniteInterpretation
    target: FiniteInterpretation
    mapping: Mapping[str, str]


# --- model checking -------------------------------------------------------------


def check_model(I: FiniteInterpretation, T: UniversalTheory) -> bool:
    """Truth of every clause (under every assignment) and every ground literal."""
    for uc in T.clauses:
        body_head = [Lit(a, False) for a in uc.body] + [uc.head]
        for vals in product(I.domain, repeat=len(uc.variables)):
            asg = dict(zip(uc.variables, vals))
            if not any(I.holds(l, asg) for l in body_head):
                return False
    return all(I.holds(l) for l in T.ground)


def _role_ext(I: FiniteInterpretation, r: RoleExpr) -> set[tuple[str, str]]:
    ext = I.role(r.name)
    return {(b, a) for a, b in ext} if r.inverse else set(ext)


def concept_extension(I: FiniteInterpretation, c) -> set[str]:
    """Set semantics of an RDFS+ left-hand side."""
    if isinstance(c, Conj):
        out = set(I.domain)
        for n in c.names:
            out &= I.concept(n)
        return out
    pairs = _role_ext(I, c.role)
    if c.filler is None:
        return {a for a, _ in pairs}
    fill = I.concept(c.filler)
    return {a for a, b in pairs if b in fill}


def check_model_dl(I: FiniteInterpretation, O: Ontology) -> bool:
    for ax in O.tbox:
        if isinstance(ax, ConceptInclusion):
            lhs = concept_extension(I, ax.lhs)
            rhs = I.concept(ax.rhs)
            if (lhs & rhs) if ax.negated else (lhs - rhs):
                return False
        else:
            lhs, rhs = _role_ext(I, ax.lhs), _role_ext(I, ax.rhs)
            if (lhs & rhs) if ax.negated else (lhs - rhs):
                return False
    for a in O.abox:
        if isinstance(a, ConceptAssertion):
            ok = I.element(Ind(a.individual)) in I.concept(a.concept)
        elif isinstance(a, RoleAssertion):
            ok = (I.element(Ind(a.first)), I.element(Ind(a.second))) in I.role(a.role)
        else:
            ok = I.element(Ind(a.first)) == I.element(Ind(a.second))
        if ok != a.positive:
            return False
    return True


# --- three-valued constraints over partial interpretations ------------------------


def _and(vals: Iterable[TV]) -> TV:
    unknown = False
    for v in vals:
        if v is False:
            return False
        if v is None:
            unknown = True
    return None if unknown else True


def _or(vals: Iterable[TV]) -> TV:
    unknown = False
    for v in vals:
        if v is True:
            return True
        if v is None:
            unknown = True
    return None if unknown else False


def _not(v: TV) -> TV:
    return None if v is None else not v


class AtomTable:
    """Numbering of ground atoms ``("C", A, d)`` and ``("R", P, d, e)`` over a domain."""

    def __init__(self, domain: Sequence[str], sig: Signature):
        self.domain = tuple(domain)
        self.sig = sig
        self.keys: list[tuple] = []
        self.ids: dict[tuple, int] = {}
        for d in self.domain:
            for c in sorted(sig.concepts):
                self._add(("C", c, d))
        for r in sorted(sig.roles):
            for d in self.domain:
                for e in self.domain:
                    self._add(("R", r, d, e))

    def _add(self, k: tuple) -> None:
        self.ids[k] = len(self.keys)
        self.keys.append(k)

    def c(self, name: str, d: str) -> int:
        try:
            return self.ids[("C", name, d)]
        except KeyError:
            raise MissingSymbolError(f"concept {name} is not in the signature") from None

    def r(self, name: str, d: str, e: str) -> int:
        try:
            return self.ids[("R", name, d, e)]
        except KeyError:
            raise MissingSymbolError(f"role {name} is not in the signature") from None

    def interpretation(self, val: Sequence[TV], constants: Mapping[str, str]) -> FiniteInterpretation:
        concepts = {c: set() for c in sorted(self.sig.concepts)}
        roles = {r: set() for r in sorted(self.sig.roles)}
        for i, k in enumerate(self.keys):
            if val[i]:
                if k[0] == "C":
                    concepts[k[1]].add(k[2])
                else:
                    roles[k[1]].add((k[2], k[3]))
        return FiniteInterpretation(self.domain, concepts, roles, constants)


@dataclass
class Unit:
    atoms: tuple[int, ...]
    fn: Callable[[list], TV]


def _atom_unit(tab: AtomTable, atom, elem: Callable[[Term], str], positive: bool = True) -> Union[Unit, bool]:
    """Unit for a single literal; equalities are decided by the element map."""
    if isinstance(atom, Eq):
        return (elem(atom.left) == elem(atom.right)) == positive
    i = tab.c(atom.pred, elem(atom.arg)) if isinstance(atom, Concept) else tab.r(atom.pred, elem(atom.left), elem(atom.right))
    return Unit((i,), (lambda val, i=i: val[i]) if positive else (lambda val, i=i: _not(val[i])))


def formula_unit(tab: AtomTable, f: Formula, elem: Callable[[Term], str]) -> Unit:
    """Three-valued evaluation of a quantifier-free formula."""
    atoms: list[int] = []

    def build(g) -> Callable[[list], TV]:
        if isinstance(g, Const):
            return lambda val, v=g.value: v
        if isinstance(g, Eq):
            v = elem(g.left) == elem(g.right)
            return lambda val, v=v: v
        if isinstance(g, Concept):
            i = tab.c(g.pred, elem(g.arg))
            atoms.append(i)
            return lambda val, i=i: val[i]
        if isinstance(g, Role):
            i = tab.r(g.pred, elem(g.left), elem(g.right))
            atoms.append(i)
            return lambda val, i=i: val[i]
        if isinstance(g, Not):
            inner = build(g.arg)
            return lambda val: _not(inner(val))
        kids = [build(a) for a in g.args]
        if isinstance(g, And):
            return lambda val: _and(k(val) for k in kids)
        return lambda val: _or(k(val) for k in kids)

    fn = build(f)
    return Unit(tuple(dict.fromkeys(atoms)), fn)


def theory_units(tab: AtomTable, T: UniversalTheory, constants: Mapping[str, str]) -> Optional[list[Unit]]:
    """Ground instances of ``T`` over the table's domain; None if a ground literal is already false."""
    units: list[Unit] = []
    elem_c = _const_elem(constants)
    for uc in T.clauses:
        lits = [Lit(a, False) for a in uc.body] + [uc.head]
        for vals in product(tab.domain, repeat=len(uc.variables)):
            asg = dict(zip(uc.variables, vals))
            ids, signs = [], []
            for l in lits:
                a = l.atom
                if isinstance(a, Concept):
                    i = tab.c(a.pred, asg[a.arg])
                else:
                    i = tab.r(a.pred, asg[a.left], asg[a.right])
                ids.append(i)
                signs.append(l.positive)
            units.append(Unit(tuple(ids), _clause_fn(tuple(ids), tuple(signs))))
    for l in T.ground:
        u = _atom_unit(tab, l.atom, elem_c, l.positive)
        if u is False:
            return None
        if u is not True:
            units.append(u)
    return units


def _clause_fn(ids: tuple[int, ...], signs: tuple[bool, ...]) -> Callable[[list], TV]:
    def fn(val):
        unknown = False
        for i, s in zip(ids, signs):
            v = val[i]
            if v is None:
                unknown = True
            elif v == s:
                return True
        return None if unknown else False

    return fn


def _const_elem(constants: Mapping[str, str], assignment: Mapping[Var, str] = {}) -> Callable[[Term], str]:
    def elem(t: Term) -> str:
        if isinstance(t, Var):
            return assignment[t]
        try:
            return constants[t.name]
        except KeyError:
            raise MissingSymbolError(f"individual {t.name} is not interpreted") from None

    return elem


def ontology_units(tab: AtomTable, O: Ontology, constants: Mapping[str, str]) -> Optional[list[Unit]]:
    """Set-semantics constraints of ``O``, one per axiom and element (or pair)."""
    dom = tab.domain
    units: list[Unit] = []

    def role_atom(r: RoleExpr, d: str, e: str) -> int:
        return tab.r(r.name, e, d) if r.inverse else tab.r(r.name, d, e)

    for ax in O.tbox:
        if isinstance(ax, ConceptInclusion):
            for d in dom:
                lhs = ax.lhs
                if isinstance(lhs, Conj):
                    ids = tuple(tab.c(n, d) for n in lhs.names)
                    member = lambda val, ids=ids: _and(val[i] for i in ids)
                    touched = ids
                elif lhs.filler is None:
                    ids = tuple(role_atom(lhs.role, d, e) for e in dom)
                    member = lambda val, ids=ids: _or(val[i] for i in ids)
                    touched = ids
                else:
                    pairs = tuple((role_atom(lhs.role, d, e), tab.c(lhs.filler, e)) for e in dom)
                    member = lambda val, pairs=pairs: _or(_and((val[a], val[b])) for a, b in pairs)
                    touched = tuple(x for p in pairs for x in p)
                h = tab.c(ax.rhs, d)
                if ax.negated:
                    fn = lambda val, m=member, h=h: _or((_not(m(val)), _not(val[h])))
                else:
                    fn = lambda val, m=member, h=h: _or((_not(m(val)), val[h]))
                units.append(Unit(tuple(dict.fromkeys(touched + (h,))), fn))
        else:
            for d in dom:
                for e in dom:
                    a, b = role_atom(ax.lhs, d, e), role_atom(ax.rhs, d, e)
                    if ax.negated:
                        fn = lambda val, a=a, b=b: _or((_not(val[a]), _not(val[b])))
                    else:
                        fn = lambda val, a=a, b=b: _or((_not(val[a]), val[b]))
                    units.append(Unit(tuple(dict.fromkeys((a, b))), fn))
    for a in O.abox:
        if isinstance(a, EqualityAssertion):
            if (constants[a.first] == constants[a.second]) != a.positive:
                return None
            continue
        if isinstance(a, ConceptAssertion):
            i = tab.c(a.concept, constants[a.individual])
        else:
            i = tab.r(a.role, constants[a.first], constants[a.second])
        units.append(Unit((i,), (lambda val, i=i: val[i]) if a.positive else (lambda val, i=i: _not(val[i]))))
    return units


class Search:
    """Propagating backtracking search over a partial assignment of atom ids.

    A unit with a single unassigned atom is probed with both values; if one
    value falsifies it the other is forced. This is sound for any three-valued
    constraint, whatever its shape.
    """

    def __init__(self, n: int, units: Sequence[Unit], budget: int = DEFAULT_BUDGET, rng: Optional[random.Random] = None):
        self.n = n
        self.units = list(units)
        self.watch: list[list[int]] = [[] for _ in range(n)]
        for k, u in enumerate(self.units):
            for a in u.atoms:
                self.watch[a].append(k)
        self.val: list[TV] = [None] * n
        self.trail: list[int] = []
        self.budget = budget
        self.nodes = 0
        self.rng = rng

    def _charge(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise ResourceLimitError(f"oracle search exceeded {self.budget} nodes")

    def initial(self) -> bool:
        """Check every unit once and propagate; False when already inconsistent."""
        queue: list[int] = []
        for k, u in enumerate(self.units):
            r = u.fn(self.val)
            if r is False:
                return False
            if r is None and not self._maybe_force(k, queue):
                return False
        return self._propagate(queue)

    def assign(self, a: int, v: bool) -> bool:
        self.val[a] = v
        self.trail.append(a)
        return self._propagate([a])

    def _maybe_force(self, k: int, queue: list[int]) -> bool:
        u = self.units[k]
        free = [x for x in u.atoms if self.val[x] is None]
        if len(free) != 1:
            return True
        x = free[0]
        self.val[x] = True
        r1 = u.fn(self.val)
        self.val[x] = False
        r2 = u.fn(self.val)
        self.val[x] = None
        if r1 is False and r2 is False:
            return False
        if r1 is False or r2 is False:
            self.val[x] = r1 is not False
            self.trail.append(x)
            queue.append(x)
        return True

    def _propagate(self, queue: list[int]) -> bool:
        while queue:
            a = queue.pop()
            for k in self.watch[a]:
                r = self.units[k].fn(self.val)
                if r is False:
                    return False
                if r is None and not self._maybe_force(k, queue):
                    return False
        return True

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.val[self.trail.pop()] = None

    def _next_free(self, order: Sequence[int]) -> int:
        for a in order:
            if self.val[a] is None:
                return a
        return -1

    def models(self, order: Optional[Sequence[int]] = None) -> Iterator[list[bool]]:
        """All total assignments satisfying every unit (assumes ``initial`` succeeded)."""
        order = list(order) if order is not None else list(range(self.n))
        if self.rng is not None:
            self.rng.shuffle(order)
        yield from self._models(order)

    def _models(self, order: list[int]) -> Iterator[list[bool]]:
        self._charge()
        a = self._next_free(order)
        if a < 0:
            # units are fully evaluated only once every atom is set
            if all(u.fn(self.val) for u in self.units):
                yield list(self.val)
            return
        first = self.rng.random() < 0.5 if self.rng is not None else False
        for v in (first, not first):
            m = self.mark()
            if self.assign(a, v):
                yield from self._models(order)
            self.undo(m)

    def complete(self, order: Optional[Sequence[int]] = None) -> Optional[list[bool]]:
        for m in self.models(order):
            return m
        return None


# --- enumeration ------------------------------------------------------------------


def _signature_of(obj) -> Signature:
    return obj.signature()


def enumerate_models(
    obj: Union[UniversalTheory, Ontology],
    n: int,
    constants: Optional[Iterable[str]] = None,
    signature: Optional[Signature] = None,
    budget: int = DEFAULT_BUDGET,
    max_domain: int = 4,
) -> Iterator[FiniteInterpretation]:
    """Every interpretation over ``e1..en`` (all constant maps) that models ``obj``.

    A theory is checked through its clauses, an ontology through set semantics.
    """
    if n < 1 or n > max_domain:
        raise ResourceLimitError(f"domain size {n} outside 1..{max_domain}")
    sig = _signature_of(obj) | (signature or Signature())
    consts = sorted(set(sig.individuals) | set(constants or ()))
    sig = Signature(sig.concepts, sig.roles, frozenset(consts))
    domain = tuple(f"e{i}" for i in range(1, n + 1))
    tab = AtomTable(domain, sig)
    spent = 0
    for images in product(domain, repeat=len(consts)):
        cmap = dict(zip(consts, images))
        units = theory_units(tab, obj, cmap) if isinstance(obj, UniversalTheory) else ontology_units(tab, obj, cmap)
        if units is None:
            continue
        s = Search(len(tab.keys), units, budget - spent)
        if s.initial():
            for m in s.models():
                yield tab.interpretation(m, cmap)
        spent += s.nodes


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """Restricted-growth enumeration of the set partitions of ``items``."""
    items = list(items)
    if not items:
        yield []
        return

    def go(i: int, blocks: list[list]) -> Iterator[list[list]]:
        if i == len(items):
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(items[i])
            yield from go(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        yield from go(i + 1, blocks)
        blocks.pop()

    yield from go(0, [])


@dataclass
class OracleModel:
    interpretation: FiniteInterpretation
    assignment: dict[Var, str]


def oracle_sat(
    T: UniversalTheory, phi: Formula, signature: Optional[Signature] = None, budget: int = DEFAULT_BUDGET
) -> Optional[OracleModel]:
    """A model of ``T`` and ``phi`` (free variables existential) whose elements are all named, or None.

    Restricting any model to the named elements keeps it a model of a universal
    theory, so trying every way the named terms can co-denote is exhaustive.
    """
    sig = T.signature() | sig_of(phi) | (signature or Signature())
    inds = sorted({Ind(n) for n in sig.individuals} | set(individuals_of(phi)), key=term_key)
    vs = sorted(free_vars(phi), key=term_key)
    named: list[Term] = list(inds) + list(vs)
    if not named:
        named = [Ind("_pad")]
    for blocks in set_partitions(named):
        domain = tuple(f"e{i}" for i in range(1, len(blocks) + 1))
        where = {t: domain[k] for k, b in enumerate(blocks) for t in b}
        cmap = {t.name: where[t] for t in inds}
        asg = {v: where[v] for v in vs}
        tab = AtomTable(domain, Signature(sig.concepts, sig.roles, frozenset(cmap)))
        units = theory_units(tab, T, cmap)
        if units is None:
            continue
        units.append(formula_unit(tab, phi, _const_elem(cmap, asg)))
        s = Search(len(tab.keys), units, budget)
        if not s.initial():
            continue
        m = s.complete()
        if m is not None:
            return OracleModel(tab.interpretation(m, cmap), asg)
    return None


def random_model(
    T: UniversalTheory,
    domain: Sequence[str],
    constants: Mapping[str, str],
    rng: random.Random,
    fixed: Optional[FiniteInterpretation] = None,
    signature: Optional[Signature] = None,
) -> Optional[FiniteInterpretation]:
    """Random completion of ``fixed`` (every atom over its domain is kept) to a model of ``T``."""
    sig = T.signature() | (signature or Signature())
    tab = AtomTable(tuple(domain), Signature(sig.concepts, sig.roles, frozenset(constants)))
    units = theory_units(tab, T, constants)
    if units is None:
        return None
    s = Search(len(tab.keys), units, rng=rng)
    if fixed is not None:
        sub = set(fixed.domain)
        for i, k in enumerate(tab.keys):
            if all(x in sub for x in k[2:]):
                truth = k[2] in fixed.concepts.get(k[1], ()) if k[0] == "C" else (k[2], k[3]) in fixed.roles.get(k[1], ())
                s.val[i] = truth
                s.trail.append(i)
    if not s.initial():
        return None
    m = s.complete()
    return None if m is None else tab.interpretation(m, constants)


# --- morphisms and amalgamation ------------------------------------------------------


def is_embedding(mu: Morphism) -> bool:
    """Injective, total, preserves constants and preserves and reflects every atom."""
    src, tgt, f = mu.source, mu.target, dict(mu.mapping)
    if set(f) != set(src.domain) or any(v not in set(tgt.domain) for v in f.values()):
        return False
    if len(set(f.values())) != len(f):
        return False
    for a, e in src.constants.items():
        if tgt.constants.get(a) != f[e]:
            return False
    for c in set(src.concepts) | set(tgt.concepts):
        s, t = src.concepts.get(c, set()), tgt.concepts.get(c, set())
        if any((d in s) != (f[d] in t) for d in src.domain):
            return False
    for r in set(src.roles) | set(tgt.roles):
        s, t = src.roles.get(r, set()), tgt.roles.get(r, set())
        if any(((d, e) in s) != ((f[d], f[e]) in t) for d in src.domain for e in src.domain):
            return False
    return True


def is_substructure(I0: FiniteInterpretation, I: FiniteInterpretation) -> bool:
    if not set(I0.domain) <= set(I.domain):
        return False
    return is_embedding(Morphism(I0, I, {d: d for d in I0.domain}))


def amalgamate(I1: FiniteInterpretation, I2: FiniteInterpretation, I0: FiniteInterpretation) -> FiniteInterpretation:
    """Union of two models over a shared substructure (domains must meet exactly in it)."""
    if not is_substructure(I0, I1) or not is_substructure(I0, I2):
        raise ValidationError("I0 is not a substructure of both models")
    if set(I1.domain) & set(I2.domain) != set(I0.domain):
        raise ValidationError("domains must intersect exactly in the shared substructure")
    consts = dict(I1.constants)
    for a, e in I2.constants.items():
        if consts.setdefault(a, e) != e:
            raise ValidationError(f"constant {a} is interpreted differently")
    domain = tuple(I1.domain) + tuple(d for d in I2.domain if d not in set(I1.domain))
    concepts = {c: I1.concepts.get(c, set()) | I2.concepts.get(c, set()) for c in set(I1.concepts) | set(I2.concepts)}
    roles = {r: I1.roles.get(r, set()) | I2.roles.get(r, set()) for r in set(I1.roles) | set(I2.roles)}
    return FiniteInterpretation(domain, concepts, roles, consts)


# --- artifact systems ----------------------------------------------------------------


def _eval_term(I: FiniteInterpretation, t: Term, asg: Mapping[Var, str]) -> str:
    return I.element(t, asg)


def step_successors(S: ArtifactSystem, I: FiniteInterpretation, state: Sequence[str]) -> set[tuple[str, ...]]:
    """One-step successors of a state (values of the artifact variables) in a total model."""
    out: set[tuple[str, ...]] = set()
    for t in S.transitions:
        for ps in product(I.domain, repeat=len(t.params)):
            asg = dict(zip(S.vars, state))
            asg.update(zip(t.params, ps))
            if not I.holds(t.guard, asg):
                continue
            choices: list[list[str]] = []
            for x, u in t.updates:
                if isinstance(u, CaseFunction):
                    choices.append([_eval_term(I, term, asg) for l, term in u.branches if I.holds(l, asg)])
                else:
                    choices.append([_eval_term(I, u, asg)])
            out.update(product(*choices))
    return out


@dataclass
class ForwardResult:
    violation: bool
    trace: tuple[str, ...] = ()
    interpretation: Optional[FiniteInterpretation] = None
    states: tuple[tuple[str, ...], ...] = ()
    params: tuple[tuple[str, ...], ...] = ()
    nodes: int = 0


def bounded_forward_verify(
    S: ArtifactSystem,
    nu: Formula,
    domain_size: int,
    depth: int,
    theory: Optional[UniversalTheory] = None,
    budget: int = 5_000_000,
) -> ForwardResult:
    """Search every model with at most ``domain_size`` elements for a run of length <= ``depth`` ending in ``nu``.

    The model and the run are both existential, so the model is built lazily:
    each guard literal that mentions an undecided atom commits that atom to the
    value the run needs, propagation prunes inconsistent commitments, and a
    candidate violation is only reported after the partial model has been
    completed to a total model of T. Undistinguished fresh elements are
    interchangeable, so only the first of them is tried as a parameter value.
    Runs are explored shortest first.
    """
    if any(not t.is_case_free for t in S.transitions):
        raise ValueError("eliminate case functions first")
    T = theory if theory is not None else S.theory()
    sig = T.signature() | S.signature() | sig_of(nu)
    consts = [c.name for c in S.constants()]
    nu_dnf = to_dnf(nu)
    nodes = 0
    for d in range(depth + 1):
        for blocks in set_partitions(consts):
            if len(blocks) > domain_size:
                continue
            res = _forward_partition(S, T, sig, nu_dnf, blocks, domain_size, d, budget - nodes)
            nodes += res.nodes
            if res.violation:
                res.nodes = nodes
                return res
    return ForwardResult(False, nodes=nodes)


def _forward_partition(S, T, sig, nu_dnf, blocks, domain_size, depth, budget) -> ForwardResult:
    named = tuple(f"n{i}" for i in range(len(blocks)))
    fresh = tuple(f"f{i}" for i in range(domain_size - len(blocks)))
    domain = named + fresh
    cmap = {c: named[k] for k, b in enumerate(blocks) for c in b}
    tab = AtomTable(domain, Signature(sig.concepts, sig.roles, frozenset(cmap)))
    units = theory_units(tab, T, cmap)
    result = ForwardResult(False)
    if units is None:
        return result
    # constants are distinct exactly as the partition says
    s = Search(len(tab.keys), units, budget)
    if not s.initial():
        return result
    state0 = tuple(cmap[a.name] for _, a in sorted(S.init, key=lambda p: S.vars.index(p[0])))
    seen: set = set()

    def commit(lits: Iterable[Lit], asg: Mapping[Var, str]) -> Optional[int]:
        """Make every literal true; returns the undo mark or None on conflict."""
        m = s.mark()
        for l in lits:
            a = l.atom
            if isinstance(a, Eq):
                if (_el(a.left) == _el(a.right)) != l.positive:
                    s.undo(m)
                    return None
                continue
            i = tab.c(a.pred, _el(a.arg)) if isinstance(a, Concept) else tab.r(a.pred, _el(a.left), _el(a.right))
            v = s.val[i]
            if v is None:
                if not s.assign(i, l.positive):
                    s.undo(m)
                    return None
            elif v != l.positive:
                s.undo(m)
                return None
        return m

    def _el(t: Term) -> str:
        return cur_asg[t] if isinstance(t, Var) else cmap[t.name]

    cur_asg: dict[Var, str] = {}
    path_states: list[tuple[str, ...]] = [state0]
    path_trans: list[str] = []
    path_params: list[tuple[str, ...]] = []

    def touched() -> set[str]:
        used = set(named)
        for st in path_states:
            used.update(st)
        for ps in path_params:
            used.update(ps)
        # propagation treats untouched fresh elements alike, so they stay interchangeable
        return used

    def dfs(state: tuple[str, ...], k: int) -> bool:
        nonlocal cur_asg
        s._charge()
        if k == 0:
            cur_asg = dict(zip(S.vars, state))
            for delta in nu_dnf:
                m = commit(delta, cur_asg)
                if m is None:
                    continue
                full = s.complete()
                if full is not None:
                    result.violation = True
                    result.interpretation = tab.interpretation(full, cmap)
                    result.trace = tuple(path_trans)
                    result.states = tuple(path_states)
                    result.params = tuple(path_params)
                    return True
                s.undo(m)
            return False
        key = (state, k, frozenset(touched()), tuple(sorted((i, s.val[i]) for i in s.trail)))
        if key in seen:
            return False
        seen.add(key)
        for t in S.transitions:
            used = touched()
            first_free = [e for e in fresh if e not in used][:1]
            cands = [e for e in domain if e in used] + first_free
            for ps in product(cands, repeat=len(t.params)):
                cur_asg = dict(zip(S.vars, state))
                cur_asg.update(zip(t.params, ps))
                m = commit(t.guard, cur_asg)
                if m is None:
                    continue
                nxt = tuple(_el(u) for _, u in t.updates)
                path_states.append(nxt)
                path_trans.append(t.name)
                path_params.append(ps)
                found = dfs(nxt, k - 1)
                if found:
                    return True
                path_states.pop()
                path_trans.pop()
                path_params.pop()
                s.undo(m)
        return False

    dfs(state0, depth)
    result.nodes = s.nodes
    return result
