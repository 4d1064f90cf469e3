"""Satisfiability of quantifier-free formulas modulo a translated ontology.

Free variables are read as fresh constants and the universal theory is
instantiated over the named elements only. This is complete, not just sound:
the theory is universal and function-free, so restricting any model to the
elements that interpret the named constants yields a substructure that is still
a model and satisfies the same quantifier-free facts. Hence T + phi has a model
iff it has one whose domain is a quotient of the grounding domain, and the
quotient is exactly what the equality variables plus congruence clauses
describe.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Optional, Sequence

from .logic import (
    ATOM_TYPES,
    FALSE,
    TRUE,
    And,
    Atom,
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
    conj,
    disj,
    free_vars,
    individuals_of,
    neg,
    nnf,
    sig_of,
    substitute,
    term_key,
)
from .ontology import UniversalTheory
from .sat import Solver, to_dimacs

log = logging.getLogger(__name__)

PAD = Ind("_pad")


@dataclass(frozen=True)
class GroundingDomain:
    elements: tuple[Term, ...]

    def __post_init__(self) -> None:
        elems = tuple(dict.fromkeys(self.elements))
        if not elems:
            elems = (PAD,)
        object.__setattr__(self, "elements", elems)

    @classmethod
    def for_query(cls, theory: UniversalTheory, *objs, extra: Iterable[Term] = ()) -> "GroundingDomain":
        inds = {Ind(n) for n in theory.signature().individuals}
        vs: set[Var] = set()
        for o in objs:
            inds |= individuals_of(o)
            vs |= free_vars(o)
        elems = sorted(inds, key=term_key) + sorted(vs, key=term_key)
        return cls(tuple(elems) + tuple(extra))

    def __len__(self) -> int:
        return len(self.elements)


class PropEncoding:
    """Boolean variable per ground atom plus the CNF of T and the equality axioms."""

    def __init__(self, domain: GroundingDomain, signature: Signature):
        self.domain = domain
        self.signature = signature
        self.atom_vars: dict[Atom, int] = {}
        self.var_atoms: list[Optional[Atom]] = [None]
        self.clauses: list[list[int]] = []
        self.instance_count = 0
        self.true_var = self._fresh(None)
        self.clauses.append([self.true_var])
        els = domain.elements
        for c in sorted(signature.concepts):
            for e in els:
                self._fresh(Concept(c, e))
        for r in sorted(signature.roles):
            for e1 in els:
                for e2 in els:
                    self._fresh(Role(r, e1, e2))
        for i, e1 in enumerate(els):
            for e2 in els[i + 1 :]:
                self._fresh(Eq(e1, e2))
        self.num_atom_vars = len(self.var_atoms) - 1

    def _fresh(self, atom: Optional[Atom]) -> int:
        v = len(self.var_atoms)
        self.var_atoms.append(atom)
        if atom is not None:
            self.atom_vars[atom] = v
        return v

    def var(self, atom: Atom) -> int:
        if isinstance(atom, Eq) and atom.is_trivial():
            if atom.left not in self.domain.elements:
                raise KeyError(f"term {atom.left} is not in the grounding domain")
            return self.true_var
        try:
            return self.atom_vars[atom]
        except KeyError:
            raise KeyError(f"atom {atom} is outside the grounding vocabulary") from None

    def lit(self, l: Lit) -> int:
        v = self.var(l.atom)
        return v if l.positive else -v

    @property
    def num_vars(self) -> int:
        return len(self.var_atoms) - 1

    def to_dimacs(self, extra: Sequence[Sequence[int]] = ()) -> str:
        cls = list(self.clauses) + [list(c) for c in extra]
        nv = max([self.num_vars] + [abs(l) for c in cls for l in c])
        return to_dimacs(nv, cls)


def ground(theory: UniversalTheory, domain: GroundingDomain, signature: Optional[Signature] = None) -> PropEncoding:
    """Instantiate every clause of ``theory`` over ``domain`` and add equality axioms."""
    sig = theory.signature() | (signature or Signature())
    enc = PropEncoding(domain, sig)
    els = domain.elements
    add = enc.clauses.append
    for uc in theory.clauses:
        vs = uc.variables
        for vals in product(els, repeat=len(vs)):
            sigma = dict(zip(vs, vals))
            cl = [-enc.var(substitute(a, sigma)) for a in uc.body]
            cl.append(enc.lit(substitute(uc.head, sigma)))
            add(cl)
            enc.instance_count += 1
    for l in theory.ground:
        add([enc.lit(l)])
    # equality: symmetry is built into the canonical Eq atom, reflexivity is true_var
    for a, b, c in permutations(els, 3):
        if term_key(a) < term_key(c):
            add([-enc.var(Eq(a, b)), -enc.var(Eq(b, c)), enc.var(Eq(a, c))])
    for a, b in permutations(els, 2):
        e = enc.var(Eq(a, b))
        for cname in sorted(sig.concepts):
            add([-enc.var(Concept(cname, a)), -e, enc.var(Concept(cname, b))])
        for r in sorted(sig.roles):
            for c in els:
                add([-enc.var(Role(r, a, c)), -e, enc.var(Role(r, b, c))])
                add([-enc.var(Role(r, c, a)), -e, enc.var(Role(r, c, b))])
    return enc


@dataclass
class SatVerdict:
    satisfiable: bool
    witness: Optional[dict[Atom, bool]] = None
    domain: tuple[Term, ...] = ()
    # variables removed by equality substitution, mapped to the term they were equated with
    aliases: dict[Var, Term] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.satisfiable

    def value_of(self, atom: Atom) -> bool:
        assert self.witness is not None
        if isinstance(atom, Eq) and atom.is_trivial():
            return True
        return self.witness[substitute(atom, self.aliases)]

    def classes(self) -> list[list[Term]]:
        """Equivalence classes of domain terms under the witness equality."""
        assert self.witness is not None
        out: list[list[Term]] = []
        for t in self.domain:
            for cls in out:
                if self.witness.get(Eq(cls[0], t), False):
                    cls.append(t)
                    break
            else:
                out.append([t])
        return out


class GroundSolver:
    """One grounding of T reused across many queries.

    Query formulas are Tseitin-encoded with fresh definition variables whose
    clauses only constrain the definition literal, so they can stay in the
    clause database permanently; the query itself is passed as an assumption.
    """

    def __init__(
        self,
        theory: UniversalTheory,
        elements: Sequence[Term],
        signature: Optional[Signature] = None,
        conflict_budget: Optional[int] = None,
        rebuild_factor: int = 4,
    ):
        self.theory = theory
        self.encoding = ground(theory, GroundingDomain(tuple(elements)), signature)
        self.conflict_budget = conflict_budget
        self.rebuild_factor = rebuild_factor
        self.queries = 0
        self._reset()

    def _reset(self) -> None:
        self.solver = Solver(self.conflict_budget)
        self.solver.ensure_vars(self.encoding.num_vars)
        for c in self.encoding.clauses:
            self.solver.add_clause(c)
        self._base = len(self.encoding.clauses)
        self._added = 0
        self.extra_clauses: list[list[int]] = []

    def maybe_rebuild(self) -> None:
        if self._added > self.rebuild_factor * self._base:
            self._reset()

    @property
    def domain(self) -> tuple[Term, ...]:
        return self.encoding.domain.elements

    def new_var(self) -> int:
        return self.solver.new_var()

    def add_clause(self, lits: Sequence[int]) -> None:
        self._added += 1
        self.extra_clauses.append(list(lits))
        self.solver.add_clause(lits)

    def encode(self, f: Formula) -> int:
        """Literal that implies ``f`` (polarity-restricted Tseitin)."""
        return self._enc(nnf(f))

    def _enc(self, f: Formula) -> int:
        enc = self.encoding
        if isinstance(f, Const):
            return enc.true_var if f.value else -enc.true_var
        if isinstance(f, ATOM_TYPES):
            return enc.var(f)
        if isinstance(f, Not):
            return -enc.var(f.arg)
        kids = [self._enc(a) for a in f.args]
        t = self.new_var()
        if isinstance(f, And):
            for k in kids:
                self.add_clause([-t, k])
        else:
            self.add_clause([-t] + kids)
        return t

    def solve(self, assumptions: Sequence[int]) -> bool:
        self.queries += 1
        return self.solver.solve(assumptions)

    def check(self, f: Formula) -> SatVerdict:
        self.maybe_rebuild()
        t = self.encode(f)
        if not self.solve([t]):
            return SatVerdict(False, None, self.domain)
        return SatVerdict(True, self.current_witness(), self.domain)

    def current_witness(self) -> dict[Atom, bool]:
        enc = self.encoding
        m = self.solver.model
        return {a: m[v] == 1 for a, v in enc.atom_vars.items()}

    def is_sat(self, f: Formula) -> bool:
        self.maybe_rebuild()
        return self.solve([self.encode(f)])

    def entails(self, premise: Formula, conclusion: Formula) -> bool:
        return not self.is_sat(conj(premise, neg(conclusion)))


def _as_formula(phi) -> Formula:
    if isinstance(phi, Constraint):
        return phi.to_formula()
    if isinstance(phi, Lit):
        return phi.to_formula()
    return phi


def _drop_trivial(f: Formula) -> Formula:
    if isinstance(f, Eq):
        return TRUE if f.is_trivial() else f
    if isinstance(f, Not):
        inner = _drop_trivial(f.arg)
        return neg(inner) if isinstance(inner, Const) else Not(inner)
    if isinstance(f, And):
        return conj(*(_drop_trivial(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_drop_trivial(a) for a in f.args))
    return f


def eliminate_equalities(f: Formula) -> tuple[Formula, dict[Var, Term]]:
    """Use top-level ``x = t`` conjuncts to substitute variables away.

    ``exists x (x = t & phi)`` is equivalent to ``phi[t/x]``, so this preserves
    satisfiability; the returned aliases recover the value of each removed variable.
    """
    aliases: dict[Var, Term] = {}
    f = _drop_trivial(f)
    while True:
        parts = f.args if isinstance(f, And) else (f,)
        pick = None
        for p in parts:
            if isinstance(p, Eq) and not p.is_trivial():
                if isinstance(p.right, Var):
                    pick = (p.right, p.left)
                elif isinstance(p.left, Var):
                    pick = (p.left, p.right)
                if pick:
                    break
        if pick is None:
            return f, aliases
        x, t = pick
        sigma = {x: t}
        aliases = {v: (t if u == x else u) for v, u in aliases.items()}
        aliases[x] = t
        f = _drop_trivial(substitute(f, sigma))


def sat_qff(
    theory: UniversalTheory,
    phi,
    *,
    simplify: bool = True,
    signature: Optional[Signature] = None,
    conflict_budget: Optional[int] = None,
    dimacs_path: Optional[str] = None,
) -> SatVerdict:
    """Decide whether ``theory`` together with the existential closure of ``phi`` has a model."""
    f = _as_formula(phi)
    aliases: dict[Var, Term] = {}
    if simplify:
        f, aliases = eliminate_equalities(f)
    if f == FALSE:
        return SatVerdict(False)
    domain = GroundingDomain.for_query(theory, f, extra=[t for t in aliases.values()])
    sig = sig_of(f) | (signature or Signature())
    gs = GroundSolver(theory, domain.elements, sig, conflict_budget)
    t = gs.encode(f)
    if dimacs_path:
        extra = gs.extra_clauses
        with open(dimacs_path, "w", encoding="utf-8") as fh:
            fh.write(gs.encoding.to_dimacs(extra + [[t]]))
    ok = gs.solve([t])
    if not ok:
        return SatVerdict(False, None, domain.elements, aliases)
    return SatVerdict(True, gs.current_witness(), domain.elements, aliases)


def entails(theory: UniversalTheory, premise, conclusion) -> bool:
    """``theory |= premise -> conclusion`` (free variables universally read)."""
    from .logic import Clause

    p = _as_formula(premise)
    c = conclusion.to_formula() if isinstance(conclusion, Clause) else _as_formula(conclusion)
    return not sat_qff(theory, conj(p, neg(c))).satisfiable
