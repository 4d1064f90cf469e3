"""Quantifier elimination in the model completion of a translated ontology.

The cover of ``exists y. delta(x, y)`` is the strongest quantifier-free
consequence of ``delta`` over the kept vocabulary. We compute it as the
projection of the grounded problem onto the target atoms (atoms whose terms
are all kept variables or constants), enumerating one generalized cube per
model and blocking it until nothing is left.

A cube ``c`` read off a model ``m`` is generalized against a fixed valuation
of the non-target atoms: the least one compatible with ``m``'s target values
when the grounding is Horn (always, for RDFS+), else ``m``'s own. That
valuation together with ``c`` satisfies every ground clause that mentions a
non-target atom. Any model ``M`` of T whose target diagram extends
``c`` then agrees with a propositional model of the whole grounding, i.e. with
a model ``N`` of T containing witnesses for the dropped variables; ``M`` and
``N`` share the target substructure, and the union amalgam of the two is a
model of T extending ``M`` in which ``delta`` holds. So each cube implies the
cover, and because every model of ``delta`` is blocked by some cube, their
disjunction is implied by ``delta``.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ResourceLimitError
from .grounding import GroundSolver, GroundingDomain
from .logic import (
    FALSE,
    TRUE,
    Atom,
    Concept,
    Constraint,
    Eq,
    Formula,
    Ind,
    Lit,
    Role,
    Signature,
    Term,
    Var,
    free_vars,
    from_dnf,
    individuals_of,
    sig_of,
    substitute,
    term_key,
    to_dnf,
)
from .ontology import UniversalTheory

log = logging.getLogger(__name__)

DEFAULT_MAX_CUBES = 10_000


@dataclass(frozen=True)
class TargetVocabulary:
    variables: tuple[Var, ...]
    constants: tuple[Ind, ...]
    signature: Signature = field(default_factory=Signature)

    def terms(self) -> tuple[Term, ...]:
        return self.constants + self.variables

    def atoms(self) -> list[Atom]:
        ts = self.terms()
        out: list[Atom] = [Concept(c, t) for c in sorted(self.signature.concepts) for t in ts]
        out += [Role(r, a, b) for r in sorted(self.signature.roles) for a in ts for b in ts]
        out += [Eq(a, b) for i, a in enumerate(ts) for b in ts[i + 1 :]]
        return out


@dataclass(frozen=True)
class CoverResult:
    formula: Formula
    cubes: tuple[Constraint, ...]
    eliminated: tuple[Var, ...]


class Projector:
    """Cover computation on top of a shared grounding.

    ``targets`` are the terms kept in the output; every other element of the
    solver's domain is treated as an existentially quantified witness.
    """

    def __init__(self, gs: GroundSolver, targets: Iterable[Term], max_cubes: int = DEFAULT_MAX_CUBES, minimize: bool = True):
        self.gs = gs
        self.targets = frozenset(targets)
        self.max_cubes = max_cubes
        self.minimize = minimize
        enc = gs.encoding
        self.is_target = [True] * (enc.num_vars + 1)
        for v in range(1, enc.num_vars + 1):
            a = enc.var_atoms[v]
            if a is not None and not all(t in self.targets for t in a.terms()):
                self.is_target[v] = False
        self.mixed: list[tuple[list[int], list[int]]] = []
        for c in enc.clauses:
            if any(not self.is_target[abs(l)] for l in c):
                nt = [l for l in c if not self.is_target[abs(l)]]
                tg = [l for l in c if self.is_target[abs(l)]]
                self.mixed.append((nt, tg))
        # RDFS+ groundings are Horn; then the witness part of a cube can be read
        # off the least model, which asks the least of the target literals
        self.horn = all(sum(1 for l in nt + tg if l > 0) <= 1 for nt, tg in self.mixed)
        self._body_index: dict[int, list[int]] = {}
        if self.horn:
            for k, (nt, _) in enumerate(self.mixed):
                for l in nt:
                    if l < 0:
                        self._body_index.setdefault(-l, []).append(k)

    def _is_target_lit(self, l: Lit) -> bool:
        return all(t in self.targets for t in l.atom.terms())

    def project(self, delta: Constraint) -> list[Constraint]:
        gs = self.gs
        enc = gs.encoding
        gs.maybe_rebuild()
        delta = self._inline_equalities(delta).simplified()
        if delta.is_contradictory():
            return []
        dlits = [enc.lit(l) for l in delta]
        dtarget = [enc.lit(l) for l in delta if self._is_target_lit(l)]
        dnon = [enc.lit(l) for l in delta if not self._is_target_lit(l)]
        sel = gs.new_var()
        assumptions = [sel] + dlits
        cubes: list[list[int]] = []
        try:
            while gs.solve(assumptions):
                model = gs.solver.model
                cube = self._generalize(model, dtarget, dnon)
                cubes.append(cube)
                if len(cubes) > self.max_cubes:
                    raise ResourceLimitError(f"cover enumeration exceeded {self.max_cubes} cubes")
                if not cube:
                    break
                gs.add_clause([-sel] + [-l for l in cube])
        finally:
            gs.add_clause([-sel])
        out: list[Constraint] = []
        for cube in cubes:
            lits = []
            for l in cube:
                a = enc.var_atoms[abs(l)]
                if a is None:
                    continue
                lits.append(Lit(a, l > 0))
            out.append(Constraint(tuple(lits)))
        return out

    def _inline_equalities(self, delta: Constraint) -> Constraint:
        """Substitute away ``y = t`` for eliminated ``y``; otherwise congruence makes cubes copy t's diagram."""
        while True:
            for l in delta:
                a = l.atom
                if not (l.positive and isinstance(a, Eq)) or a.is_trivial():
                    continue
                left, right = a.left, a.right
                if isinstance(right, Var) and right not in self.targets:
                    left, right = right, left
                if isinstance(left, Var) and left not in self.targets:
                    delta = Constraint(tuple(substitute(m, {left: right}) for m in delta))
                    break
            else:
                return delta

    def _least_witness(self, model: list[int], seeds: Sequence[int]) -> set[int]:
        """Least set of non-target atoms closed under the Horn clauses, targets fixed by ``model``."""

        def tfalse(l: int) -> bool:
            v = model[abs(l)]
            return v == -1 if l > 0 else v == 1

        waiting: list[int] = []
        heads: list[Optional[int]] = []
        for nt, tg in self.mixed:
            pos = [l for l in nt if l > 0]
            if pos and all(tfalse(l) for l in tg):
                heads.append(pos[0])
                waiting.append(sum(1 for l in nt if l < 0))
            else:
                heads.append(None)
                waiting.append(-1)
        on: set[int] = set()
        queue = [l for l in seeds if l > 0]
        queue += [heads[k] for k in range(len(heads)) if heads[k] is not None and waiting[k] == 0]
        while queue:
            v = queue.pop()
            if v in on:
                continue
            on.add(v)
            for k in self._body_index.get(v, ()):
                if heads[k] is None:
                    continue
                waiting[k] -= 1
                if waiting[k] == 0:
                    queue.append(heads[k])
        return on

    def _generalize(self, model: list[int], dtarget: Sequence[int], dnontarget: Sequence[int] = ()) -> list[int]:
        if self.horn:
            on = self._least_witness(model, dnontarget)

            def true(l: int) -> bool:
                if not self.is_target[abs(l)]:
                    return (l in on) if l > 0 else (-l not in on)
                v = model[abs(l)]
                return v == 1 if l > 0 else v == -1

        else:

            def true(l: int) -> bool:
                v = model[abs(l)]
                return v == 1 if l > 0 else v == -1

        chosen: dict[int, None] = dict.fromkeys(dtarget)
        pending: list[list[int]] = []
        for nt, tg in self.mixed:
            if any(true(l) for l in nt):
                continue
            cands = [l for l in tg if true(l)]
            # the model satisfies the clause, so some target literal is true
            if len(cands) == 1:
                chosen.setdefault(cands[0], None)
            else:
                pending.append(cands)
        pending = [p for p in pending if not any(l in chosen for l in p)]
        while pending:
            freq = Counter(l for p in pending for l in p)
            best = min(freq, key=lambda l: (-freq[l], abs(l), l))
            chosen[best] = None
            pending = [p for p in pending if best not in p]
        tv = self.gs.encoding.true_var
        return sorted((l for l in chosen if abs(l) != tv), key=lambda l: (abs(l), l))

    # -- cosmetic simplification (equivalence preserving modulo T) ----------

    def simplify(self, cubes: list[Constraint]) -> list[Constraint]:
        """Weaken each cube as long as it still implies the whole disjunction.

        The disjunction is already the exact cover, so any weakening that stays
        below it modulo T leaves the cover unchanged.
        """
        gs = self.gs
        cubes = list(dict.fromkeys(cubes))
        if not self.minimize:
            return drop_subsumed(gs, cubes)
        enc = gs.encoding

        def blocker(c: Constraint) -> int:
            # g -> !c, so assuming g for every cube asserts the negated disjunction
            g = gs.new_var()
            gs.add_clause([-g] + [-enc.lit(l) for l in c])
            return g

        guards = [blocker(c) for c in cubes]
        alive = set(range(len(cubes)))

        def covered_by_rest(k: int, lits: Sequence[Lit]) -> bool:
            others = [guards[j] for j in sorted(alive) if j != k]
            return not gs.solve(others + [enc.lit(l) for l in lits])

        for k in sorted(range(len(cubes)), key=lambda k: (len(cubes[k]), k)):
            own = set(cubes[k].lits)
            if any(set(cubes[j].lits) <= own for j in alive if j != k) or covered_by_rest(k, cubes[k].lits):
                alive.discard(k)
                continue
            lits = list(cubes[k].lits)
            i = 0
            while i < len(lits):
                rest = lits[:i] + lits[i + 1 :]
                others = [guards[j] for j in sorted(alive)]
                if not gs.solve(others + [enc.lit(l) for l in rest]):
                    lits = rest
                    cubes[k] = Constraint(tuple(rest))
                    guards[k] = blocker(cubes[k])
                else:
                    i += 1
            if not lits:
                return [Constraint()]
        # a later weakening can make an earlier cube redundant
        for k in sorted(alive):
            if covered_by_rest(k, cubes[k].lits):
                alive.discard(k)
        return [cubes[k] for k in sorted(alive)]

    def eliminate(self, delta: Constraint, drop: Iterable[Var] = ()) -> CoverResult:
        drop_t = tuple(sorted(set(drop) & free_vars(delta), key=term_key))
        cubes = self.simplify(self.project(delta))
        return CoverResult(from_dnf(cubes), tuple(cubes), drop_t)


def drop_subsumed(gs: GroundSolver, cubes: Sequence[Constraint]) -> list[Constraint]:
    """Remove cubes that T-entail another kept cube (first occurrence wins on ties)."""
    unique = list(dict.fromkeys(cubes))
    if any(len(c) == 0 for c in unique):
        return [Constraint()]
    keep = [True] * len(unique)
    for i, ci in enumerate(unique):
        for j, cj in enumerate(unique):
            if i == j or not keep[j] or not keep[i]:
                continue
            if gs.entails(ci.to_formula(), cj.to_formula()):
                # mutual entailment: keep the earlier one
                if j > i and gs.entails(cj.to_formula(), ci.to_formula()):
                    keep[j] = False
                else:
                    keep[i] = False
    return [c for c, k in zip(unique, keep) if k]


def _scope(theory: UniversalTheory, delta: Constraint, drop: Iterable[Var], keep: Optional[Iterable[Var]], constants: Iterable[Ind]):
    drop_set = set(drop) & free_vars(delta)
    kept = set(keep) if keep is not None else set()
    kept |= free_vars(delta) - drop_set
    kept -= drop_set
    consts = {Ind(n) for n in theory.signature().individuals} | set(individuals_of(delta)) | set(constants)
    return (
        tuple(sorted(kept, key=term_key)),
        tuple(sorted(consts, key=term_key)),
        tuple(sorted(drop_set, key=term_key)),
    )


def eliminate(
    theory: UniversalTheory,
    delta: Constraint,
    drop: Iterable[Var],
    *,
    keep: Optional[Iterable[Var]] = None,
    constants: Iterable[Ind] = (),
    signature: Optional[Signature] = None,
    max_cubes: int = DEFAULT_MAX_CUBES,
) -> CoverResult:
    """Strongest quantifier-free consequence of ``exists drop. delta`` modulo ``theory``."""
    kept, consts, dropped = _scope(theory, delta, drop, keep, constants)
    sig = theory.signature() | sig_of(delta) | (signature or Signature())
    elements = consts + kept + dropped
    gs = GroundSolver(theory, GroundingDomain(elements).elements, sig)
    proj = Projector(gs, consts + kept, max_cubes=max_cubes)
    if not dropped:
        # nothing to eliminate: delta itself is its own cover
        if not gs.is_sat(delta.to_formula()):
            return CoverResult(FALSE, (), ())
        d = delta.simplified()
        return CoverResult(d.to_formula(), (d,), ())
    return proj.eliminate(delta, dropped)


def eliminate_qff(
    theory: UniversalTheory,
    phi: Formula,
    drop: Iterable[Var],
    *,
    keep: Optional[Iterable[Var]] = None,
    constants: Iterable[Ind] = (),
    signature: Optional[Signature] = None,
) -> Formula:
    """Cover of ``exists drop. phi``, disjunct by disjunct of ``phi``'s DNF."""
    drop = list(drop)
    all_kept = set(keep or ()) | (free_vars(phi) - set(drop))
    cubes: list[Constraint] = []
    for d in to_dnf(phi):
        res = eliminate(theory, d, drop, keep=all_kept, constants=constants, signature=signature)
        cubes.extend(res.cubes)
    cubes = list(dict.fromkeys(cubes))
    if not cubes:
        return FALSE
    if any(len(c) == 0 for c in cubes):
        return TRUE
    return from_dnf(cubes)
