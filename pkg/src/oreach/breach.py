"""Backward reachability for artifact systems over an ontology.

Frames are kept as lists of constraints over the artifact variables, each
tagged with the transition and parent disjunct it came from, so that an
intersection with the initial states can be turned back into a concrete
sequence of transitions without searching again.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

from .cover import Projector, drop_subsumed
from .errors import InconclusiveError, TraceVerificationError
from .grounding import GroundSolver, SatVerdict, sat_qff
from .logic import (
    Concept,
    Constraint,
    Formula,
    Ind,
    Role,
    Term,
    Var,
    conj,
    disj,
    free_vars,
    from_dnf,
    neg,
    sig_of,
    to_dnf,
)
from .ontology import UniversalTheory
from .sas import ArtifactSystem, build_unsafe_formula, preimage, step_name

if TYPE_CHECKING:
    from .oracle import FiniteInterpretation

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 10_000


@dataclass(frozen=True)
class Disjunct:
    constraint: Constraint
    transition: Optional[int] = None
    parent: Optional[int] = None


@dataclass
class Frame:
    index: int
    disjuncts: list[Disjunct]

    @property
    def phi(self) -> Formula:
        return from_dnf(d.constraint for d in self.disjuncts)

    @property
    def produced_by(self) -> dict[int, Optional[int]]:
        return {i: d.transition for i, d in enumerate(self.disjuncts)}


@dataclass
class StepAssignment:
    step: int
    transition: Optional[str]
    values: dict[str, str]
    params: dict[str, str]


@dataclass
class Witness:
    interpretation: "FiniteInterpretation"
    steps: list[StepAssignment]


@dataclass
class UnsafeTrace:
    indices: tuple[int, ...]
    transitions: tuple[str, ...]
    formula: Formula
    verdict: SatVerdict = field(repr=False, default=None)
    witness: Optional[Witness] = None

    @property
    def length(self) -> int:
        return len(self.indices)


@dataclass
class Verdict:
    status: str
    iterations: int
    frames: list[Frame]
    trace: Optional[UnsafeTrace] = None
    stats: dict = field(default_factory=dict)

    @property
    def safe(self) -> bool:
        return self.status == "safe"


class Breach:
    """One run of the backward search; single owner of its grounding."""

    def __init__(
        self,
        system: ArtifactSystem,
        nu: Formula,
        *,
        theory: Optional[UniversalTheory] = None,
        max_iters: int = DEFAULT_MAX_ITERS,
        check_invariants: bool = True,
        witness: bool = True,
    ):
        for t in system.transitions:
            if not t.is_case_free:
                raise ValueError(f"{t.name}: eliminate case functions before running the search")
        stray = free_vars(nu) - set(system.vars)
        if stray:
            raise ValueError(f"unsafe formula mentions non-artifact variables: {sorted(v.name for v in stray)}")
        self.system = system
        self.nu = nu
        self.theory = theory if theory is not None else system.theory()
        self.max_iters = max_iters
        self.check_invariants = check_invariants
        self.want_witness = witness
        # parameters of every transition are renamed into one shared pool
        self.pool = tuple(Var(f"_p{i}") for i in range(system.max_params))
        self.canon = [t.renamed(dict(zip(t.params, self.pool))) for t in system.transitions]
        self.consts = system.constants()
        sig = self.theory.signature() | system.signature() | sig_of(nu)
        self.targets: tuple[Term, ...] = tuple(self.consts) + tuple(system.vars)
        self.gs = GroundSolver(self.theory, self.targets + self.pool, sig)
        self.proj = Projector(self.gs, self.targets)
        self.init = system.init_formula()
        self.frames: list[Frame] = []
        self.B: list[Constraint] = []
        self.checks = {"invariant": 0, "stability": 0, "trace": 0}

    # -- helpers --------------------------------------------------------------

    def _sat(self, f: Formula) -> bool:
        return self.gs.is_sat(f)

    def _entailed_by_B(self, f: Formula) -> bool:
        return not self._sat(conj(f, neg(from_dnf(self.B))))

    def _add_to_B(self, cs: Sequence[Constraint]) -> None:
        # cosmetic: B keeps only disjuncts not subsumed by the newly added ones
        kept = [b for b in self.B if not any(self.gs.entails(b.to_formula(), c.to_formula()) for c in cs)]
        self.B = kept + list(cs)

    def _check_invariant(self) -> None:
        acc = disj(*(f.phi for f in self.frames[:-1]))
        b = from_dnf(self.B)
        if self._sat(conj(b, neg(acc))) or self._sat(conj(acc, neg(b))):
            raise AssertionError("accumulated region diverged from the union of frames")
        self.checks["invariant"] += 1

    def _check_stability(self) -> None:
        b = from_dnf(self.B)
        for c in self.B:
            for t in self.canon:
                for delta in preimage(t, c.to_formula())[0]:
                    for cube in self.proj.project(delta):
                        if self._sat(conj(cube.to_formula(), neg(b))):
                            raise AssertionError(f"region not closed under {t.name}")
        self.checks["stability"] += 1

    def _next_frame(self, frame: Frame) -> Frame:
        out: list[Disjunct] = []
        seen: set[Constraint] = set()
        for j, t in enumerate(self.canon):
            for pi, d in enumerate(frame.disjuncts):
                for delta in preimage(t, d.constraint.to_formula())[0]:
                    if self._entailed_by_B(delta.to_formula()):
                        continue
                    for cube in self.proj.simplify(self.proj.project(delta)):
                        if cube in seen or self._entailed_by_B(cube.to_formula()):
                            continue
                        seen.add(cube)
                        out.append(Disjunct(cube, j, pi))
        # drop disjuncts subsumed by another one of the same frame
        keep = set(drop_subsumed(self.gs, [d.constraint for d in out]))
        out = [d for d in out if d.constraint in keep]
        return Frame(frame.index + 1, out)

    # -- main loop ------------------------------------------------------------

    def run(self) -> Verdict:
        t0 = time.perf_counter()
        frame = Frame(0, [Disjunct(c) for c in to_dnf(self.nu)])
        self.frames = [frame]
        n = 0
        while True:
            if n >= self.max_iters:
                raise InconclusiveError(f"no verdict after {n} iterations", n)
            if self.check_invariants:
                self._check_invariant()
            log.info("iteration %d: %d disjuncts, %.2fs", n, len(frame.disjuncts), time.perf_counter() - t0)
            if not self._sat(conj(frame.phi, neg(from_dnf(self.B)))):
                if self.check_invariants:
                    self._check_stability()
                return Verdict("safe", n, self.frames, None, self._stats(t0))
            for i, d in enumerate(frame.disjuncts):
                if self._sat(conj(self.init, d.constraint.to_formula())):
                    trace = self.reconstruct_trace(n, i)
                    return Verdict("unsafe", n, self.frames, trace, self._stats(t0))
            fresh = [d.constraint for d in frame.disjuncts if not self._entailed_by_B(d.constraint.to_formula())]
            self._add_to_B(fresh)
            frame = self._next_frame(frame)
            self.frames.append(frame)
            n += 1

    def _stats(self, t0: float) -> dict:
        return {
            "elapsed": time.perf_counter() - t0,
            "sat_queries": self.gs.queries,
            "frames": [len(f.disjuncts) for f in self.frames],
            "checks": dict(self.checks),
        }

    # -- traces ---------------------------------------------------------------

    def reconstruct_trace(self, n: int, i: int) -> UnsafeTrace:
        js: list[int] = []
        k, idx = n, i
        while k > 0:
            d = self.frames[k].disjuncts[idx]
            js.append(d.transition)
            idx = d.parent
            k -= 1
        return make_trace(self.system, self.theory, self.nu, js, witness=self.want_witness, checks=self.checks)


def make_trace(
    S: ArtifactSystem, T: UniversalTheory, nu: Formula, js: Sequence[int], *, witness: bool = True, checks: Optional[dict] = None
) -> UnsafeTrace:
    """Build and re-verify the unsafe formula for ``js``; never returns an unverified trace."""
    f = build_unsafe_formula(S, nu, js)
    v = sat_qff(T, f, signature=S.signature())
    if not v.satisfiable:
        raise TraceVerificationError(f"trace {[S.transitions[j].name for j in js]} does not verify")
    if checks is not None:
        checks["trace"] += 1
    trace = UnsafeTrace(tuple(js), tuple(S.transitions[j].name for j in js), f, v)
    if witness:
        trace.witness = extract_witness(S, trace)
    return trace


def extract_witness(S: ArtifactSystem, trace: UnsafeTrace) -> Witness:
    """Read a finite model and per-step values off the satisfying assignment of the trace formula."""
    from .oracle import FiniteInterpretation

    v = trace.verdict
    classes = v.classes()
    names: dict[Term, str] = {}
    for k, cls in enumerate(classes):
        inds = sorted(t.name for t in cls if isinstance(t, Ind))
        label = inds[0] if inds else f"e{k}"
        for t in cls:
            names[t] = label
    reps = {names[cls[0]]: cls[0] for cls in classes}
    domain = sorted(reps)
    sig = S.signature()
    concepts = {c: sorted(e for e, r in reps.items() if v.witness.get(Concept(c, r), False)) for c in sorted(sig.concepts)}
    roles = {
        r: sorted((a, b) for a, ra in reps.items() for b, rb in reps.items() if v.witness.get(Role(r, ra, rb), False))
        for r in sorted(sig.roles)
    }
    constants = {t.name: names[t] for t in v.domain if isinstance(t, Ind)}
    interp = FiniteInterpretation(tuple(domain), concepts, roles, constants)

    def value(x: Var, h: int) -> str:
        t = step_name(x, h)
        t = v.aliases.get(t, t)
        return names[t]

    steps = []
    for h in range(trace.length + 1):
        name = trace.transitions[h] if h < trace.length else None
        params = {}
        if h < trace.length:
            params = {y.name: value(y, h) for y in S.transitions[trace.indices[h]].params}
        steps.append(StepAssignment(h, name, {x.name: value(x, h) for x in S.vars}, params))
    return Witness(interp, steps)


def breach(system: ArtifactSystem, nu: Formula, **kw) -> Verdict:
    return Breach(system, nu, **kw).run()
