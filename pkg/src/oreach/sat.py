"""A small CDCL SAT solver with assumptions.

Literals are non-zero ints in DIMACS convention. Two watched literals, 1-UIP
learning, VSIDS-style activities on a lazy heap, phase saving (initial phase
false) and Luby restarts. Deterministic for a fixed clause insertion order.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional, Sequence

from .errors import ResourceLimitError


def luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Solver:
    def __init__(self, conflict_budget: Optional[int] = None):
        self.nvars = 0
        self.value: list[int] = [0]  # per var: 0 unassigned, 1 true, -1 false
        self.level: list[int] = [0]
        self.reason: list[Optional[list[int]]] = [None]
        self.phase: list[bool] = [False]
        self.activity: list[float] = [0.0]
        self.watches: dict[int, list[list[int]]] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.model: list[int] = []
        self.conflict_budget = conflict_budget
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "solves": 0}

    # -- variables and clauses ------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.value.append(0)
        self.level.append(0)
        self.reason.append(None)
        self.phase.append(False)
        self.activity.append(0.0)
        self.watches[v] = []
        self.watches[-v] = []
        heapq.heappush(self.heap, (0.0, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.new_var()

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a permanent clause. Returns False once the formula is unsatisfiable."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        seen: set[int] = set()
        clause: list[int] = []
        for l in lits:
            if abs(l) > self.nvars:
                self.ensure_vars(abs(l))
            if -l in seen:
                return True
            if l in seen:
                continue
            val = self.lit_value(l)
            if val == 1:
                return True
            if val == -1:
                continue
            seen.add(l)
            clause.append(l)
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
                return False
            return True
        self.clauses.append(clause)
        self.watches[-clause[0]].append(clause)
        self.watches[-clause[1]].append(clause)
        return True

    # -- core -----------------------------------------------------------------

    def _enqueue(self, lit: int, reason: Optional[list[int]]) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> Optional[list[int]]:
        """Unit propagation. Watch lists are keyed by the literal whose truth
        makes the watch false, i.e. clause c sits in watches[-c[0]] and watches[-c[1]]."""
        value = self.value
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            false_lit = -p
            ws = watches[p]
            i = 0
            j = 0
            n = len(ws)
            conflict = None
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = value[first] if first > 0 else -value[-first]
                if fv == 1:
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    lv = value[lk] if lk > 0 else -value[-lk]
                    if lv != -1:
                        c[1], c[k] = lk, false_lit
                        watches[-lk].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if fv == -1:
                    conflict = c
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    break
                self._enqueue(first, c)
            del ws[j:]
            if conflict is not None:
                self.qhead = len(trail)
                return conflict
        return None

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        clause = confl
        while True:
            for q in clause:
                if p != 0 and q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] >= cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            back = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if self.level[abs(learnt[k])] > self.level[abs(learnt[best])]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = self.level[abs(learnt[1])]
        return learnt, back

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1) if self.value[u] == 0]
            heapq.heapify(self.heap)
        if self.value[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for k in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[k]
            v = abs(lit)
            self.phase[v] = lit > 0
            self.value[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick_branch(self) -> int:
        heap = self.heap
        while heap:
            _, v = heapq.heappop(heap)
            if self.value[v] == 0:
                return v if self.phase[v] else -v
        return 0

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        self.stats["solves"] += 1
        self.model = []
        if not self.ok:
            return False
        for a in assumptions:
            self.ensure_vars(abs(a))
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        conflicts_here = 0
        restart_idx = 1
        restart_limit = 100 * luby(restart_idx)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts_here += 1
                since_restart += 1
                if self.conflict_budget is not None and conflicts_here > self.conflict_budget:
                    self._cancel_until(0)
                    raise ResourceLimitError(f"SAT conflict budget of {self.conflict_budget} exhausted")
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.watches[-learnt[0]].append(learnt)
                    self.watches[-learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc *= 1.05
                continue
            if since_restart >= restart_limit:
                since_restart = 0
                restart_idx += 1
                restart_limit = 100 * luby(restart_idx)
                self._cancel_until(0)
                continue
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                val = self.lit_value(a)
                if val == -1:
                    self._cancel_until(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(a, None)
                continue
            lit = self._pick_branch()
            if lit == 0:
                self.model = [0] + [self.value[v] for v in range(1, self.nvars + 1)]
                self._cancel_until(0)
                return True
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def model_value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v == 1 if lit > 0 else v == -1


def to_dimacs(nvars: int, clauses: Sequence[Sequence[int]]) -> str:
    lines = [f"p cnf {nvars} {len(clauses)}"]
    lines.extend(" ".join(str(l) for l in c) + " 0" for c in clauses)
    return "\n".join(lines) + "\n"
