"""A small CDCL SAT solver.

Two watched literals, first-UIP learning with non-chronological backjumping,
incremental clause addition, assumptions and an optional forced decision
prefix.  Restarts are off by default because the enumeration loop calls the
solver many times and benefits from a stable search order.

Literals are non-zero signed ints.  ``val`` has ``2n + 1`` slots and is
indexed by literal, relying on negative list indices: ``val[l]`` is ``1``
when ``l`` is true, ``-1`` when false and ``0`` when unassigned, and
``val[v]`` for a variable ``v`` is its value.
"""
from __future__ import annotations

import enum
import heapq
import random
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field


class Phase(enum.Enum):
    FALSE_FIRST = "false"
    TRUE_FIRST = "true"


class VarOrder(enum.Enum):
    INPUT = "input"
    ACTIVITY = "activity"


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolverConfig:
    """Decision heuristics.

    ``label_strategy`` decides label (non-important) variables before
    important ones whenever the clause structure says how: a label whose
    negative occurrences all sit in satisfied clauses is set true, and a label
    occurring negatively in an unsatisfied clause whose other open literals
    are all important is set false.  This keeps important atoms out of the
    assignment when labels alone can satisfy a clause.
    """

    phase_policy: Phase = Phase.FALSE_FIRST
    phase_caching: bool = False
    var_order: VarOrder = VarOrder.INPUT
    seed: int = 0
    restarts: bool = False
    label_strategy: bool = False


@dataclass
class SolveResult:
    status: Status
    model: list[int] | None = None  # signed literal per var, index 0 unused
    trail: list[int] = field(default_factory=list)
    under_assumptions: bool = False

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    def value(self, var: int) -> bool:
        return self.model[var] > 0


def _luby(i: int) -> int:
    # i-th element (0-based) of 1,1,2,1,1,2,4,...
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    def __init__(
        self,
        num_vars: int,
        clauses: Iterable[Sequence[int]] = (),
        important: Sequence[int] = (),
        config: SolverConfig | None = None,
    ):
        self.config = config or SolverConfig()
        self.num_vars = 0
        self.val: list[int] = [0]
        self.level: list[int] = [0]
        self.reason: list[int | None] = [None]
        self.saved: list[int] = [0]
        self.activity: list[float] = [0.0]
        self.clauses: list[list[int]] = []
        self.is_learnt: list[bool] = []
        self.watches: list[list[int]] = [[]]  # indexed by literal, like val
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.unsat = False
        self.var_inc = 1.0
        self._rng = random.Random(self.config.seed)
        self._heap: list[tuple[float, int]] = []
        self._important: list[int] = list(dict.fromkeys(important))
        self._important_set = set(self._important)
        self._order: list[int] = []
        self._pos: list[int] = [0]
        self._next = 0
        # clause-occurrence bookkeeping for the label strategy
        self._occ: dict[int, list[int]] = {}
        self._ntrue: list[int] = []
        self._resume = False
        self._last_key: tuple = ((), ())
        self.check_models = True
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0, "restarts": 0}
        self._grow(num_vars)
        for c in clauses:
            self.add_clause(c)

    @classmethod
    def from_encoding(cls, cnf, config: SolverConfig | None = None) -> Solver:
        return cls(cnf.num_vars, cnf.clauses, cnf.important, config)

    # -- variables -------------------------------------------------------
    def _grow(self, n: int) -> None:
        if n > self.num_vars:
            old = self.val
            self.val = [0] * (2 * n + 1)
            old_w = self.watches
            self.watches = [[] for _ in range(2 * n + 1)]
            for v in range(1, self.num_vars + 1):
                self.val[v] = old[v]
                self.val[-v] = -old[v]
                self.watches[v] = old_w[v]
                self.watches[-v] = old_w[-v]
        for v in range(self.num_vars + 1, n + 1):
            self.level.append(0)
            self.reason.append(None)
            self.saved.append(0)
            jitter = self._rng.random() * 1e-6 if self.config.var_order is VarOrder.ACTIVITY else 0.0
            self.activity.append(jitter)
            self._occ[v] = []
            self._occ[-v] = []
            heapq.heappush(self._heap, (-jitter, v))
        if n > self.num_vars:
            self.num_vars = n
            rest = [v for v in range(1, n + 1) if v not in self._important_set]
            self._important = [v for v in self._important if v <= n]
            self._order = self._important + rest
            self._pos = [0] * (n + 1)
            for i, v in enumerate(self._order):
                self._pos[v] = i
            self._next = 0

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def lit_value(self, lit: int) -> int:
        return self.val[lit]

    @property
    def learnts(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c, lr in zip(self.clauses, self.is_learnt) if lr]

    # -- clauses ---------------------------------------------------------
    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause permanently; returns ``False`` once the solver is UNSAT.

        A clause that is falsified by the current assignment (such as a
        blocking clause built from the last model) only undoes the decision
        levels it has to, and the next :meth:`solve` call with the same
        assumptions and prefix resumes from there.  Any other clause resets
        the search to level 0.
        """
        lits = list(dict.fromkeys(lits))
        if any(-lit in lits for lit in lits):
            return not self.unsat
        if lits:
            self._grow(max(abs(x) for x in lits))
        if self.unsat:
            return False
        if (
            self.decision_level > 0
            and lits
            and all(self.lit_value(x) < 0 for x in lits)
        ):
            return self._add_falsified(lits)
        self._resume = False
        self._cancel_until(0)
        ci = self._store(lits, learnt=False)
        if not lits:
            self.unsat = True
            return False
        # watch non-false literals first; true ones before unassigned ones
        lits.sort(key=lambda x: -self.lit_value(x))
        if self.lit_value(lits[0]) < 0:
            self.unsat = True
            return False
        if len(lits) == 1 or self.lit_value(lits[1]) < 0:
            if self.lit_value(lits[0]) == 0:
                self._enqueue(lits[0], ci if len(lits) > 1 else None)
        if len(lits) > 1:
            self.watches[-lits[0]].append(ci)
            self.watches[-lits[1]].append(ci)
        if self._propagate() is not None:
            self.unsat = True
        return not self.unsat

    def _add_falsified(self, lits: list[int]) -> bool:
        level = self.level
        lits.sort(key=lambda x: -level[abs(x)])
        top = level[abs(lits[0])]
        second = level[abs(lits[1])] if len(lits) > 1 else 0
        if top == 0:
            self._store(lits, learnt=False)
            self.unsat = True
            return False
        back = second if top > second else top - 1
        self._cancel_until(back)
        ci = self._store(lits, learnt=False)
        if len(lits) > 1:
            self.watches[-lits[0]].append(ci)
            self.watches[-lits[1]].append(ci)
        if self.lit_value(lits[0]) == 0 and (len(lits) == 1 or self.lit_value(lits[1]) < 0):
            self._enqueue(lits[0], ci if len(lits) > 1 else None)
        self._resume = True
        return True

    def _store(self, lits: list[int], learnt: bool) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.is_learnt.append(learnt)
        self._ntrue.append(sum(1 for x in lits if self.lit_value(x) > 0))
        if not learnt:
            for x in lits:
                self._occ[x].append(ci)
        return ci

    # -- trail -----------------------------------------------------------
    def _enqueue(self, lit: int, reason: int | None) -> None:
        v = abs(lit)
        self.val[lit] = 1
        self.val[-lit] = -1
        self.level[v] = self.decision_level
        self.reason[v] = reason
        self.trail.append(lit)
        if self.config.label_strategy:
            for ci in self._occ[lit]:
                self._ntrue[ci] += 1

    def _cancel_until(self, level: int) -> None:
        if self.decision_level <= level:
            return
        start = self.trail_lim[level]
        strategy = self.config.label_strategy
        for lit in reversed(self.trail[start:]):
            v = abs(lit)
            self.saved[v] = self.val[v]
            self.val[lit] = self.val[-lit] = 0
            self.reason[v] = None
            if strategy:
                for ci in self._occ[lit]:
                    self._ntrue[ci] -= 1
            heapq.heappush(self._heap, (-self.activity[v], v))
            if self._pos[v] < self._next:
                self._next = self._pos[v]
        del self.trail[start:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, len(self.trail))

    def _propagate(self) -> int | None:
        """Unit propagation; returns a conflicting clause index or ``None``."""
        val = self.val
        clauses = self.clauses
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            false_lit = -p
            ws = self.watches[p]  # clauses watching false_lit are stored under -false_lit == p
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = val[first]
                if fv > 0:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] >= 0:
                        c[1], c[k] = lk, false_lit
                        self.watches[-lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if fv < 0:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(self.trail)
                        return ci
                    self._enqueue(first, ci)
            del ws[j:]
        return None

    # -- learning --------------------------------------------------------
    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self._heap = [(-self.activity[u], u) for u in range(1, self.num_vars + 1) if self.val[u] == 0]
            heapq.heapify(self._heap)
        elif self.val[v] == 0:
            heapq.heappush(self._heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = self.decision_level
        clause = self.clauses[confl]
        while True:
            for q in clause:
                v = abs(q)
                if p is not None and v == abs(p):
                    continue
                if v not in seen and self.level[v] > 0:
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
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[abs(p)]]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    # -- decisions -------------------------------------------------------
    def _phase(self, v: int) -> int:
        if self.config.phase_caching and self.saved[v]:
            return v if self.saved[v] > 0 else -v
        return -v if self.config.phase_policy is Phase.FALSE_FIRST else v

    def _pick_by_order(self, important_only: bool) -> int | None:
        if self.config.var_order is VarOrder.INPUT:
            order, val = self._order, self.val
            while self._next < len(order) and val[order[self._next]] != 0:
                self._next += 1
            if self._next == len(order):
                return None
            v = order[self._next]
            if important_only and v not in self._important_set:
                return None
            return v
        if important_only:
            free = [v for v in self._important if self.val[v] == 0]
            return max(free, key=lambda v: (self.activity[v], -v)) if free else None
        while self._heap:
            _, v = heapq.heappop(self._heap)
            if self.val[v] == 0:
                return v
        return None

    def _pick_label_rule(self) -> int | None:
        val, occ, ntrue, clauses = self.val, self._occ, self._ntrue, self.clauses
        imp = self._important_set
        free = [v for v in self._order[len(self._important):] if val[v] == 0]
        for v in free:
            if all(ntrue[ci] > 0 for ci in occ[-v]):
                return v
        for v in free:
            for ci in occ[-v]:
                if ntrue[ci] > 0:
                    continue
                c = clauses[ci]
                if all(x == -v or val[abs(x)] != 0 or abs(x) in imp for x in c):
                    return -v
        return None

    def _decide(self, prefix: Sequence[int]) -> int | None:
        for lit in prefix:
            if self.val[abs(lit)] == 0:
                return lit
        if self.config.label_strategy:
            lit = self._pick_label_rule()
            if lit is not None:
                return lit
            v = self._pick_by_order(important_only=True)
            if v is not None:
                return self._phase(v)
        v = self._pick_by_order(important_only=False)
        return None if v is None else self._phase(v)

    # -- main loop -------------------------------------------------------
    def solve(
        self,
        assumptions: Sequence[int] = (),
        prefix: Sequence[int] = (),
        deadline: float | None = None,
    ) -> SolveResult:
        """Search for a model.

        ``assumptions`` are decided first, in order; if they cannot all hold
        the result is UNSAT with ``under_assumptions`` set and the clause set
        is untouched.  ``prefix`` literals are preferred decisions: decided
        (when still open) before any heuristic choice, but never forced.
        ``deadline`` is a :func:`time.monotonic` value; past it the result is
        UNKNOWN.
        """
        for lit in list(assumptions) + list(prefix):
            self._grow(abs(lit))
        if self.unsat:
            return SolveResult(Status.UNSAT)
        key = (tuple(assumptions), tuple(prefix))
        if not (self._resume and key == self._last_key):
            self._cancel_until(0)
        self._resume = False
        self._last_key = key
        conflicts_until_restart = 100 * _luby(0)
        n_restarts = 0
        steps = 0
        while True:
            steps += 1
            if deadline is not None and steps % 256 == 0 and time.monotonic() > deadline:
                self._cancel_until(0)
                return SolveResult(Status.UNKNOWN)
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                if self.decision_level == 0:
                    self.unsat = True
                    return SolveResult(Status.UNSAT)
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    ci = self._store(learnt, learnt=True)
                    self.watches[-learnt[0]].append(ci)
                    self.watches[-learnt[1]].append(ci)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= 0.95
                if self.config.restarts:
                    conflicts_until_restart -= 1
                    if conflicts_until_restart <= 0:
                        n_restarts += 1
                        self.stats["restarts"] += 1
                        conflicts_until_restart = 100 * _luby(n_restarts)
                        self._cancel_until(0)
                continue
            lit = None
            while self.decision_level < len(assumptions):
                a = assumptions[self.decision_level]
                va = self.lit_value(a)
                if va > 0:
                    self.trail_lim.append(len(self.trail))
                elif va < 0:
                    self._cancel_until(0)
                    return SolveResult(Status.UNSAT, under_assumptions=True)
                else:
                    lit = a
                    break
            if lit is None:
                lit = self._decide(prefix)
                if lit is None:
                    return self._model()
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def _model(self) -> SolveResult:
        val = self.val
        model = [0] + [v if val[v] > 0 else -v for v in range(1, self.num_vars + 1)]
        if self.check_models:
            for c, lr in zip(self.clauses, self.is_learnt):
                assert lr or any(model[abs(x)] == x for x in c), f"model violates clause {c}"
        return SolveResult(Status.SAT, model, list(self.trail))


def solve_clauses(
    num_vars: int,
    clauses: Iterable[Sequence[int]],
    config: SolverConfig | None = None,
    assumptions: Sequence[int] = (),
) -> SolveResult:
    """One-shot convenience wrapper."""
    return Solver(num_vars, clauses, config=config).solve(assumptions)
