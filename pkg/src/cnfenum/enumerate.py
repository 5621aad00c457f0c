"""Projected AllSAT by blocking clauses with assignment minimization.

Each round asks the solver for a total model of the current clause set,
shrinks its important part to a minimal partial assignment ``mu`` that still
satisfies the clauses together with the model's label part, emits ``mu`` and
blocks it.  In disjoint mode the minimization must also keep the earlier
blocking clauses satisfied, which makes the emitted assignments pairwise
contradictory; in non-disjoint mode it only has to satisfy the encoding, so
assignments may overlap but tend to be shorter.
"""
from __future__ import annotations

import enum
import time
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from cnfenum.formula import NodeId
from cnfenum.solver import Solver, SolverConfig, Status
from cnfenum.transform import CnfEncoding


class ContractError(ValueError):
    """A documented precondition does not hold."""


class EnumMode(enum.Enum):
    DISJOINT = "disjoint"
    NON_DISJOINT = "non-disjoint"


class RunStatus(enum.Enum):
    COMPLETE = "complete"
    TIMEOUT = "timeout"
    LIMIT = "limit"


@dataclass
class EnumStats:
    n_assignments: int = 0
    n_sat_calls: int = 0
    n_minimization_drops: int = 0
    elapsed: float = 0.0
    status: RunStatus = RunStatus.COMPLETE


@dataclass
class EnumerationResult:
    cubes: list[tuple[int, ...]] = field(default_factory=list)
    assignments: list[dict[NodeId, bool]] = field(default_factory=list)
    stats: EnumStats = field(default_factory=EnumStats)

    def __len__(self) -> int:
        return len(self.cubes)


def _as_eta(model: Sequence[int] | Mapping[int, bool]) -> dict[int, bool]:
    if isinstance(model, Mapping):
        return dict(model)
    return {abs(lit): lit > 0 for lit in model if lit}


def minimize_assignment(
    clauses: Iterable[Sequence[int]],
    model: Sequence[int] | Mapping[int, bool],
    important: Iterable[int],
    order: Sequence[int] | None = None,
) -> tuple[int, ...]:
    """Greedily drop important literals of ``model`` while every clause keeps a true literal.

    ``model`` is a total assignment, given as signed literals or as a
    ``var -> bool`` map.  Label literals are never dropped.  ``order`` lists
    the important literals in the order they are tried; by default the
    highest variable goes first.  The result is minimal: no single literal
    of it can be removed.
    """
    eta = _as_eta(model)
    important = set(important)
    missing = [v for v in important if v not in eta]
    if missing:
        raise ContractError(f"important vars unassigned: {sorted(missing)}")
    mu = {v if eta[v] else -v for v in important}
    clauses = list(clauses)
    count = []
    occ: dict[int, list[int]] = {lit: [] for lit in mu}
    for ci, c in enumerate(clauses):
        n = 0
        for lit in c:
            value = eta.get(abs(lit))
            if value is not None and value == (lit > 0):
                n += 1
                if lit in occ:
                    occ[lit].append(ci)
        if n == 0:
            raise ContractError(f"model does not satisfy clause {tuple(c)}")
        count.append(n)
    if order is None:
        order = sorted(mu, key=abs, reverse=True)
    for lit in order:
        if lit not in mu:
            continue
        if all(count[ci] > 1 for ci in occ[lit]):
            for ci in occ[lit]:
                count[ci] -= 1
            mu.discard(lit)
    return tuple(sorted(mu, key=abs))


class _Minimizer:
    """Incremental :func:`minimize_assignment` for the enumeration loop.

    Base clauses are fixed, so their literal arrays and occurrence lists are
    built once.  Blocking clauses contain only important literals and are kept
    as two boolean matrices (positive / negative literals of the blocked
    cube), which turns the per-model count of satisfied blocking clauses into
    a couple of array operations.
    """

    def __init__(self, clauses: Sequence[Sequence[int]], important: Sequence[int]):
        self.important = np.array(sorted(important), dtype=np.int64)
        self.col = {int(v): i for i, v in enumerate(self.important)}
        flat = [lit for c in clauses for lit in c]
        self.lits = np.array(flat, dtype=np.int64)
        self.vars = np.abs(self.lits)
        self.cid = np.repeat(np.arange(len(clauses)), [len(c) for c in clauses])
        self.n_clauses = len(clauses)
        occ: dict[int, list[int]] = {}
        for ci, c in enumerate(clauses):
            for lit in c:
                if abs(lit) in self.col:
                    occ.setdefault(lit, []).append(ci)
        self.occ = {lit: np.array(cis, dtype=np.int64) for lit, cis in occ.items()}
        self.empty = np.zeros(0, dtype=np.int64)
        k = len(self.important)
        self.pos = np.zeros((16, k), dtype=bool)
        self.neg = np.zeros((16, k), dtype=bool)
        self.n_blocks = 0

    def add_block(self, cube: Sequence[int]) -> None:
        if self.n_blocks == len(self.pos):
            self.pos = np.vstack([self.pos, np.zeros_like(self.pos)])
            self.neg = np.vstack([self.neg, np.zeros_like(self.neg)])
        row = self.n_blocks
        for lit in cube:
            (self.pos if lit > 0 else self.neg)[row, self.col[abs(lit)]] = True
        self.n_blocks += 1

    def minimize(self, model: Sequence[int], order: Sequence[int], with_blocks: bool) -> tuple[int, ...]:
        m = np.asarray(model, dtype=np.int64)  # m[v] is the signed literal of v
        counts = np.bincount(self.cid, weights=m[self.vars] == self.lits, minlength=self.n_clauses)
        counts = counts.astype(np.int64)
        if self.n_clauses and counts.min() == 0:
            raise ContractError("model does not satisfy the clauses")
        true_lits = None
        if with_blocks and self.n_blocks:
            pos_val = m[self.important] > 0
            nb = self.n_blocks
            true_lits = (self.pos[:nb] & ~pos_val) | (self.neg[:nb] & pos_val)
            bcount = true_lits.sum(axis=1)
            if bcount.min() == 0:
                raise ContractError("model does not satisfy a blocking clause")
        mu = {int(m[v]) for v in self.important}
        for lit in order:
            if lit not in mu:
                continue
            o = self.occ.get(lit, self.empty)
            if not (counts[o] > 1).all():
                continue
            if true_lits is not None:
                hit = true_lits[:, self.col[abs(lit)]]
                if not (bcount[hit] > 1).all():
                    continue
                bcount[hit] -= 1
            counts[o] -= 1
            mu.discard(lit)
        return tuple(sorted(mu, key=abs))


def enumerate_projected(
    cnf: CnfEncoding,
    mode: EnumMode | str = EnumMode.DISJOINT,
    config: SolverConfig | None = None,
    timeout: float | None = None,
    max_models: int | None = None,
    prefix: Sequence[int] = (),
    on_assignment: Callable[[tuple[int, ...]], None] | None = None,
) -> EnumerationResult:
    """Enumerate partial assignments over ``cnf.important`` covering all projected models.

    ``prefix`` literals are decided first in every solver call, when open.
    ``on_assignment`` is called with each cube as soon as it is found.
    """
    mode = EnumMode(mode)
    start = time.monotonic()
    deadline = None if timeout is None else start + timeout
    important = set(cnf.important)
    back = cnf.var_atom()
    solver = Solver.from_encoding(cnf, config)
    solver.check_models = False  # the minimizer re-checks every model
    minimizer = _Minimizer(cnf.clauses, cnf.important)
    disjoint = mode is EnumMode.DISJOINT
    result = EnumerationResult()
    stats = result.stats
    while True:
        if max_models is not None and stats.n_assignments >= max_models:
            stats.status = RunStatus.LIMIT
            break
        if deadline is not None and time.monotonic() > deadline:
            stats.status = RunStatus.TIMEOUT
            break
        res = solver.solve(prefix=prefix, deadline=deadline)
        stats.n_sat_calls += 1
        if res.status is Status.UNKNOWN:
            stats.status = RunStatus.TIMEOUT
            break
        if res.status is Status.UNSAT:
            stats.status = RunStatus.COMPLETE
            break
        order = [lit for lit in reversed(res.trail) if abs(lit) in important]
        cube = minimizer.minimize(res.model, order, disjoint)
        stats.n_minimization_drops += len(important) - len(cube)
        stats.n_assignments += 1
        result.cubes.append(cube)
        result.assignments.append({back[abs(lit)]: lit > 0 for lit in cube if abs(lit) in back})
        if on_assignment is not None:
            on_assignment(cube)
        minimizer.add_block(cube)
        solver.add_clause(-lit for lit in cube)
    stats.elapsed = time.monotonic() - start
    return result
