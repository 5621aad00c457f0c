"""Brute-force ground truth for small instances.

Total models are represented as bit-parallel truth tables: with atoms
``a_0..a_{n-1}``, bit ``k`` of a table is the value of the formula under the
assignment where ``a_i`` is true iff bit ``i`` of ``k`` is set.  Cubes map to
tables the same way, so soundness, coverage and disjointness reduce to a few
big-integer operations.

Nothing here uses the CDCL solver: label searches run on a separate, naive
DPLL so that the two can check each other.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from cnfenum.enumerate import ContractError, EnumerationResult, EnumMode
from cnfenum.formula import FormulaStore, Kind, NodeId, Truth, postorder, residual, residual_values
from cnfenum.transform import CnfEncoding, encode_nnf_pg, to_nnf

DEFAULT_BUDGET = 22


class BudgetExceeded(ValueError):
    """An exhaustive search would exceed its variable budget."""


def _check_budget(n: int, budget: int, what: str) -> None:
    if n > budget:
        raise BudgetExceeded(f"{n} {what} exceed the brute-force budget of {budget}")


def _atom_masks(n: int) -> tuple[list[int], int]:
    full = (1 << (1 << n)) - 1
    masks = []
    for i in range(n):
        period = 1 << (i + 1)
        m = ((1 << (1 << i)) - 1) << (1 << i)
        while period < (1 << n):
            m |= m << period
            period <<= 1
        masks.append(m & full)
    return masks, full


def truth_table(store: FormulaStore, root: NodeId, atoms: Sequence[NodeId]) -> int:
    """Models of ``root`` over ``atoms`` as a bitmask of assignment indices."""
    masks, full = _atom_masks(len(atoms))
    index = {a: i for i, a in enumerate(atoms)}
    table: dict[NodeId, int] = {}
    for nid in postorder(store, root):
        node = store.node(nid)
        k = node.kind
        if k is Kind.TRUE:
            t = full
        elif k is Kind.FALSE:
            t = 0
        elif k is Kind.ATOM:
            if nid not in index:
                raise ValueError(f"atom {store.name(nid)} missing from the atom list")
            t = masks[index[nid]]
        elif k is Kind.NOT:
            t = full & ~table[node.children[0]]
        else:
            a, b = (table[c] for c in node.children)
            if k is Kind.AND:
                t = a & b
            elif k is Kind.OR:
                t = a | b
            elif k is Kind.IMPLIES:
                t = (full & ~a) | b
            else:
                t = full & ~(a ^ b)
        table[nid] = t
    return table[root]


def _decode(index: int, atoms: Sequence[NodeId]) -> dict[NodeId, bool]:
    return {a: bool(index >> i & 1) for i, a in enumerate(atoms)}


def _resolve_atoms(store, root, atoms) -> list[NodeId]:
    found = store.atoms(root)
    if atoms is None:
        return found
    atoms = list(atoms)
    extra = set(found) - set(atoms)
    return atoms + sorted(extra)


def all_models(
    store: FormulaStore,
    root: NodeId,
    atoms: Sequence[NodeId] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[dict[NodeId, bool]]:
    """Every total assignment over ``atoms`` (default: those of ``root``) satisfying ``root``."""
    atoms = _resolve_atoms(store, root, atoms)
    _check_budget(len(atoms), budget, "atoms")
    table = truth_table(store, root, atoms)
    out = []
    k = 0
    while table:
        if table & 1:
            out.append(_decode(k, atoms))
        table >>= 1
        k += 1
    return out


def count_models(
    store: FormulaStore, root: NodeId, atoms: Sequence[NodeId] | None = None, budget: int = DEFAULT_BUDGET
) -> int:
    atoms = _resolve_atoms(store, root, atoms)
    _check_budget(len(atoms), budget, "atoms")
    return truth_table(store, root, atoms).bit_count()


def cube_table(cube: Mapping[NodeId, bool], atoms: Sequence[NodeId]) -> int:
    masks, full = _atom_masks(len(atoms))
    index = {a: i for i, a in enumerate(atoms)}
    t = full
    for atom, value in cube.items():
        m = masks[index[atom]]
        t &= m if value else full & ~m
    return t


@dataclass
class VerifyReport:
    sound: bool
    complete: bool
    disjoint: bool | None
    model_count: int
    n_assignments: int
    unsound: tuple[dict[NodeId, bool], dict[NodeId, bool]] | None = None  # (mu, bad total extension)
    uncovered: dict[NodeId, bool] | None = None
    overlapping: tuple[int, int] | None = None  # indices of two non-conflicting assignments

    @property
    def ok(self) -> bool:
        return self.sound and self.complete and self.disjoint is not False

    def render(self, store: FormulaStore) -> str:
        def show(mu):
            return "{" + ", ".join(store.name(a) if v else "!" + store.name(a) for a, v in sorted(mu.items())) + "}"

        lines = [
            f"assignments: {self.n_assignments}",
            f"model count: {self.model_count}",
            f"sound: {'yes' if self.sound else 'no'}",
        ]
        if self.unsound:
            lines.append(f"  {show(self.unsound[0])} extends to non-model {show(self.unsound[1])}")
        lines.append(f"complete: {'yes' if self.complete else 'no'}")
        if self.uncovered:
            lines.append(f"  uncovered model {show(self.uncovered)}")
        if self.disjoint is not None:
            lines.append(f"disjoint: {'yes' if self.disjoint else 'no'}")
            if self.overlapping:
                lines.append(f"  assignments #{self.overlapping[0]} and #{self.overlapping[1]} overlap")
        return "\n".join(lines)


def _lowest_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def verify_ta(
    store: FormulaStore,
    root: NodeId,
    ta: EnumerationResult | Iterable[Mapping[NodeId, bool]],
    mode: EnumMode | str = EnumMode.DISJOINT,
    atoms: Sequence[NodeId] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> VerifyReport:
    """Check a list of partial assignments against the models of ``root``.

    Sound: every total extension of every assignment is a model.  Complete:
    every model extends some assignment.  Disjoint (checked in disjoint mode
    only): every two assignments give some atom opposite values.
    """
    mode = EnumMode(mode)
    cubes = ta.assignments if isinstance(ta, EnumerationResult) else [dict(mu) for mu in ta]
    atoms = _resolve_atoms(store, root, atoms)
    for mu in cubes:
        atoms += sorted(a for a in mu if a not in atoms)
    _check_budget(len(atoms), budget, "atoms")
    models = truth_table(store, root, atoms)
    masks = [cube_table(mu, atoms) for mu in cubes]
    union = 0
    total = 0
    unsound = None
    for mu, m in zip(cubes, masks):
        bad = m & ~models
        if bad and unsound is None:
            unsound = (mu, _decode(_lowest_bit(bad), atoms))
        union |= m
        total += m.bit_count()
    missing = models & ~union
    report = VerifyReport(
        sound=unsound is None,
        complete=not missing,
        disjoint=None,
        model_count=models.bit_count(),
        n_assignments=len(cubes),
        unsound=unsound,
        uncovered=_decode(_lowest_bit(missing), atoms) if missing else None,
    )
    if mode is EnumMode.DISJOINT:
        report.disjoint = total == union.bit_count()
        if not report.disjoint:
            report.overlapping = _find_overlap(cubes)
    return report


def _find_overlap(cubes: Sequence[Mapping[NodeId, bool]]) -> tuple[int, int] | None:
    for i, a in enumerate(cubes):
        for j in range(i + 1, len(cubes)):
            b = cubes[j]
            if not any(atom in b and b[atom] != v for atom, v in a.items()):
                return i, j
    return None


def _dpll(clauses: list[list[int]], assignment: dict[int, bool]) -> dict[int, bool] | None:
    """Plain recursive DPLL with unit propagation."""
    while True:
        simplified = []
        unit = None
        for c in clauses:
            rest = []
            done = False
            for lit in c:
                v = assignment.get(abs(lit))
                if v is None:
                    rest.append(lit)
                elif v == (lit > 0):
                    done = True
                    break
            if done:
                continue
            if not rest:
                return None
            if len(rest) == 1 and unit is None:
                unit = rest[0]
            simplified.append(rest)
        clauses = simplified
        if unit is None:
            break
        assignment[abs(unit)] = unit > 0
    if not clauses:
        return assignment
    lit = min(clauses, key=len)[0]
    for value in (lit > 0, lit < 0):
        trial = dict(assignment)
        trial[abs(lit)] = value
        found = _dpll(clauses, trial)
        if found is not None:
            return found
    return None


def _mu_vars(cnf: CnfEncoding, mu: Mapping[NodeId, bool] | Iterable[int]) -> dict[int, bool]:
    if isinstance(mu, Mapping):
        return {cnf.atom_var[a]: v for a, v in mu.items()}
    return {abs(lit): lit > 0 for lit in mu}


def exists_etaB(
    cnf: CnfEncoding,
    mu: Mapping[NodeId, bool] | Iterable[int],
    budget: int = DEFAULT_BUDGET,
) -> dict[int, bool] | None:
    """A total label assignment that, with ``mu``, satisfies every clause, or ``None``.

    ``mu`` is a partial assignment on atoms (atom ids or signed important
    vars).  Important variables outside ``mu`` stay unassigned, so their
    literals never satisfy a clause.
    """
    fixed = _mu_vars(cnf, mu)
    important = set(cnf.important)
    labels = sorted(set(range(1, cnf.num_vars + 1)) - important)
    _check_budget(len(labels), budget, "label variables")
    residual_clauses = []
    for c in cnf.clauses:
        if any(abs(lit) in fixed and fixed[abs(lit)] == (lit > 0) for lit in c):
            continue
        rest = [lit for lit in c if abs(lit) not in important]
        if not rest:
            return None
        residual_clauses.append(rest)
    found = _dpll(residual_clauses, {})
    if found is None:
        return None
    return {v: found.get(v, False) for v in labels}


def clause_satisfied(cnf: CnfEncoding, assignment: Mapping[int, bool]) -> bool:
    """Every clause has a literal made true by the (partial) ``var -> bool`` map."""
    return all(any(assignment.get(abs(lit)) == (lit > 0) for lit in c) for c in cnf.clauses)


def construct_etaB(
    store: FormulaStore,
    phi: NodeId,
    mu: Mapping[NodeId, bool],
    cnf: CnfEncoding | None = None,
) -> dict[int, bool]:
    """Label assignment witnessing that ``mu`` satisfies the NNF+PG encoding of ``phi``.

    Every label names an NNF node; it is set true exactly when that node's
    residual under ``mu`` is true.  For a labelled subformula this gives
    ``B+ = T, B- = F`` when it is true, ``B+ = F, B- = T`` when it is false
    and both false when it is unknown.
    """
    if residual(store, phi, mu) is not Truth.TRUE:
        raise ContractError("mu does not satisfy phi")
    if cnf is None:
        cnf = encode_nnf_pg(store, phi)
    values = residual_values(store, cnf.root, mu)
    eta = {var: values[node] is True for node, var in cnf.label_var.items()}
    full = dict(eta)
    full.update(_mu_vars(cnf, mu))
    assert clause_satisfied(cnf, full), "constructed label assignment fails a clause"
    return eta


def check_nnf_residual_equiv(store: FormulaStore, phi: NodeId, mu: Mapping[NodeId, bool]) -> bool:
    """``phi`` and its NNF have the same residual verdict under ``mu``."""
    return residual(store, phi, mu) is residual(store, to_nnf(store, phi).pos_root, mu)


def projected_models(cnf: CnfEncoding, budget: int = 14) -> int:
    """Total assignments over the important vars that extend to a model of ``cnf``.

    Bit ``k`` is set when the assignment with important var ``important[i]``
    true iff bit ``i`` of ``k`` is set has a satisfying label completion.
    """
    n = len(cnf.important)
    _check_budget(n, budget, "important vars")
    out = 0
    for k in range(1 << n):
        mu = [v if k >> i & 1 else -v for i, v in enumerate(cnf.important)]
        if exists_etaB(cnf, mu, budget=10**9) is not None:
            out |= 1 << k
    return out
