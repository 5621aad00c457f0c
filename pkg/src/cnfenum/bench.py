"""Benchmark instances and single benchmark cells.

Random formulas nest binary operators up to a fixed depth: ``<->`` with
probability 0.1, ``&`` and ``|`` with 0.45 each, and every node (leaves
included) negated with probability 0.5.  Circuits come from ASCII AIGER files
and become formulas by constraining a fraction of their outputs.
"""
from __future__ import annotations

import math
import random
import time
from collections.abc import Iterator, Sequence
from dataclasses import asdict, dataclass

from cnfenum.enumerate import EnumMode, enumerate_projected
from cnfenum.formula import FormulaStore, Kind, NodeId
from cnfenum.oracle import BudgetExceeded, verify_ta
from cnfenum.solver import SolverConfig
from cnfenum.transform import Encoding, encode


@dataclass(frozen=True)
class RandomSpec:
    seed: int
    n_atoms: int
    depth: int
    p_iff: float = 0.1
    p_and: float = 0.45
    p_or: float = 0.45
    p_neg: float = 0.5

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be at least 1")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if not math.isclose(self.p_iff + self.p_and + self.p_or, 1.0):
            raise ValueError("operator probabilities must sum to 1")


# A random tree is nested tuples: ("atom", name), ("not", t) or (Kind, left, right).
def random_tree(spec: RandomSpec) -> tuple:
    rng = random.Random(spec.seed)
    names = [f"A{i}" for i in range(1, spec.n_atoms + 1)]
    ops = (Kind.IFF, Kind.AND, Kind.OR)
    weights = (spec.p_iff, spec.p_and, spec.p_or)

    def build(depth: int) -> tuple:
        if depth == 0:
            node = ("atom", rng.choice(names))
        else:
            op = rng.choices(ops, weights)[0]
            left = build(depth - 1)
            node = (op, left, build(depth - 1))
        if rng.random() < spec.p_neg:
            node = ("not", node)
        return node

    return build(spec.depth)


def intern_tree(store: FormulaStore, tree: tuple) -> NodeId:
    tag = tree[0]
    if tag == "atom":
        return store.atom(tree[1])
    if tag == "not":
        return store.not_(intern_tree(store, tree[1]))
    return store.intern(tag, intern_tree(store, tree[1]), intern_tree(store, tree[2]))


def gen_random(store: FormulaStore, spec: RandomSpec) -> NodeId:
    """Seeded random formula over ``A1..An``; equal specs give equal formulas."""
    for i in range(1, spec.n_atoms + 1):
        store.atom(f"A{i}")  # fix the variable order A1 < A2 < ...
    return intern_tree(store, random_tree(spec))


def random_suite(count: int, n_atoms: int, depth: int, seed: int = 0) -> Iterator[tuple[str, FormulaStore, NodeId]]:
    """``count`` independent instances, each in its own store."""
    for i in range(count):
        spec = RandomSpec(seed=seed + i, n_atoms=n_atoms, depth=depth)
        store = FormulaStore()
        yield f"rand-a{n_atoms}-d{depth}-s{seed + i}", store, gen_random(store, spec)


class AigerError(ValueError):
    pass


@dataclass
class Circuit:
    inputs: list[NodeId]
    outputs: list[NodeId]
    n_gates: int


def load_aiger(store: FormulaStore, text: str) -> Circuit:
    """Parse the combinational subset of ASCII AIGER (``aag``, no latches)."""
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise AigerError("empty input")
    header = lines[0].split()
    if len(header) != 6 or header[0] != "aag" or not all(x.isdigit() for x in header[1:]):
        raise AigerError(f"malformed header {lines[0]!r}")
    m, n_in, n_latch, n_out, n_and = map(int, header[1:])
    if n_latch:
        raise AigerError("latches are not supported")
    body = lines[1:]
    if len(body) < n_in + n_out + n_and:
        raise AigerError("file ended before all inputs, outputs and gates were read")

    def nums(i: int, count: int) -> list[int]:
        parts = body[i].split()
        if len(parts) != count or not all(p.isdigit() for p in parts):
            raise AigerError(f"line {i + 2}: expected {count} unsigned integers, got {body[i]!r}")
        vals = [int(p) for p in parts]
        for v in vals:
            if v >> 1 > m:
                raise AigerError(f"line {i + 2}: literal {v} exceeds maximum variable {m}")
        return vals

    input_vars = []
    for i in range(n_in):
        (lit,) = nums(i, 1)
        if lit < 2 or lit & 1:
            raise AigerError(f"line {i + 2}: input literal {lit} must be even and positive")
        input_vars.append(lit >> 1)
    out_lits = [nums(n_in + i, 1)[0] for i in range(n_out)]
    gates: dict[int, tuple[int, int]] = {}
    for i in range(n_and):
        lhs, a, b = nums(n_in + n_out + i, 3)
        if lhs < 2 or lhs & 1:
            raise AigerError(f"line {n_in + n_out + i + 2}: gate literal {lhs} must be even and positive")
        if lhs >> 1 in gates or lhs >> 1 in input_vars:
            raise AigerError(f"line {n_in + n_out + i + 2}: variable {lhs >> 1} defined twice")
        gates[lhs >> 1] = (a, b)
    if len(set(input_vars)) != len(input_vars):
        raise AigerError("input defined twice")
    names = {i: f"i{i + 1}" for i in range(n_in)}
    for ln in body[n_in + n_out + n_and :]:
        if ln.startswith("c"):
            break
        if ln.startswith("i") and " " in ln:
            pos, name = ln[1:].split(" ", 1)
            if pos.isdigit() and int(pos) < n_in:
                names[int(pos)] = name.strip()
    node_of: dict[int, NodeId] = {0: store.false()}
    for i, v in enumerate(input_vars):
        node_of[v] = store.atom(names[i])

    def lit_node(lit: int) -> NodeId:
        if lit == 1:
            return store.true()
        base = node_of[lit >> 1]
        return store.not_(base) if lit & 1 else base

    def resolve(var: int) -> None:
        # iterative DFS with cycle detection
        stack = [(var, False)]
        active = set()
        while stack:
            v, expanded = stack.pop()
            if v in node_of:
                continue
            if v not in gates:
                raise AigerError(f"variable {v} is used but never defined")
            a, b = gates[v]
            if expanded:
                active.discard(v)
                node_of[v] = store.and_(lit_node(a), lit_node(b))
                continue
            if v in active:
                raise AigerError(f"cyclic definition through variable {v}")
            active.add(v)
            stack.append((v, True))
            for child in (b >> 1, a >> 1):
                if child not in node_of:
                    if child in active:
                        raise AigerError(f"cyclic definition through variable {child}")
                    stack.append((child, False))

    outputs = []
    for lit in out_lits:
        resolve(lit >> 1)
        outputs.append(lit_node(lit))
    return Circuit([node_of[v] for v in input_vars], outputs, n_and)


class OutputPolicy:
    ALL_ONE = "all-one"
    ALL_ZERO = "all-zero"
    RANDOM = "random"
    CHOICES = (ALL_ONE, ALL_ZERO, RANDOM)


def constrain_outputs(
    store: FormulaStore, circuit: Circuit, fraction: float, seed: int = 0, policy: str = OutputPolicy.RANDOM
) -> NodeId:
    """Conjunction fixing ``ceil(fraction * #outputs)`` seeded-random outputs to constants."""
    if not circuit.outputs:
        raise ValueError("circuit has no outputs")
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    if policy not in OutputPolicy.CHOICES:
        raise ValueError(f"unknown policy {policy!r}")
    rng = random.Random(seed)
    n = len(circuit.outputs)
    k = min(n, math.ceil(fraction * n - 1e-9))
    chosen = sorted(rng.sample(range(n), k))
    parts = []
    for i in chosen:
        out = circuit.outputs[i]
        if policy == OutputPolicy.ALL_ONE:
            value = True
        elif policy == OutputPolicy.ALL_ZERO:
            value = False
        else:
            value = rng.random() < 0.5
        parts.append(out if value else store.not_(out))
    return store.conjoin(parts)


CSV_COLUMNS = ("instance", "encoding", "mode", "n_vars", "n_clauses", "n_labels", "n_assignments", "time_ms", "status")


@dataclass
class RunRecord:
    instance: str
    encoding: str
    mode: str
    n_vars: int = 0
    n_clauses: int = 0
    n_labels: int = 0
    n_assignments: int = 0
    time_ms: float = 0.0
    status: str = "complete"

    def row(self) -> dict:
        d = asdict(self)
        d["time_ms"] = round(self.time_ms, 3)
        return d


def run_cell(
    instance: str,
    store: FormulaStore,
    root: NodeId,
    encoding: Encoding | str,
    mode: EnumMode | str,
    config: SolverConfig | None = None,
    timeout: float | None = None,
    atoms: Sequence[NodeId] | None = None,
    verify: bool = False,
) -> RunRecord:
    """Encode and enumerate one (instance, encoding, mode) cell.

    With ``verify`` a complete run is replayed against the brute-force oracle
    when the instance fits its budget; a failed check marks the cell as an
    error.
    """
    encoding, mode = Encoding(encoding), EnumMode(mode)
    rec = RunRecord(instance, encoding.value, mode.value)
    start = time.monotonic()
    try:
        cnf = encode(store, root, encoding, atoms=atoms)
        rec.n_vars, rec.n_clauses, rec.n_labels = cnf.num_vars, len(cnf.clauses), cnf.n_labels
        left = None if timeout is None else max(0.0, timeout - (time.monotonic() - start))
        res = enumerate_projected(cnf, mode, config, timeout=left)
        rec.n_assignments = res.stats.n_assignments
        rec.status = "timeout" if res.stats.status.value == "timeout" else "complete"
        if verify and rec.status == "complete":
            try:
                if not verify_ta(store, root, res, mode, atoms=atoms).ok:
                    rec.status = "error"
            except BudgetExceeded:
                pass
    except Exception:  # a failing cell must not stop the matrix
        rec.status = "error"
    rec.time_ms = (time.monotonic() - start) * 1000
    return rec
