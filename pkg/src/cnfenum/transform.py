"""NNF conversion and CNF encoders.

Four clausal forms are produced from a formula DAG:

* DeMorgan (``DM``): distribute disjunction over conjunction; exponential,
  used for tiny formulas and as a reference.
* Tseitin (``TS``): every non-literal proper subformula gets a label with a
  bi-implication definition.
* Plaisted-Greenbaum (``PG``): as Tseitin, but the definition is one-way when
  the subformula occurs with a single polarity.
* ``NNFPG``: PG applied to the negation normal form, where every non-literal
  subformula is positive, so every definition is ``label -> subformula``.
  Mutual-exclusion clauses between the two labels of a subformula that
  occurs with both polarities are added by default.

Literals are DIMACS-style signed integers.  Atoms take variables ``1..n`` in
first-interned order; labels follow, numbered children-first.  The root
connective is never labelled: top-level conjunctions are split and each
conjunct is clausified over the literals of its operands.
"""
from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from cnfenum.formula import FormulaStore, Kind, NodeId, Polarity, polarities, postorder, size

Clause = tuple[int, ...]


class Encoding(enum.Enum):
    DM = "demorgan"
    TS = "ts"
    PG = "pg"
    NNFPG = "nnf-pg"


@dataclass(frozen=True)
class NnfResult:
    pos_root: NodeId
    neg_root: NodeId
    node_map: dict[NodeId, tuple[NodeId, NodeId]]


@dataclass(frozen=True)
class Label:
    """Label variables of one subformula: ``pos`` names it, ``neg`` its negation."""

    pos: int | None = None
    neg: int | None = None

    @property
    def dual(self) -> bool:
        return self.pos is not None and self.neg is not None


@dataclass
class CnfEncoding:
    encoding: Encoding | None
    num_vars: int
    clauses: list[Clause]
    important: tuple[int, ...]
    atom_var: dict[NodeId, int] = field(default_factory=dict)
    label_var: dict[NodeId, int] = field(default_factory=dict)
    label_of: dict[NodeId, Label] = field(default_factory=dict)
    var_names: dict[int, str] = field(default_factory=dict)
    root: NodeId | None = None
    store: FormulaStore | None = field(default=None, repr=False, compare=False)

    @property
    def label_vars(self) -> set[int]:
        return set(range(1, self.num_vars + 1)) - set(self.important)

    @property
    def n_labels(self) -> int:
        return self.num_vars - len(self.important)

    def var_atom(self) -> dict[int, NodeId]:
        return {v: a for a, v in self.atom_var.items()}

    def decode(self, lits: Iterable[int]) -> dict[NodeId, bool]:
        """Signed literals over atom variables -> partial assignment on atoms."""
        back = self.var_atom()
        return {back[abs(lit)]: lit > 0 for lit in lits if abs(lit) in back}

    def to_lits(self, mu: Mapping[NodeId, bool]) -> list[int]:
        """Partial assignment on atoms -> sorted signed literals."""
        out = []
        for atom, value in mu.items():
            if atom not in self.atom_var:
                raise KeyError(f"atom {atom} is not encoded")
            v = self.atom_var[atom]
            out.append(v if value else -v)
        return sorted(out, key=abs)


def normalize_clause(lits: Iterable[int]) -> Clause | None:
    """Drop duplicate literals; ``None`` if the clause is a tautology."""
    seen: dict[int, None] = {}
    for lit in lits:
        if -lit in seen:
            return None
        seen[lit] = None
    return tuple(seen)


def fold_constants(store: FormulaStore, root: NodeId) -> NodeId:
    """Remove ``true``/``false`` from inside ``root`` without changing residuals."""
    T, F = store.true(), store.false()

    def neg(x):
        if x == T:
            return F
        if x == F:
            return T
        return store.not_(x)

    m: dict[NodeId, NodeId] = {}
    for nid in postorder(store, root):
        node = store.node(nid)
        k = node.kind
        if k in (Kind.TRUE, Kind.FALSE, Kind.ATOM):
            m[nid] = nid
            continue
        if k is Kind.NOT:
            m[nid] = neg(m[node.children[0]])
            continue
        a, b = (m[c] for c in node.children)
        if k is Kind.AND:
            r = F if F in (a, b) else b if a == T else a if b == T else store.and_(a, b)
        elif k is Kind.OR:
            r = T if T in (a, b) else b if a == F else a if b == F else store.or_(a, b)
        elif k is Kind.IMPLIES:
            if a == F or b == T:
                r = T
            elif a == T:
                r = b
            elif b == F:
                r = neg(a)
            else:
                r = store.implies(a, b)
        else:
            if a == T:
                r = b
            elif b == T:
                r = a
            elif a == F:
                r = neg(b)
            elif b == F:
                r = neg(a)
            else:
                r = store.iff(a, b)
        m[nid] = r
    return m[root]


def to_nnf(store: FormulaStore, root: NodeId) -> NnfResult:
    """Build the shared two-rooted DAG of ``NNF(root)`` and ``NNF(!root)``.

    Each original node maps to at most two NNF nodes, one per polarity, so the
    pair has size at most six times the input.
    """
    node_map: dict[NodeId, tuple[NodeId, NodeId]] = {}
    for nid in postorder(store, root):
        node = store.node(nid)
        k = node.kind
        if k is Kind.TRUE:
            pair = (nid, store.false())
        elif k is Kind.FALSE:
            pair = (nid, store.true())
        elif k is Kind.ATOM:
            pair = (nid, store.not_(nid))
        elif k is Kind.NOT:
            p, n = node_map[node.children[0]]
            pair = (n, p)
        else:
            p1, n1 = node_map[node.children[0]]
            p2, n2 = node_map[node.children[1]]
            if k is Kind.AND:
                pair = (store.and_(p1, p2), store.or_(n1, n2))
            elif k is Kind.OR:
                pair = (store.or_(p1, p2), store.and_(n1, n2))
            elif k is Kind.IMPLIES:
                pair = (store.or_(n1, p2), store.and_(p1, n2))
            else:
                pair = (
                    store.and_(store.or_(n1, p2), store.or_(p1, n2)),
                    store.and_(store.or_(p1, p2), store.or_(n1, n2)),
                )
        node_map[nid] = pair
    pos, neg = node_map[root]
    return NnfResult(pos, neg, node_map)


def nnf_pair_size(store: FormulaStore, nnf: NnfResult) -> int:
    """Size of the two-rooted NNF DAG; literals count as single leaves."""
    return size(store, nnf.pos_root, nnf.neg_root, literal_leaves=True)


def _default_atom_var(store: FormulaStore, root: NodeId, atoms: Sequence[NodeId] | None):
    found = store.atoms(root)
    if atoms is None:
        atoms = found
    else:
        missing = set(found) - set(atoms)
        if missing:
            names = ", ".join(store.name(a) for a in sorted(missing))
            raise ValueError(f"atoms missing from the important set: {names}")
    return {a: i + 1 for i, a in enumerate(atoms)}


def demorgan_cnf(
    store: FormulaStore, root: NodeId, atom_var: Mapping[NodeId, int] | None = None
) -> list[Clause]:
    """Equivalent CNF by distributing disjunction over conjunction.

    Exponential in the worst case.  ``atom_var`` defaults to numbering the
    atoms of ``root`` from 1 in first-interned order.
    """
    if atom_var is None:
        atom_var = _default_atom_var(store, root, None)
    nnf = to_nnf(store, fold_constants(store, root)).pos_root
    cnf: dict[NodeId, list[Clause]] = {}
    for nid in postorder(store, nnf):
        node = store.node(nid)
        k = node.kind
        if k is Kind.TRUE:
            cnf[nid] = []
        elif k is Kind.FALSE:
            cnf[nid] = [()]
        elif k is Kind.ATOM:
            cnf[nid] = [(atom_var[nid],)]
        elif k is Kind.NOT:
            # NNF: only ever over an atom
            cnf[nid] = [(-atom_var[node.children[0]],)]
        elif k is Kind.AND:
            cnf[nid] = _dedupe(cnf[node.children[0]] + cnf[node.children[1]])
        elif k is Kind.OR:
            left, right = cnf[node.children[0]], cnf[node.children[1]]
            product = (normalize_clause(a + b) for a in left for b in right)
            cnf[nid] = _dedupe(c for c in product if c is not None)
        else:  # pragma: no cover - NNF contains no other connectives
            raise AssertionError(k)
    return cnf[nnf]


def _dedupe(clauses: Iterable[Clause]) -> list[Clause]:
    seen: set[frozenset[int]] = set()
    out = []
    for c in clauses:
        key = frozenset(c)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def definition_clauses(kind: Kind, label: int, a: int, b: int, pos: bool, neg: bool) -> list[Clause]:
    """Clauses of ``label -> (a op b)`` (``pos``) and ``label <- (a op b)`` (``neg``)."""
    out: list[Clause] = []
    if kind is Kind.IMPLIES:
        kind, a = Kind.OR, -a
    if kind is Kind.AND:
        if pos:
            out += [(-label, a), (-label, b)]
        if neg:
            out.append((label, -a, -b))
    elif kind is Kind.OR:
        if pos:
            out.append((-label, a, b))
        if neg:
            out += [(label, -a), (label, -b)]
    elif kind is Kind.IFF:
        if pos:
            out += [(-label, -a, b), (-label, a, -b)]
        if neg:
            out += [(label, a, b), (label, -a, -b)]
    else:
        raise ValueError(f"cannot define a label for {kind.name}")
    return out


class _Encoder:
    """Shared Tseitin-style machinery; subclasses differ in the definition direction."""

    def __init__(self, store: FormulaStore, root: NodeId, atom_var: dict[NodeId, int]):
        self.store = store
        self.root = root
        self.atom_var = atom_var
        self.num_vars = len(atom_var)
        self.label_var: dict[NodeId, int] = {}
        self.clauses: list[Clause] = []
        self._seen: set[frozenset[int]] = set()

    def emit(self, lits: Iterable[int]) -> None:
        clause = normalize_clause(lits)
        if clause is None:
            return
        key = frozenset(clause)
        if key not in self._seen:
            self._seen.add(key)
            self.clauses.append(clause)

    def lit(self, nid: NodeId) -> int:
        node = self.store.node(nid)
        if node.kind is Kind.ATOM:
            return self.atom_var[nid]
        if node.kind is Kind.NOT:
            return -self.lit(node.children[0])
        return self.label_var[nid]

    def _strip(self, nid: NodeId) -> NodeId:
        while self.store.kind(nid) is Kind.NOT:
            nid = self.store.children(nid)[0]
        return nid

    def conjuncts(self) -> list[NodeId]:
        out: dict[NodeId, None] = {}
        stack = [self.root]
        while stack:
            nid = stack.pop()
            node = self.store.node(nid)
            if node.kind is Kind.NOT:
                inner = self.store.node(node.children[0])
                if inner.kind is Kind.NOT:
                    stack.append(inner.children[0])
                    continue
            if node.kind is Kind.AND:
                stack.extend(reversed(node.children))
            else:
                out[nid] = None
        return list(out)

    def direction(self, nid: NodeId) -> tuple[bool, bool]:
        raise NotImplementedError

    def run(self) -> None:
        store = self.store
        kind = store.kind(self.root)
        if kind is Kind.TRUE:
            return
        if kind is Kind.FALSE:
            self.clauses.append(())
            return
        tops = self.conjuncts()
        # which nodes need a label: non-literal operands, transitively
        needed: set[NodeId] = set()
        stack = []
        for c in tops:
            stack.extend(store.children(c) if store.kind(c) in _BIN else [])
            if store.kind(c) is Kind.NOT:
                stack.append(c)
        while stack:
            nid = self._strip(stack.pop())
            if store.kind(nid) is Kind.ATOM or nid in needed:
                continue
            needed.add(nid)
            stack.extend(store.children(nid))
        for nid in postorder(store, self.root):
            if nid in needed:
                self.num_vars += 1
                self.label_var[nid] = self.num_vars
        for nid in postorder(store, self.root):
            if nid not in needed:
                continue
            pos, neg = self.direction(nid)
            a, b = (self.lit(c) for c in store.children(nid))
            for clause in definition_clauses(store.kind(nid), self.label_var[nid], a, b, pos, neg):
                self.emit(clause)
        for c in tops:
            k = store.kind(c)
            if k is Kind.ATOM or k is Kind.NOT:
                self.emit([self.lit(c)])
                continue
            a, b = (self.lit(x) for x in store.children(c))
            if k is Kind.OR:
                self.emit([a, b])
            elif k is Kind.IMPLIES:
                self.emit([-a, b])
            else:
                self.emit([-a, b])
                self.emit([a, -b])


_BIN = (Kind.AND, Kind.OR, Kind.IMPLIES, Kind.IFF)


class _Tseitin(_Encoder):
    def direction(self, nid):
        return True, True


class _Plaisted(_Encoder):
    def __init__(self, store, root, atom_var):
        super().__init__(store, root, atom_var)
        self.pol = polarities(store, root)

    def direction(self, nid):
        p = self.pol[nid]
        return Polarity.POS in p, Polarity.NEG in p


def _finish(enc: _Encoder, tag: Encoding, label_of: dict[NodeId, Label]) -> CnfEncoding:
    store = enc.store
    names = {v: f"atom {store.name(a)}" for a, v in enc.atom_var.items()}
    for node, lab in label_of.items():
        if lab.pos is not None:
            names.setdefault(lab.pos, f"label pos {node}")
        if lab.neg is not None:
            names.setdefault(lab.neg, f"label neg {node}")
    for node, v in enc.label_var.items():
        names.setdefault(v, f"label pos {node}")
    return CnfEncoding(
        encoding=tag,
        num_vars=enc.num_vars,
        clauses=enc.clauses,
        important=tuple(sorted(enc.atom_var.values())),
        atom_var=dict(enc.atom_var),
        label_var=dict(enc.label_var),
        label_of=label_of,
        var_names=names,
        root=enc.root,
        store=store,
    )


def encode_tseitin(store: FormulaStore, root: NodeId, atoms: Sequence[NodeId] | None = None) -> CnfEncoding:
    """Tseitin CNF: bi-implication definitions for every labelled subformula."""
    atom_var = _default_atom_var(store, root, atoms)
    enc = _Tseitin(store, fold_constants(store, root), atom_var)
    enc.run()
    return _finish(enc, Encoding.TS, {n: Label(pos=v) for n, v in enc.label_var.items()})


def encode_pg(store: FormulaStore, root: NodeId, atoms: Sequence[NodeId] | None = None) -> CnfEncoding:
    """Plaisted-Greenbaum CNF: definition direction follows polarity."""
    atom_var = _default_atom_var(store, root, atoms)
    enc = _Plaisted(store, fold_constants(store, root), atom_var)
    enc.run()
    return _finish(enc, Encoding.PG, {n: Label(pos=v) for n, v in enc.label_var.items()})


def encode_nnf_pg(
    store: FormulaStore,
    root: NodeId,
    mutex: bool = True,
    atoms: Sequence[NodeId] | None = None,
) -> CnfEncoding:
    """Plaisted-Greenbaum CNF of the negation normal form of ``root``.

    ``label_of`` maps each binary subformula of the (constant-folded) input to
    the labels of its positive and negative NNF images.
    """
    atom_var = _default_atom_var(store, root, atoms)
    folded = fold_constants(store, root)
    nnf = to_nnf(store, folded)
    enc = _Plaisted(store, nnf.pos_root, atom_var)
    for nid in postorder(store, nnf.pos_root):
        if store.kind(nid) in _BIN:
            assert enc.pol[nid] is Polarity.POS, "NNF subformula with negative polarity"
    enc.run()
    label_of: dict[NodeId, Label] = {}
    for nid in postorder(store, folded):
        if store.kind(nid) not in _BIN:
            continue
        p, n = nnf.node_map[nid]
        lab = Label(enc.label_var.get(p), enc.label_var.get(n))
        if lab.pos is not None or lab.neg is not None:
            label_of[nid] = lab
    if mutex:
        for lab in label_of.values():
            if lab.dual:
                enc.emit([-lab.pos, -lab.neg])
    return _finish(enc, Encoding.NNFPG, label_of)


def encode_demorgan(store: FormulaStore, root: NodeId, atoms: Sequence[NodeId] | None = None) -> CnfEncoding:
    """Label-free CNF by distribution; exponential in the worst case."""
    atom_var = _default_atom_var(store, root, atoms)
    clauses = demorgan_cnf(store, root, atom_var)
    return CnfEncoding(
        encoding=Encoding.DM,
        num_vars=len(atom_var),
        clauses=clauses,
        important=tuple(sorted(atom_var.values())),
        atom_var=atom_var,
        var_names={v: f"atom {store.name(a)}" for a, v in atom_var.items()},
        root=root,
        store=store,
    )


def encode(
    store: FormulaStore,
    root: NodeId,
    encoding: Encoding | str,
    mutex: bool = True,
    atoms: Sequence[NodeId] | None = None,
) -> CnfEncoding:
    encoding = Encoding(encoding)
    if encoding is Encoding.TS:
        return encode_tseitin(store, root, atoms)
    if encoding is Encoding.PG:
        return encode_pg(store, root, atoms)
    if encoding is Encoding.NNFPG:
        return encode_nnf_pg(store, root, mutex, atoms)
    return encode_demorgan(store, root, atoms)
