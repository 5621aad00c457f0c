"""Hash-consed propositional formula DAGs.

A :class:`FormulaStore` owns every node; nodes are referred to by dense
integer ids (``NodeId``).  Structurally equal nodes are interned once, so a
subformula that occurs several times in a formula is a single shared node.

Partial assignments are plain mappings from atom ids to ``bool``.  The
:func:`residual` verdict implements three-valued propagation: an unbound atom
is ``UNKNOWN`` and no logical simplification is attempted beyond the truth
tables of the connectives (so ``B | !B`` stays ``UNKNOWN`` when ``B`` is
unbound).
"""
from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from typing import NamedTuple

NodeId = int


class Kind(enum.IntEnum):
    TRUE = 0
    FALSE = 1
    ATOM = 2
    NOT = 3
    AND = 4
    OR = 5
    IMPLIES = 6
    IFF = 7


BINARY = frozenset({Kind.AND, Kind.OR, Kind.IMPLIES, Kind.IFF})


class FormulaNode(NamedTuple):
    kind: Kind
    children: tuple[NodeId, ...] = ()
    name: str | None = None


class Truth(enum.Enum):
    """Three-valued residual verdict."""

    TRUE = "T"
    FALSE = "F"
    UNKNOWN = "*"

    @classmethod
    def of(cls, value: bool | None) -> Truth:
        if value is None:
            return cls.UNKNOWN
        return cls.TRUE if value else cls.FALSE


class Polarity(enum.Flag):
    POS = 1
    NEG = 2
    BOTH = 3


class FormulaStore:
    """Interning table for formula nodes.

    The store only ever grows; ids stay valid for its whole lifetime.  Atoms
    are numbered in the order they were first interned, which is the
    canonical variable order used by the CNF encoders.
    """

    def __init__(self) -> None:
        self._nodes: list[FormulaNode] = []
        self._table: dict[FormulaNode, NodeId] = {}
        self._atoms: dict[str, NodeId] = {}

    def __len__(self) -> int:
        return len(self._nodes)

    def intern(self, kind: Kind, *children: NodeId, name: str | None = None) -> NodeId:
        kind = Kind(kind)
        if kind is Kind.ATOM:
            if not name:
                raise ValueError("atom needs a name")
            children = ()
        else:
            name = None
            arity = 1 if kind is Kind.NOT else 2 if kind in BINARY else 0
            if len(children) != arity:
                raise ValueError(f"{kind.name} takes {arity} children, got {len(children)}")
            for c in children:
                if not 0 <= c < len(self._nodes):
                    raise ValueError(f"unknown child node {c}")
        node = FormulaNode(kind, tuple(children), name)
        found = self._table.get(node)
        if found is not None:
            return found
        nid = len(self._nodes)
        self._nodes.append(node)
        self._table[node] = nid
        if kind is Kind.ATOM:
            self._atoms[name] = nid
        return nid

    # convenience constructors
    def true(self) -> NodeId:
        return self.intern(Kind.TRUE)

    def false(self) -> NodeId:
        return self.intern(Kind.FALSE)

    def atom(self, name: str) -> NodeId:
        return self.intern(Kind.ATOM, name=name)

    def not_(self, a: NodeId) -> NodeId:
        return self.intern(Kind.NOT, a)

    def and_(self, a: NodeId, b: NodeId) -> NodeId:
        return self.intern(Kind.AND, a, b)

    def or_(self, a: NodeId, b: NodeId) -> NodeId:
        return self.intern(Kind.OR, a, b)

    def implies(self, a: NodeId, b: NodeId) -> NodeId:
        return self.intern(Kind.IMPLIES, a, b)

    def iff(self, a: NodeId, b: NodeId) -> NodeId:
        return self.intern(Kind.IFF, a, b)

    def conjoin(self, items: Iterable[NodeId]) -> NodeId:
        """Left-folded conjunction; ``true`` for an empty sequence."""
        result = None
        for x in items:
            result = x if result is None else self.and_(result, x)
        return self.true() if result is None else result

    def node(self, nid: NodeId) -> FormulaNode:
        return self._nodes[nid]

    def kind(self, nid: NodeId) -> Kind:
        return self._nodes[nid].kind

    def children(self, nid: NodeId) -> tuple[NodeId, ...]:
        return self._nodes[nid].children

    def name(self, nid: NodeId) -> str:
        node = self._nodes[nid]
        if node.kind is not Kind.ATOM:
            raise ValueError(f"node {nid} is not an atom")
        return node.name

    def lookup_atom(self, name: str) -> NodeId | None:
        return self._atoms.get(name)

    def is_literal(self, nid: NodeId) -> bool:
        """True for atoms and for negations of atoms."""
        node = self._nodes[nid]
        if node.kind is Kind.ATOM:
            return True
        return node.kind is Kind.NOT and self._nodes[node.children[0]].kind is Kind.ATOM

    def atoms(self, root: NodeId) -> list[NodeId]:
        """Atoms reachable from ``root`` in first-interned order."""
        return sorted(n for n in postorder(self, root) if self._nodes[n].kind is Kind.ATOM)

    def format(self, root: NodeId) -> str:
        from cnfenum.parser import format_formula

        return format_formula(self, root)


def postorder(store: FormulaStore, *roots: NodeId) -> list[NodeId]:
    """Nodes reachable from ``roots``, each once, children before parents.

    Iterative so that deep circuits do not hit the recursion limit.
    """
    seen: set[NodeId] = set()
    out: list[NodeId] = []
    for root in roots:
        if root in seen:
            continue
        stack: list[tuple[NodeId, int]] = [(root, 0)]
        seen.add(root)
        while stack:
            nid, i = stack[-1]
            kids = store.children(nid)
            if i < len(kids):
                stack[-1] = (nid, i + 1)
                c = kids[i]
                if c not in seen:
                    seen.add(c)
                    stack.append((c, 0))
            else:
                stack.pop()
                out.append(nid)
    return out


def size(store: FormulaStore, *roots: NodeId, literal_leaves: bool = False) -> int:
    """Number of nodes plus arcs of the DAG reachable from ``roots``.

    Shared nodes are counted once; an arc is counted per child slot, so
    ``And(x, x)`` contributes two arcs.  With ``literal_leaves`` a negated
    atom is a single leaf node, which is how NNF DAGs are measured.
    """
    seen: set[NodeId] = set()
    stack = list(roots)
    total = 0
    while stack:
        nid = stack.pop()
        if nid in seen:
            continue
        seen.add(nid)
        if literal_leaves and store.is_literal(nid):
            total += 1
            continue
        kids = store.children(nid)
        total += 1 + len(kids)
        stack.extend(kids)
    return total


def parent_counts(store: FormulaStore, root: NodeId) -> dict[NodeId, int]:
    """Number of distinct parent nodes of every node below ``root``."""
    counts: dict[NodeId, int] = {n: 0 for n in postorder(store, root)}
    for nid in counts:
        for c in set(store.children(nid)):
            counts[c] += 1
    return counts


def polarities(store: FormulaStore, root: NodeId) -> dict[NodeId, Polarity]:
    """Polarity of every node reachable from ``root``.

    The root is positive; negation and the antecedent of an implication flip
    polarity; both sides of a bi-implication occur with both polarities.  A
    node reached along several paths gets the union of their polarities.
    """
    order = postorder(store, root)
    pol: dict[NodeId, Polarity] = {n: Polarity(0) for n in order}
    pol[root] = Polarity.POS
    for nid in reversed(order):  # parents before children
        p = pol[nid]
        node = store.node(nid)
        k = node.kind
        if k is Kind.NOT:
            pol[node.children[0]] |= _flip(p)
        elif k is Kind.AND or k is Kind.OR:
            a, b = node.children
            pol[a] |= p
            pol[b] |= p
        elif k is Kind.IMPLIES:
            a, b = node.children
            pol[a] |= _flip(p)
            pol[b] |= p
        elif k is Kind.IFF:
            a, b = node.children
            pol[a] |= Polarity.BOTH
            pol[b] |= Polarity.BOTH
    return pol


def _flip(p: Polarity) -> Polarity:
    out = Polarity(0)
    if Polarity.POS in p:
        out |= Polarity.NEG
    if Polarity.NEG in p:
        out |= Polarity.POS
    return out


def _and3(a, b):
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def _or3(a, b):
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


def _not3(a):
    return None if a is None else not a


def _eval3(kind: Kind, vals: list) -> bool | None:
    if kind is Kind.NOT:
        return _not3(vals[0])
    a, b = vals
    if kind is Kind.AND:
        return _and3(a, b)
    if kind is Kind.OR:
        return _or3(a, b)
    if kind is Kind.IMPLIES:
        return _or3(_not3(a), b)
    # IFF: defined only when both sides are
    if a is None or b is None:
        return None
    return a == b


def residual_values(
    store: FormulaStore, root: NodeId, mu: Mapping[NodeId, bool]
) -> dict[NodeId, bool | None]:
    """Three-valued value (``True``/``False``/``None``) of every node under ``mu``."""
    val: dict[NodeId, bool | None] = {}
    for nid in postorder(store, root):
        node = store.node(nid)
        k = node.kind
        if k is Kind.TRUE:
            val[nid] = True
        elif k is Kind.FALSE:
            val[nid] = False
        elif k is Kind.ATOM:
            val[nid] = mu.get(nid)
        else:
            val[nid] = _eval3(k, [val[c] for c in node.children])
    return val


def residual(store: FormulaStore, root: NodeId, mu: Mapping[NodeId, bool]) -> Truth:
    """Verdict of ``root`` after substituting ``mu`` and propagating truth values."""
    return Truth.of(residual_values(store, root, mu)[root])


def satisfies(store: FormulaStore, root: NodeId, mu: Mapping[NodeId, bool]) -> bool:
    """``mu`` propositionally satisfies ``root`` (residual is true)."""
    return residual(store, root, mu) is Truth.TRUE


def literals(store: FormulaStore, mu: Mapping[NodeId, bool]) -> Iterator[str]:
    """Render an assignment as ``A``/``!A`` strings in atom order."""
    for atom in sorted(mu):
        yield store.name(atom) if mu[atom] else "!" + store.name(atom)
