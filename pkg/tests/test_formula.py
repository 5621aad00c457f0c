import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnfenum import FormulaStore, Kind, Polarity, Truth, parse, residual, size
from cnfenum.formula import parent_counts, polarities, satisfies
from conftest import atom_map, random_formula


def test_intern_is_idempotent():
    s = FormulaStore()
    a, b = s.atom("A"), s.atom("B")
    assert s.and_(a, b) == s.and_(a, b)
    assert s.atom("A1") == s.atom("A1")
    assert s.and_(a, b) != s.and_(b, a)


def test_intern_rejects_bad_arity():
    s = FormulaStore()
    a = s.atom("A")
    with pytest.raises(ValueError):
        s.intern(Kind.AND, a)
    with pytest.raises(ValueError):
        s.intern(Kind.NOT, 99)


def test_double_negation_kept():
    s = FormulaStore()
    a = s.atom("A")
    assert s.not_(s.not_(a)) != a


def test_shared_subformula_has_two_parents():
    s = FormulaStore()
    root = parse(s, "((A3 | A4) & A1) | ((A3 | A4) & A2)")
    x = parse(s, "A3 | A4")
    assert parent_counts(s, root)[x] == 2


def test_atoms_in_first_interned_order(running):
    s, root = running
    assert [s.name(a) for a in s.atoms(root)] == [f"A{i}" for i in range(1, 8)]


def test_size():
    s = FormulaStore()
    a, b = s.atom("A"), s.atom("B")
    assert size(s, a) == 1
    assert size(s, s.and_(a, b)) == 5
    x = s.or_(a, b)
    # 4 nodes (And, Or, A, B) + 4 arcs (two from And to the shared Or)
    assert size(s, s.and_(x, x)) == 8


def test_polarities_running(running):
    s, root = running
    pol = polarities(s, root)
    assert pol[parse(s, "A1 & A2")] is Polarity.POS
    assert pol[parse(s, "(A3|A4)&(A5|A6)")] is Polarity.BOTH
    assert pol[parse(s, "((A3|A4)&(A5|A6)) <-> A7")] is Polarity.POS
    assert pol[root] is Polarity.POS


def test_polarities_negation_and_sharing():
    s = FormulaStore()
    x = parse(s, "A & B")
    assert polarities(s, parse(s, "!(A & B)"))[x] is Polarity.NEG
    assert polarities(s, parse(s, "(A & B) | !(A & B)"))[x] is Polarity.BOTH
    assert polarities(s, parse(s, "(A & B) -> C"))[x] is Polarity.NEG


def test_residual_examples(running):
    s = FormulaStore()
    phi1 = parse(s, "(A | B) & (A | !B)")
    phi2 = parse(s, "(A & B) | (A & !B)")
    mu = atom_map(s, A=True)
    assert residual(s, phi1, mu) is Truth.TRUE
    assert residual(s, phi2, mu) is Truth.UNKNOWN
    assert residual(s, parse(s, "B | !B"), {}) is Truth.UNKNOWN
    s, root = running
    assert residual(s, root, atom_map(s, A3=False, A4=False, A7=False)) is Truth.TRUE


T, F, U = True, False, None
# three-valued truth tables: (left, right) -> value
TABLE = {
    Kind.AND: {(T, T): T, (T, F): F, (T, U): U, (F, T): F, (F, F): F, (F, U): F, (U, T): U, (U, F): F, (U, U): U},
    Kind.OR: {(T, T): T, (T, F): T, (T, U): T, (F, T): T, (F, F): F, (F, U): U, (U, T): T, (U, F): U, (U, U): U},
    Kind.IMPLIES: {(T, T): T, (T, F): F, (T, U): U, (F, T): T, (F, F): T, (F, U): T, (U, T): T, (U, F): U, (U, U): U},
    Kind.IFF: {(T, T): T, (T, F): F, (T, U): U, (F, T): F, (F, F): T, (F, U): U, (U, T): U, (U, F): U, (U, U): U},
}


@pytest.mark.parametrize("kind", list(TABLE))
def test_three_valued_table(kind):
    s = FormulaStore()
    a, b = s.atom("A"), s.atom("B")
    node = s.intern(kind, a, b)
    for (x, y), expected in TABLE[kind].items():
        mu = {k: v for k, v in ((a, x), (b, y)) if v is not None}
        assert residual(s, node, mu) is Truth.of(expected), (kind, x, y)
    neg = s.not_(a)
    assert [residual(s, neg, mu) for mu in ({a: True}, {a: False}, {})] == [Truth.FALSE, Truth.TRUE, Truth.UNKNOWN]


def test_constants():
    s = FormulaStore()
    a = s.atom("A")
    assert residual(s, s.and_(a, s.false()), {}) is Truth.FALSE
    assert residual(s, s.or_(a, s.true()), {}) is Truth.TRUE
    assert satisfies(s, s.implies(s.false(), a), {})


def _tree_eval(s, nid, mu):
    """Unmemoized recursive evaluation: the tree-expanded reading of the DAG."""
    node = s.node(nid)
    if node.kind is Kind.TRUE:
        return True
    if node.kind is Kind.FALSE:
        return False
    if node.kind is Kind.ATOM:
        return mu.get(nid)
    vals = [_tree_eval(s, c, mu) for c in node.children]
    if node.kind is Kind.NOT:
        return None if vals[0] is None else not vals[0]
    return TABLE[node.kind][tuple(vals)]


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), depth=st.integers(0, 4), bits=st.integers(0, 3**6 - 1))
def test_residual_properties(seed, depth, bits):
    s, root = random_formula(seed, 6, depth)
    atoms = s.atoms(root)
    # decode a partial assignment from base-3 digits
    mu = {}
    for a in atoms:
        bits, d = divmod(bits, 3)
        if d < 2:
            mu[a] = bool(d)
    v = residual(s, root, mu)
    assert v is Truth.of(_tree_eval(s, root, mu))
    # monotone: extending mu never changes a definite verdict
    free = [a for a in atoms if a not in mu]
    for values in itertools.product((False, True), repeat=len(free)):
        total = {**mu, **dict(zip(free, values))}
        w = residual(s, root, total)
        assert w is not Truth.UNKNOWN
        if v is not Truth.UNKNOWN:
            assert w is v
