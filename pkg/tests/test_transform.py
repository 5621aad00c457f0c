import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnfenum import FormulaStore, Kind, Polarity, encode, parse, residual, size, to_nnf
from cnfenum.formula import polarities, postorder
from cnfenum.oracle import projected_models, truth_table
from cnfenum.transform import (
    Encoding,
    definition_clauses,
    demorgan_cnf,
    encode_nnf_pg,
    encode_pg,
    encode_tseitin,
    fold_constants,
    nnf_pair_size,
)
from conftest import random_formula


def clause_set(clauses):
    return {frozenset(c) for c in clauses}


def test_nnf_of_running_has_example_subterms(running):
    s, root = running
    nnf = to_nnf(s, root)
    reach = set(postorder(s, nnf.pos_root))
    for text in ["!A3 & !A4", "!A5 & !A6", "(!A3 & !A4 | !A5 & !A6) | A7", "(A3 | A4) & (A5 | A6) | !A7"]:
        assert parse(s, text) in reach, text
    pol = polarities(s, nnf.pos_root)
    assert all(pol[n] is Polarity.POS for n in reach if s.kind(n) in (Kind.AND, Kind.OR))


def test_nnf_of_atom_and_pair_size():
    s = FormulaStore()
    a = s.atom("A")
    nnf = to_nnf(s, a)
    assert (nnf.pos_root, nnf.neg_root) == (a, s.not_(a))
    assert nnf_pair_size(s, to_nnf(s, parse(s, "A <-> B"))) == 22


def test_demorgan_examples():
    s = FormulaStore()
    b1, a1, a2 = s.atom("B1"), s.atom("A1"), s.atom("A2")
    v = {b1: 1, a1: 2, a2: 3}
    got = demorgan_cnf(s, parse(s, "B1 <-> (A1 & A2)"), v)
    assert clause_set(got) == clause_set([(-1, 2), (-1, 3), (1, -2, -3)])
    b5, b4, a7 = s.atom("B5"), s.atom("B4"), s.atom("A7")
    v = {b5: 1, b4: 2, a7: 3}
    got = demorgan_cnf(s, parse(s, "B5 -> (B4 <-> A7)"), v)
    assert clause_set(got) == clause_set([(-1, 2, -3), (-1, -2, 3)])
    assert demorgan_cnf(s, s.atom("A"), {s.atom("A"): 1}) == [(1,)]


@pytest.mark.parametrize("kind", [Kind.AND, Kind.OR, Kind.IMPLIES, Kind.IFF])
def test_definition_templates_match_demorgan(kind):
    s = FormulaStore()
    b, x, y = s.atom("B"), s.atom("X"), s.atom("Y")
    v = {b: 1, x: 2, y: 3}
    node = s.intern(kind, x, y)
    assert clause_set(definition_clauses(kind, 1, 2, 3, True, False)) == clause_set(
        demorgan_cnf(s, s.implies(b, node), v)
    )
    assert clause_set(definition_clauses(kind, 1, 2, 3, False, True)) == clause_set(
        demorgan_cnf(s, s.implies(node, b), v)
    )


def _labels(s, cnf, *texts):
    return [cnf.label_var[parse(s, t)] for t in texts]


SUB = ["A1 & A2", "A3 | A4", "A5 | A6", "(A3|A4)&(A5|A6)", "((A3|A4)&(A5|A6)) <-> A7"]


def test_tseitin_running(running):
    s, root = running
    cnf = encode_tseitin(s, root)
    assert (len(cnf.clauses), cnf.num_vars, cnf.n_labels, len(cnf.important)) == (17, 12, 5, 7)
    b1, b2, b3, b4, b5 = _labels(s, cnf, *SUB)
    expected = [
        (-b1, 1), (-b1, 2), (b1, -1, -2),
        (-b2, 3, 4), (b2, -3), (b2, -4),
        (-b3, 5, 6), (b3, -5), (b3, -6),
        (-b4, b2), (-b4, b3), (b4, -b2, -b3),
        (-b5, -b4, 7), (-b5, b4, -7), (b5, b4, 7), (b5, -b4, -7),
        (b1, b5),
    ]
    assert clause_set(cnf.clauses) == clause_set(expected)
    # labels are numbered children first
    assert [b1, b2, b3, b4, b5] == [8, 9, 10, 11, 12]


def test_pg_running(running):
    s, root = running
    cnf = encode_pg(s, root)
    assert (len(cnf.clauses), cnf.num_vars) == (14, 12)
    b1, b2, b3, b4, b5 = _labels(s, cnf, *SUB)
    expected = [
        (-b1, 1), (-b1, 2),
        (-b2, 3, 4), (b2, -3), (b2, -4),
        (-b3, 5, 6), (b3, -5), (b3, -6),
        (-b4, b2), (-b4, b3), (b4, -b2, -b3),
        (-b5, -b4, 7), (-b5, b4, -7),
        (b1, b5),
    ]
    assert clause_set(cnf.clauses) == clause_set(expected)


def test_nnf_pg_running(running):
    s, root = running
    cnf = encode_nnf_pg(s, root)
    assert (len(cnf.clauses), cnf.num_vars, cnf.n_labels) == (19, 17, 10)
    duals = [lab for lab in cnf.label_of.values() if lab.dual]
    assert len(duals) == 3
    mutex = clause_set((-lab.pos, -lab.neg) for lab in duals)
    assert mutex <= clause_set(cnf.clauses)
    assert len(encode_nnf_pg(s, root, mutex=False).clauses) == 16
    # the three original nodes under the bi-implication get both labels
    for text in SUB[1:4]:
        assert cnf.label_of[parse(s, text)].dual
    assert not cnf.label_of[parse(s, SUB[0])].dual


def test_nnf_pg_definitions_are_one_way(running):
    s, root = running
    cnf = encode_nnf_pg(s, root, mutex=False)
    allowed = set()
    for node, var in cnf.label_var.items():
        a, b = (_lit(s, cnf, c) for c in s.children(node))
        allowed |= clause_set(definition_clauses(s.kind(node), var, a, b, True, False))
    top = {frozenset({cnf.label_var[parse(s, "A1 & A2")], cnf.label_var[to_nnf(s, parse(s, SUB[4])).pos_root]})}
    assert clause_set(cnf.clauses) == allowed | top


def _lit(s, cnf, nid):
    if s.kind(nid) is Kind.ATOM:
        return cnf.atom_var[nid]
    if s.kind(nid) is Kind.NOT:
        return -_lit(s, cnf, s.children(nid)[0])
    return cnf.label_var[nid]


def test_small_cases():
    s = FormulaStore()
    cnf = encode_tseitin(s, parse(s, "A1 | A2"))
    assert cnf.clauses == [(1, 2)] and cnf.n_labels == 0
    cnf = encode_nnf_pg(s, parse(s, "A & B"))
    assert clause_set(cnf.clauses) == clause_set([(1,), (2,)]) and cnf.n_labels == 0
    assert encode_pg(s, s.atom("A")).clauses == [(1,)]
    t = FormulaStore()
    cnf = encode_pg(t, parse(t, "!(A & B)"))
    assert clause_set(cnf.clauses) == clause_set([(3, -1, -2), (-3,)])


def test_tseitin_projection_of_syntactic_variant():
    s = FormulaStore()
    phi = parse(s, "(A & B) | (A & !B)")
    cnf = encode_tseitin(s, phi)
    # projected models: exactly the two total assignments with A true
    assert projected_models(cnf) == 0b1010


def test_constants_folded():
    s = FormulaStore()
    assert encode_tseitin(s, parse(s, "A | true")).clauses == []
    assert encode_pg(s, parse(s, "A & false")).clauses == [()]
    cnf = encode_nnf_pg(s, parse(s, "(A & true) | (B <-> false)"))
    assert clause_set(cnf.clauses) == clause_set([(1, -2)])


def test_explicit_important_atoms():
    s = FormulaStore()
    extra = s.atom("Z")
    phi = parse(s, "A | B")
    cnf = encode(s, phi, "ts", atoms=[s.atom("A"), s.atom("B"), extra])
    assert cnf.important == (1, 2, 3) and cnf.num_vars == 3
    with pytest.raises(ValueError):
        encode(s, phi, "pg", atoms=[s.atom("A")])


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 10**6), depth=st.integers(0, 4), enc=st.sampled_from(list(Encoding)))
def test_projection_equivalence(seed, depth, enc):
    s, root = random_formula(seed, 5, depth)
    cnf = encode(s, root, enc)
    assert projected_models(cnf) == truth_table(s, root, s.atoms(root))
    assert not set(cnf.important) & cnf.label_vars
    used = {abs(x) for c in cnf.clauses for x in c}
    assert cnf.label_vars <= used


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6), depth=st.integers(0, 6))
def test_linear_size_bounds(seed, depth):
    s, root = random_formula(seed, 10, depth)
    n = size(s, root)
    nnf = to_nnf(s, root)
    assert nnf_pair_size(s, nnf) <= 6 * n
    for enc in (Encoding.TS, Encoding.PG, Encoding.NNFPG):
        assert len(encode(s, root, enc).clauses) <= 4 * n
    pol = polarities(s, nnf.pos_root)
    assert all(p is Polarity.POS for nid, p in pol.items() if s.kind(nid) in (Kind.AND, Kind.OR))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6), depth=st.integers(1, 5))
def test_pg_equals_tseitin_under_biimplication(seed, depth):
    s, phi = random_formula(seed, 8, depth)
    root = s.iff(phi, s.atom("Z"))
    assert encode_pg(s, root).clauses == encode_tseitin(s, root).clauses


def _with_constants(s, nid, seed):
    import random

    rng = random.Random(seed)
    mapping = {}
    for n in postorder(s, nid):
        node = s.node(n)
        if node.kind is Kind.ATOM:
            r = rng.random()
            mapping[n] = s.true() if r < 0.15 else s.false() if r < 0.3 else n
        elif node.kind in (Kind.TRUE, Kind.FALSE):
            mapping[n] = n
        else:
            mapping[n] = s.intern(node.kind, *(mapping[c] for c in node.children))
    return mapping[nid]


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), depth=st.integers(0, 4), bits=st.integers(0, 3**6 - 1))
def test_folding_preserves_residuals(seed, depth, bits):
    s, phi = random_formula(seed, 6, depth)
    phi = _with_constants(s, phi, seed)
    folded = fold_constants(s, phi)
    mu = {}
    for a in s.atoms(phi):
        bits, d = divmod(bits, 3)
        if d < 2:
            mu[a] = bool(d)
    assert residual(s, folded, mu) is residual(s, phi, mu)
    assert s.kind(folded) in (Kind.TRUE, Kind.FALSE) or all(
        s.kind(n) not in (Kind.TRUE, Kind.FALSE) for n in postorder(s, folded)
    )
