import itertools
import random

import pytest

from cnfenum import FormulaStore, Truth, encode, encode_nnf_pg, encode_pg, encode_tseitin, parse, residual
from cnfenum.enumerate import ContractError, EnumMode
from cnfenum.oracle import (
    BudgetExceeded,
    all_models,
    check_nnf_residual_equiv,
    clause_satisfied,
    construct_etaB,
    count_models,
    exists_etaB,
    projected_models,
    truth_table,
    verify_ta,
)
from cnfenum.transform import Encoding
from conftest import atom_map, random_formula

MU3 = dict(A3=False, A4=False, A7=False)

# Labelled NNF subformulas of the worked example, with the value each label
# takes under {!A3, !A4, !A7}.
WITNESS_LABELS = {
    "A1 & A2": False,  # B1+
    "A3 | A4": False,  # B2+
    "!A3 & !A4": True,  # B2-
    "A5 | A6": False,  # B3+
    "!A5 & !A6": False,  # B3-
    "(A3 | A4) & (A5 | A6)": False,  # B4+
    "!A3 & !A4 | !A5 & !A6": True,  # B4-
    "(!A3 & !A4 | !A5 & !A6) | A7": True,  # B5+
    "(A3 | A4) & (A5 | A6) | !A7": True,  # B6+
    "((!A3 & !A4 | !A5 & !A6) | A7) & ((A3 | A4) & (A5 | A6) | !A7)": True,  # B7+
}


def test_all_models_examples(running):
    s = FormulaStore()
    a, b = s.atom("A"), s.atom("B")
    assert all_models(s, parse(s, "A & B")) == [{a: True, b: True}]
    assert all_models(s, parse(s, "A & !A")) == []
    st, root = running
    assert len(all_models(st, root)) == 80 == count_models(st, root)


def test_models_agree_with_residual():
    for seed in range(30):
        s, root = random_formula(seed, 5, 3)
        atoms = s.atoms(root)
        table = truth_table(s, root, atoms)
        for k in range(1 << len(atoms)):
            mu = {a: bool(k >> i & 1) for i, a in enumerate(atoms)}
            assert (residual(s, root, mu) is Truth.TRUE) == bool(table >> k & 1)


def test_budget_guard():
    s = FormulaStore()
    root = s.conjoin(s.atom(f"X{i}") for i in range(16))
    with pytest.raises(BudgetExceeded):
        all_models(s, root, budget=15)
    assert count_models(s, root, budget=16) == 1
    with pytest.raises(BudgetExceeded):
        exists_etaB(encode_tseitin(s, parse(s, "(A & B | C) & (D | E & F)")), {}, budget=1)


def test_verify_ta_examples():
    s = FormulaStore()
    root = parse(s, "A | B")
    a, b = s.atom("A"), s.atom("B")
    rep = verify_ta(s, root, [{a: True}], EnumMode.DISJOINT)
    assert rep.sound and not rep.complete and rep.uncovered == {a: False, b: True}
    rep = verify_ta(s, root, [{a: True}, {b: True}], EnumMode.DISJOINT)
    assert rep.sound and rep.complete and rep.disjoint is False
    assert rep.overlapping == (0, 1)
    rep = verify_ta(s, root, [{a: True}, {b: True}], EnumMode.NON_DISJOINT)
    assert rep.ok and rep.disjoint is None
    rep = verify_ta(s, root, [{b: False}], EnumMode.NON_DISJOINT)
    assert not rep.sound and rep.unsound[0] == {b: False}
    assert "sound: no" in rep.render(s)


def test_prefix_needs_more_under_ts_and_pg(running):
    s, root = running
    mu = atom_map(s, **MU3)
    assert residual(s, root, mu) is Truth.TRUE
    assert exists_etaB(encode_tseitin(s, root), mu) is None
    assert exists_etaB(encode_pg(s, root), mu) is None
    cnf = encode_nnf_pg(s, root)
    eta = exists_etaB(cnf, mu)
    assert eta is not None
    assert clause_satisfied(cnf, {**eta, **{cnf.atom_var[a]: v for a, v in mu.items()}})
    # signed important vars work as well
    assert exists_etaB(cnf, [-3, -4, -7]) is not None


def test_construct_etaB_reproduces_example(running):
    s, root = running
    cnf = encode_nnf_pg(s, root)
    eta = construct_etaB(s, root, atom_map(s, **MU3), cnf)
    expected = {cnf.label_var[parse(s, text)]: value for text, value in WITNESS_LABELS.items()}
    assert eta == expected


def test_construct_etaB_edge_cases():
    s = FormulaStore()
    a = s.atom("A")
    assert construct_etaB(s, a, {a: True}) == {}
    with pytest.raises(ContractError):
        construct_etaB(s, parse(s, "A & B"), {a: True})


def test_nnf_residual_examples():
    s = FormulaStore()
    phi = parse(s, "(A & B) | (A & !B)")
    mu = atom_map(s, A=True)
    assert residual(s, phi, mu) is Truth.UNKNOWN
    assert check_nnf_residual_equiv(s, phi, mu)
    phi = parse(s, "A <-> (B | !C)")
    for bits in itertools.product((False, True), repeat=3):
        assert check_nnf_residual_equiv(s, phi, atom_map(s, **dict(zip("ABC", bits))))


def minimal_models(store, root, atoms):
    """Minimal satisfying partial assignments, by brute force over all cubes."""
    sat = []
    for values in itertools.product((None, False, True), repeat=len(atoms)):
        mu = {a: v for a, v in zip(atoms, values) if v is not None}
        if residual(store, root, mu) is Truth.TRUE:
            sat.append(mu)
    keys = [frozenset(mu.items()) for mu in sat]
    return [mu for mu, k in zip(sat, keys) if not any(o < k for o in keys)]


def test_construct_etaB_on_random_minimal_assignments():
    rng = random.Random(4)
    checked = 0
    for seed in range(40):
        s, root = random_formula(seed, 5, 3)
        atoms = s.atoms(root)
        mins = minimal_models(s, root, atoms)
        cnf = encode_nnf_pg(s, root)
        for mu in rng.sample(mins, min(3, len(mins))):
            construct_etaB(s, root, mu, cnf)  # asserts clause satisfaction
            assert exists_etaB(cnf, mu) is not None
            checked += 1
    assert checked > 50


@pytest.mark.parametrize("encoding", list(Encoding))
def test_projection_soundness(encoding):
    rng = random.Random(len(encoding.value))
    for seed in range(30):
        s, root = random_formula(seed, 5, 3)
        cnf = encode(s, root, encoding)
        atoms = [cnf.var_atom()[v] for v in cnf.important]
        models = truth_table(s, root, atoms)
        assert projected_models(cnf) == models
        for _ in range(5):
            mu = {a: rng.random() < 0.5 for a in atoms if rng.random() < 0.5}
            if exists_etaB(cnf, mu) is not None:
                rep = verify_ta(s, root, [mu], EnumMode.NON_DISJOINT, atoms=atoms)
                assert rep.sound
