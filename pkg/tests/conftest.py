import pytest

from cnfenum import FormulaStore, parse
from cnfenum.bench import RandomSpec, gen_random

# Running example: the iff puts (A3|A4)&(A5|A6) under both polarities.
RUNNING = "(A1 & A2) | (((A3|A4)&(A5|A6)) <-> A7)"


@pytest.fixture
def running():
    store = FormulaStore()
    return store, parse(store, RUNNING)


def atom_map(store, **values):
    """{name: bool} keyword arguments -> {atom id: bool}."""
    return {store.atom(name): v for name, v in values.items()}


def random_formula(seed: int, n_atoms: int, depth: int):
    store = FormulaStore()
    return store, gen_random(store, RandomSpec(seed=seed, n_atoms=n_atoms, depth=depth))
