from pathlib import Path

import pytest

from stablelab.lattice import birkhoff, chain, lattice_from_pairs, poset_from_pairs

FIXTURES = Path(__file__).parent / "fixtures"

D4_PAIRS = [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]


def d4():
    return lattice_from_pairs(["0", "a", "b", "1"], D4_PAIRS)


def c3():
    return lattice_from_pairs(["0", "m", "1"], [("0", "m"), ("m", "1")])


def p5():
    return birkhoff(poset_from_pairs(["x", "y", "z"], [("x", "z"), ("y", "z")]))


@pytest.fixture
def D4():
    return d4()


@pytest.fixture
def C3():
    return c3()


@pytest.fixture
def P5():
    return p5()


@pytest.fixture
def C2():
    return chain(2)


@pytest.fixture
def fixtures():
    return FIXTURES
