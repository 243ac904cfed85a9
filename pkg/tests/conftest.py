import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from blackwell import generators as gen
from blackwell.linalg import as_matrix, as_vector
from blackwell.mdp import StatStream
from blackwell.streams import EPStream

settings.register_profile("repo", deadline=None)
settings.load_profile("repo")

DATA = Path(__file__).resolve().parent.parent / "data"

SWAP = as_matrix([[0, 1], [1, 0]])
ABSORB = as_matrix([["1/2", "1/2"], [0, 1]])
IDENT = as_matrix([[1, 0], [0, 1]])
R10 = as_vector([1, 0])

# a few chains with transient states, several classes and periods 1..3
EXTRA_CHAINS = [
    as_matrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]]),
    as_matrix([["1/3", "1/3", "1/3", 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
    as_matrix([["1/2", "1/4", "1/4"], ["1/8", "3/4", "1/8"], [0, "1/2", "1/2"]]),
    as_matrix([[0, "1/2", "1/2", 0], [0, 0, 0, 1], [0, 0, 0, 1], [0, 1, 0, 0]]),
]
TEST_CHAINS = [SWAP, ABSORB, IDENT] + EXTRA_CHAINS


def random_chains(seed: int, n: int):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        size = rng.randint(1, 4)
        out.append(tuple(gen.distribution(rng, size) for _ in range(size)))
    return out


fractions = st.fractions(min_value=-2, max_value=2, max_denominator=8)


@st.composite
def ep_streams(draw, max_prefix=4, max_cycle=6):
    pre = draw(st.lists(fractions, max_size=max_prefix))
    cyc = draw(st.lists(fractions, min_size=1, max_size=max_cycle))
    return EPStream(pre, cyc)


@st.composite
def stat_streams(draw, max_states=3):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    matrix = tuple(gen.distribution(rng, n) for _ in range(n))
    rewards = tuple(gen.rational(rng) for _ in range(n))
    return StatStream(matrix, rewards, rng.randrange(n))


@pytest.fixture
def swap_pair():
    return StatStream(SWAP, R10, 0), StatStream(SWAP, R10, 1)


@pytest.fixture
def data_dir():
    return DATA


half = Fraction(1, 2)

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
