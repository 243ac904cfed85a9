from fractions import Fraction

import numpy as np
import pytest

from blackwell.chain import chain_structure, cycle_limit_vectors, limiting_matrix, tail_sum
from blackwell.linalg import ONE, as_vector, matmul, matvec, matpow

from conftest import ABSORB, IDENT, R10, SWAP, TEST_CHAINS, random_chains

h = Fraction(1, 2)
ALL_CHAINS = TEST_CHAINS + random_chains(7, 25)


def test_structure_examples():
    s = chain_structure(SWAP)
    assert s.recurrent_classes == ((0, 1),) and s.class_periods == (2,) and s.global_period == 2
    s = chain_structure(IDENT)
    assert s.recurrent_classes == ((0,), (1,)) and s.class_periods == (1, 1) and s.global_period == 1
    s = chain_structure(ABSORB)
    assert s.recurrent_classes == ((1,),) and s.transient_states == (0,) and s.global_period == 1


def test_limit_examples():
    assert limiting_matrix(SWAP).limiting_matrix == ((h, h), (h, h))
    assert limiting_matrix(IDENT).limiting_matrix == IDENT
    assert limiting_matrix(ABSORB).limiting_matrix == ((0, 1), (0, 1))


def test_cycle_limit_examples():
    assert cycle_limit_vectors(SWAP, R10) == [(1, 0), (0, 1)]
    assert cycle_limit_vectors(IDENT, R10) == [(1, 0)]
    assert cycle_limit_vectors(ABSORB, R10) == [(0, 0)]


@pytest.mark.parametrize("p", ALL_CHAINS)
def test_structure_invariants(p):
    s = chain_structure(p)
    members = [i for c in s.recurrent_classes for i in c] + list(s.transient_states)
    assert sorted(members) == list(range(len(p)))
    assert all(s.global_period % d == 0 for d in s.class_periods)


@pytest.mark.parametrize("p", ALL_CHAINS)
def test_limit_identities(p):
    q = limiting_matrix(p).limiting_matrix
    assert matmul(q, p) == q and matmul(p, q) == q and matmul(q, q) == q
    assert all(sum(row) == ONE and all(0 <= x <= 1 for x in row) for row in q)


def cesaro_float(p, n):
    """(1/n) sum_{t<n} P^t by plain accumulation in blocks of 1000 powers."""
    a = np.array(p, dtype=float)
    k = len(a)
    block = np.empty((1000, k, k))
    x = np.eye(k)
    for i in range(1000):
        block[i] = x
        x = x @ a
    step = x  # P^1000
    acc, base = np.zeros((k, k)), np.eye(k)
    for _ in range(n // 1000):
        acc += base @ block.sum(axis=0)
        base = base @ step
    acc += base @ block[: n % 1000].sum(axis=0)
    return acc / n


@pytest.mark.parametrize("p", TEST_CHAINS + random_chains(11, 3))
def test_limit_matches_float_cesaro(p):
    # the raw average is off by (I - P^n) H / n, so extrapolate away the 1/n term
    q = np.array(limiting_matrix(p).limiting_matrix, dtype=float)
    period = chain_structure(p).global_period
    n = 10**5 - 10**5 % period
    avg_n, avg_2n = cesaro_float(p, n), cesaro_float(p, 2 * n)
    assert np.max(np.abs(avg_n - q)) < 1e-4
    assert np.max(np.abs(2 * avg_2n - avg_n - q)) < 1e-6


@pytest.mark.parametrize("p", ALL_CHAINS)
def test_aperiodic_iff_powers_converge(p):
    a = np.array(p, dtype=float)
    p200 = np.linalg.matrix_power(a, 200)
    p201 = p200 @ a
    converged = np.max(np.abs(p201 - p200)) < 1e-9
    assert limiting_matrix(p).aperiodic == converged


@pytest.mark.parametrize("p", ALL_CHAINS)
def test_orbit_is_invariant(p):
    r = as_vector([(3 * i) % 5 - 2 for i in range(len(p))])
    orbit = cycle_limit_vectors(p, r)
    assert len(orbit) == chain_structure(p).global_period
    for j, c in enumerate(orbit):
        assert matvec(p, c) == orbit[(j + 1) % len(orbit)]
    # P^t r approaches C_{t mod p}
    t = 240 - 240 % len(orbit)
    far = np.array(matvec(matpow(p, t), r), dtype=float)
    assert np.max(np.abs(far - np.array(orbit[0], dtype=float))) < 1e-8


@pytest.mark.parametrize("p", ALL_CHAINS)
def test_tail_sum_matches_partial_sums(p):
    r = as_vector([(2 * i) % 3 - 1 for i in range(len(p))])
    orbit = [np.array(c, dtype=float) for c in cycle_limit_vectors(p, r)]
    a = np.array(p, dtype=float)
    x, acc = np.array(r, dtype=float), np.zeros(len(p))
    for t in range(3000):
        acc += x - orbit[t % len(orbit)]
        x = a @ x
    assert np.max(np.abs(acc - np.array(tail_sum(p, r), dtype=float))) < 1e-8
    assert tail_sum(ABSORB, R10) == (2, 0)
