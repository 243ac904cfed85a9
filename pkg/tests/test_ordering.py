import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from blackwell import generators as gen
from blackwell.axioms import check_eventually_periodic, compensate, plus
from blackwell.linalg import as_vector, solve_exact
from blackwell.mdp import StatStream, enumerate_decision_rules, stationary_stream, validate_mdp
from blackwell.ordering import (
    OrderResult,
    avg_overtaking_compare,
    avg_overtaking_order,
    blackwell_compare,
    blackwell_order,
    default_K,
    find_blackwell_optimal,
    laurent_signature,
    oracle_avg_overtaking,
    oracle_discounted,
    oracle_value,
)
from blackwell.streams import EPStream, as_stat_stream

from conftest import IDENT, ep_streams, stat_streams

B, W, EQ = OrderResult.STRICTLY_BETTER, OrderResult.STRICTLY_WORSE, OrderResult.EQUIVALENT
h = Fraction(1, 2)
streams = st.one_of(ep_streams(max_prefix=3, max_cycle=4), stat_streams())
ORDERS = [blackwell_order, avg_overtaking_order]


def exact_value(u, rho):
    """``sum_t beta^t u_t`` at ``beta = 1/(1+rho)``, as ``(rho I + I - Q)^{-1} R``."""
    s = u if isinstance(u, StatStream) else as_stat_stream(u)
    n = s.n_states
    a = tuple(tuple((1 + rho if i == j else 0) - s.matrix[i][j] for j in range(n)) for i in range(n))
    return solve_exact(a, s.rewards)[s.start]


# -- examples ----------------------------------------------------------------------

def test_swap_pair_signature(swap_pair):
    u, v = swap_pair
    sig = laurent_signature(u, v)
    assert sig[-1] == 0 and sig[0] == h
    assert sig.leading() == (0, h)
    rep = blackwell_compare(u, v)
    assert rep.result is B and rep.evidence == h


def test_identical_streams_have_zero_signature(swap_pair):
    u, _ = swap_pair
    assert not any(laurent_signature(u, u).coefficients)
    assert blackwell_compare(u, u).result is EQ
    assert avg_overtaking_compare(u, u).result is EQ


def test_gain_difference_is_leading():
    ones = StatStream(IDENT, as_vector([1, 1]), 0)
    zeros = StatStream(IDENT, as_vector([0, 0]), 0)
    sig = laurent_signature(ones, zeros)
    assert sig[-1] == 1 and sig.leading() == (-1, 1)
    rep = blackwell_compare(EPStream.constant(1), EPStream.constant(0))
    assert rep.result is B and rep.evidence == math.inf


def test_blackwell_on_ep_streams():
    assert blackwell_compare(EPStream((), (1, 0)), EPStream((), (0, 1))).evidence == h


def test_avg_overtaking_examples():
    rep = avg_overtaking_compare(EPStream((), (1, 0)), EPStream((), (0, 1)))
    assert rep.result is B and rep.evidence == h
    rep = avg_overtaking_compare(EPStream((), (1, 0)), EPStream.constant(0))
    assert rep.result is B and rep.evidence == math.inf


def test_discounted_oracle_examples(swap_pair):
    u, v = swap_pair
    assert abs(oracle_discounted(u, v, 0.99) - 0.99 / 1.99) < 1e-9
    assert oracle_discounted(u, u, 0.99) == 0.0
    one, zero = EPStream.constant(1), EPStream.constant(0)
    assert abs(oracle_discounted(one, zero, 0.9) - 9.0) < 1e-9
    with pytest.raises(ValueError):
        oracle_discounted(one, zero, 1.0)


def test_oracle_on_zero_rewards():
    zero = StatStream(IDENT, as_vector([0, 0]), 1)
    assert oracle_value(zero, 0.9999) == 0.0
    half = EPStream.constant(h)
    assert abs(oracle_value(half, 0.9) - 4.5) < 1e-9
    assert abs(oracle_discounted(zero, half, 0.9) + 4.5) < 1e-9


def test_avg_overtaking_oracle_examples(swap_pair):
    u, v = swap_pair
    assert abs(oracle_avg_overtaking(u, v, 10**4) - 0.5) < 1e-3
    assert oracle_avg_overtaking(u, u, 10**4) == 0.0
    n = 10**4
    growth = oracle_avg_overtaking(EPStream((), (1, 0)), EPStream.constant(0), n)
    # partial sums grow like T/2, so their running mean is about n/4
    assert growth > 0 and abs(growth - n / 4) < 1


def test_optimal_single_action():
    m = validate_mdp({"states": ["x", "y"], "actions": ["a"],
                      "transitions": {"a": [[0, 1], [1, 0]]}, "rewards": {"a": [1, 0]}})
    assert find_blackwell_optimal(m, 0) == [(0, 0)]
    assert find_blackwell_optimal(m) == [(0, 0)]


def test_optimal_dominance():
    m = validate_mdp({"states": ["x"], "actions": ["a", "b"],
                      "transitions": {"a": [[1]], "b": [[1]]}, "rewards": {"a": [1], "b": [0]}})
    assert find_blackwell_optimal(m) == [(0,)]


def test_optimal_gain_beats_transient_reward():
    m = validate_mdp({"states": ["choice", "sink"], "actions": ["a", "b"],
                      "transitions": {"a": [[0, 1], [0, 1]], "b": [[1, 0], [0, 1]]},
                      "rewards": {"a": [1, 0], "b": ["3/4", 0]}})
    best = find_blackwell_optimal(m, 0)
    assert best and all(f[0] == 1 for f in best)
    assert find_blackwell_optimal(m, 0, pairwise=True) == best
    assert all(f[0] == 1 for f in find_blackwell_optimal(m))


# -- exact expansion against an independent evaluation -------------------------------

@settings(max_examples=40, deadline=None)
@given(stat_streams(), stat_streams())
def test_signature_matches_resolvent(u, v):
    K = 3
    sig = laurent_signature(u, v, K)
    rho = Fraction(1, 10**6)
    f = exact_value(u, rho) - exact_value(v, rho)
    series = sum(sig[k] * rho ** k for k in range(-1, K + 1))
    # the remainder is O(rho^{K+1})
    assert abs(f - series) < rho ** K


@settings(max_examples=40, deadline=None)
@given(streams, streams)
def test_default_K_pins_zero_difference(u, v):
    sig = laurent_signature(u, v)
    assert sig.K == default_K(u, v)
    if not any(sig.coefficients):
        n = 2 * sig.K + 4
        assert u.terms(n) == v.terms(n)


# -- relation properties -----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(streams, streams)
def test_trichotomy_and_antisymmetry(u, v):
    for order in ORDERS:
        r = order(u, v)
        assert isinstance(r, OrderResult)
        assert order(v, u) is r.flip()
    assert blackwell_order(u, v) is blackwell_compare(u, v).result
    assert avg_overtaking_order(u, v) is avg_overtaking_compare(u, v).result


@settings(max_examples=40, deadline=None)
@given(streams, streams, streams)
def test_transitivity(a, b, c):
    for order in ORDERS:
        ab, bc, ac = order(a, b), order(b, c), order(a, c)
        if ab is not W and bc is not W:
            assert ac is not W
        if ab is B and bc is B:
            assert ac is B
        if ab is EQ and bc is EQ:
            assert ac is EQ


@settings(max_examples=40, deadline=None)
@given(streams, st.integers(0, 2**32 - 1))
def test_monotonicity(v, seed):
    x = gen.positive_ep_stream(random.Random(seed))
    u = plus(v, x)
    for order in ORDERS:
        assert order(u, v) is B


@settings(max_examples=40, deadline=None)
@given(streams, streams, ep_streams(max_prefix=2, max_cycle=4))
def test_translation_invariance(u, v, alpha):
    for order in ORDERS:
        assert order(plus(u, alpha), plus(v, alpha)) is order(u, v)


@settings(max_examples=40, deadline=None)
@given(streams)
def test_compensation(u):
    for order in ORDERS:
        assert order(compensate(u), u) is EQ


@settings(max_examples=40, deadline=None)
@given(stat_streams(), stat_streams())
def test_criteria_coincide_on_stationary_streams(u, v):
    assert blackwell_order(u, v) is avg_overtaking_order(u, v)
    assert blackwell_compare(u, v).evidence == avg_overtaking_compare(u, v).evidence


# -- oracle consistency ------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(streams, streams)
def test_oracle_consistency(u, v):
    rep = blackwell_compare(u, v)
    lead = rep.signature.leading()
    if lead is None:
        return
    k, m = lead
    value = oracle_discounted(u, v, 1 - 1e-4)
    if abs(m) * 10.0 ** (-4 * k) > 1e-8:
        # the leading coefficient drives the sign; for k in {-1, 0} it is also the result
        assert math.copysign(1, value) == math.copysign(1, m)
        if k <= 0:
            assert OrderResult.from_sign(value) is rep.result
    if k == -1:
        lo, hi = oracle_discounted(u, v, 0.999), oracle_discounted(u, v, 0.9999)
        assert math.copysign(1, lo) == math.copysign(1, hi) == math.copysign(1, m)
        assert abs(hi) > abs(lo)


@settings(max_examples=30, deadline=None)
@given(ep_streams(), ep_streams())
def test_cesaro_oracle(u, v):
    rep = avg_overtaking_compare(u, v)
    if math.isinf(rep.evidence):
        assert math.copysign(1, oracle_avg_overtaking(u, v, 10**5)) == math.copysign(1, rep.evidence)
    else:
        assert abs(oracle_avg_overtaking(u, v, 10**5) - float(rep.evidence)) < 1e-3


# -- optimal rule search -------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linear_scan_matches_pairwise(seed):
    m = gen.mdp(random.Random(seed), max_states=3, max_actions=3)
    for s in range(m.n_states):
        assert find_blackwell_optimal(m, s) == find_blackwell_optimal(m, s, pairwise=True)
    best = find_blackwell_optimal(m)
    assert best == find_blackwell_optimal(m, pairwise=True)
    # every returned rule is weakly better than every rule at every state
    for f in best:
        for g in enumerate_decision_rules(m):
            for s in range(m.n_states):
                assert blackwell_order(stationary_stream(m, f, s), stationary_stream(m, g, s)) is not W


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_eventually_periodic_policies_coincide(seed):
    rng = random.Random(seed)
    m = gen.mdp(rng, max_states=3, max_actions=2)
    rep = check_eventually_periodic(m, rng, n_policies=5)
    assert rep.passed, rep.failures
