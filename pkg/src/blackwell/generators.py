"""Seeded random generators for streams and MDPs with small rational entries.

Sizes follow the desk-scale envelope: prefix <= 4, cycle <= 6, S <= 4,
|A| <= 3, denominators <= 8.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .linalg import ZERO
from .mdp import Mdp, PolicySpec, StatStream, enumerate_decision_rules, stationary_stream
from .streams import EPStream

MAX_DEN = 8


def rational(rng: random.Random, bound: int = 2, max_den: int = MAX_DEN) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def nonneg_rational(rng: random.Random, bound: int = 2, max_den: int = MAX_DEN) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, bound * den), den)


def ep_stream(rng: random.Random, max_prefix: int = 4, max_cycle: int = 6) -> EPStream:
    pre = [rational(rng) for _ in range(rng.randint(0, max_prefix))]
    cyc = [rational(rng) for _ in range(rng.randint(1, max_cycle))]
    return EPStream(pre, cyc)


def positive_ep_stream(rng: random.Random, max_prefix: int = 4, max_cycle: int = 6) -> EPStream:
    """Nonnegative and not identically zero, i.e. strictly above the zero stream."""
    while True:
        pre = [nonneg_rational(rng) if rng.random() < 0.6 else ZERO
               for _ in range(rng.randint(0, max_prefix))]
        cyc = [nonneg_rational(rng) if rng.random() < 0.6 else ZERO
               for _ in range(rng.randint(1, max_cycle))]
        if any(pre) or any(cyc):
            return EPStream(pre, cyc)


def distribution(rng: random.Random, n: int, max_den: int = MAX_DEN) -> tuple[Fraction, ...]:
    """Random probability vector on a random support; deterministic rows are common."""
    k = 1 if rng.random() < 0.4 else rng.randint(1, n)
    k = min(k, max_den)
    support = rng.sample(range(n), k)
    den = rng.randint(k, max_den)
    cuts = sorted(rng.sample(range(1, den), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    row = [ZERO] * n
    for j, c in zip(support, parts):
        row[j] = Fraction(c, den)
    return tuple(row)


def mdp(rng: random.Random, max_states: int = 4, max_actions: int = 3,
        n_states: int | None = None, n_actions: int | None = None) -> Mdp:
    n = n_states or rng.randint(1, max_states)
    m = n_actions or rng.randint(1, max_actions)
    transition = tuple(tuple(distribution(rng, n) for _ in range(n)) for _ in range(m))
    reward = tuple(tuple(rational(rng) for _ in range(n)) for _ in range(m))
    return Mdp(
        tuple(f"s{i + 1}" for i in range(n)),
        tuple(f"a{k + 1}" for k in range(m)),
        transition,
        reward,
    )


def stat_stream(rng: random.Random, max_states: int = 3, max_actions: int = 2) -> StatStream:
    model = mdp(rng, max_states, max_actions)
    f = rng.choice(enumerate_decision_rules(model))
    return stationary_stream(model, f, rng.randrange(model.n_states))


def policy(rng: random.Random, model: Mdp, max_prefix: int = 2, max_cycle: int = 3) -> PolicySpec:
    rules = enumerate_decision_rules(model)
    pre = tuple(rng.choice(rules) for _ in range(rng.randint(0, max_prefix)))
    cyc = tuple(rng.choice(rules) for _ in range(rng.randint(1, max_cycle)))
    return PolicySpec(pre, cyc)


def any_stream(rng: random.Random, p_stat: float = 0.3):
    return stat_stream(rng) if rng.random() < p_stat else ep_stream(rng)
