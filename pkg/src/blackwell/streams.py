"""Eventually periodic streams, their algebra, and the periodic-plus-tail
decomposition of stationary streams.

Streams are indexed from ``t = 1``.  An :class:`EPStream` is always kept in
canonical form: primitive cycle, minimal prefix.  Because the prefix is
minimal, the rotation of the cycle is fixed too, so equal streams have
equal representations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .chain import chain_structure, cycle_limit_vectors, gain, tail_sum
from .linalg import ONE, ZERO
from .mdp import StatStream

Extended = Union[Fraction, float]  # a Fraction, or +/-math.inf


class CertificateError(RuntimeError):
    """No decay certificate fits the sampled tail (the horizon is too short)."""


def _primitive(cycle: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    n = len(cycle)
    for d in range(1, n):
        if n % d == 0 and cycle == cycle[d:] + cycle[:d]:
            return cycle[:d]
    return cycle


@dataclass(frozen=True, init=False)
class EPStream:
    prefix: tuple[Fraction, ...]
    cycle: tuple[Fraction, ...]

    def __init__(self, prefix: Iterable = (), cycle: Iterable = (0,)):
        pre = [Fraction(x) for x in prefix]
        cyc = _primitive(tuple(Fraction(x) for x in cycle))
        if not cyc:
            raise ValueError("cycle must be nonempty")
        while pre and pre[-1] == cyc[-1]:
            pre.pop()
            cyc = cyc[-1:] + cyc[:-1]
        object.__setattr__(self, "prefix", tuple(pre))
        object.__setattr__(self, "cycle", cyc)

    @classmethod
    def constant(cls, c) -> "EPStream":
        return cls((), (c,))

    @property
    def period(self) -> int:
        return len(self.cycle)

    def at(self, t: int) -> Fraction:
        """The ``t``-th term (1-based)."""
        if t <= len(self.prefix):
            return self.prefix[t - 1]
        return self.cycle[(t - 1 - len(self.prefix)) % len(self.cycle)]

    def terms(self, horizon: int) -> list[Fraction]:
        return [self.at(t) for t in range(1, horizon + 1)]

    def __add__(self, other: "EPStream") -> "EPStream":
        return add(self, other)

    def __neg__(self) -> "EPStream":
        return negate(self)

    def __sub__(self, other: "EPStream") -> "EPStream":
        return add(self, negate(other))

    def __str__(self) -> str:
        pre = " ".join(map(str, self.prefix))
        cyc = " ".join(map(str, self.cycle))
        return f"{pre} ({cyc})..." if pre else f"({cyc})..."

    def to_dict(self) -> dict:
        return {"prefix": [str(x) for x in self.prefix], "cycle": [str(x) for x in self.cycle]}

    @classmethod
    def from_dict(cls, d: dict) -> "EPStream":
        return cls(map(Fraction, d["prefix"]), map(Fraction, d["cycle"]))


def long_run_average(u: EPStream) -> Fraction:
    return sum(u.cycle, ZERO) / len(u.cycle)


def prepend(c, u: EPStream) -> EPStream:
    """The stream ``(c, u_1, u_2, ...)``."""
    return EPStream((Fraction(c),) + u.prefix, u.cycle)


def add(u: EPStream, v: EPStream) -> EPStream:
    n_pre = max(len(u.prefix), len(v.prefix))
    n_cyc = math.lcm(len(u.cycle), len(v.cycle))
    pre = [u.at(t) + v.at(t) for t in range(1, n_pre + 1)]
    cyc = [u.at(t) + v.at(t) for t in range(n_pre + 1, n_pre + n_cyc + 1)]
    return EPStream(pre, cyc)


def negate(u: EPStream) -> EPStream:
    return EPStream([-x for x in u.prefix], [-x for x in u.cycle])


def scale(c, u: EPStream) -> EPStream:
    c = Fraction(c)
    return EPStream([c * x for x in u.prefix], [c * x for x in u.cycle])


def dominates(u: EPStream, v: EPStream) -> bool:
    """``u_t >= v_t`` for all ``t`` with strict inequality somewhere."""
    d = u - v
    window = d.prefix + d.cycle
    return all(x >= 0 for x in window) and any(x > 0 for x in window)


def cesaro_of_partial_sums(d: EPStream) -> Extended:
    """``lim (1/n) sum_{T<=n} S_T`` with ``S_T = d_1 + ... + d_T``.

    Returns ``+inf``/``-inf`` when one cycle has positive/negative sum;
    otherwise ``S_T`` is periodic beyond the prefix and the limit is its
    exact mean over one period.
    """
    sigma = sum(d.cycle, ZERO)
    if sigma > 0:
        return math.inf
    if sigma < 0:
        return -math.inf
    s = sum(d.prefix, ZERO)
    acc = ZERO
    for x in d.cycle:
        s += x
        acc += s
    return acc / len(d.cycle)


# -- stationary streams -------------------------------------------------------

def memo(u: StatStream, name: str, compute):
    """Cache a derived value on the (immutable) stream instance."""
    cache = u.__dict__
    if name not in cache:
        cache[name] = compute()
    return cache[name]


def stream_gain(u: StatStream) -> Fraction:
    """Long-run average ``[P* R]_s`` of a stationary stream."""
    return memo(u, "_gain", lambda: gain(u.matrix, u.rewards)[u.start])


def periodic_part(u: StatStream) -> EPStream:
    """``w_t = [C_{(t-1) mod p}]_s`` for all ``t >= 1``; a pure cycle."""
    def compute():
        orbit = cycle_limit_vectors(u.matrix, u.rewards)
        return EPStream((), [c[u.start] for c in orbit])
    return memo(u, "_periodic", compute)


def tail_total(u: StatStream) -> Fraction:
    """Exact ``sum_{t>=1} (u_t - w_t)``; the series converges geometrically."""
    return memo(u, "_tail", lambda: tail_sum(u.matrix, u.rewards)[u.start])


@dataclass(frozen=True)
class DecayCertificate:
    """``|D_{t+p}| <= q |D_t|`` for sampled ``t >= onset`` (``kind="ratio"``), or
    the weaker envelope ``|D_t| <= M q^floor((t-onset)/p)`` (``kind="envelope"``)
    with ``M`` the largest ``|D|`` over the first period from ``onset``."""

    q: Fraction
    onset: int
    kind: str = "ratio"


@dataclass(frozen=True)
class Decomposition:
    periodic_part: EPStream
    period: int
    tail_samples: tuple[Fraction, ...]   # D_1 .. D_horizon
    decay_certificate: DecayCertificate
    tail_sum: Fraction = field(default=ZERO)

    @property
    def horizon(self) -> int:
        return len(self.tail_samples)

    def envelope_bound(self, t: int) -> Fraction:
        """Upper bound on ``|D_t|`` implied by the certificate (``t >= onset``)."""
        cert = self.decay_certificate
        first = self.tail_samples[cert.onset - 1: cert.onset - 1 + self.period]
        m = max((abs(x) for x in first), default=ZERO)
        return m * cert.q ** ((t - cert.onset) // self.period)


def default_horizon(u: StatStream) -> int:
    p = chain_structure(u.matrix).global_period
    return max(u.n_states * p + 2 * p, 64)


def decompose(u: StatStream, horizon: int | None = None) -> Decomposition:
    """Split a stationary stream into its exact periodic limit plus a vanishing tail."""
    p = chain_structure(u.matrix).global_period
    if horizon is None:
        horizon = default_horizon(u)
    if horizon < u.n_states * p + 2 * p:
        raise ValueError(f"horizon {horizon} < S*p + 2p = {u.n_states * p + 2 * p}")
    w = periodic_part(u)
    terms = u.terms(horizon)
    delta = tuple(x - w.at(t) for t, x in enumerate(terms, start=1))
    cert = fit_certificate(delta, p)
    return Decomposition(w, p, delta, cert, tail_total(u))


def fit_certificate(delta: Sequence[Fraction], p: int) -> DecayCertificate:
    """Fit ``(q, onset)`` to sampled tail values ``delta[0] = D_1``.

    Tries the per-period ratio test first, requiring it to hold on at least
    two full periods; falls back to an envelope bound for tails whose
    individual terms cross zero.
    """
    h = len(delta)
    mags = [abs(x) for x in delta]
    if not any(mags):
        return DecayCertificate(Fraction(1, 2), 1)
    # ratio test: find the earliest onset after which every ratio is < 1
    onset = 1
    for t in range(h - p, 0, -1):
        a, b = mags[t - 1], mags[t - 1 + p]
        if (a == 0 and b != 0) or (a != 0 and b >= a):
            onset = t + 1
            break
    if onset + 2 * p <= h:
        ratios = [mags[t - 1 + p] / mags[t - 1] for t in range(onset, h - p + 1) if mags[t - 1]]
        q = max(ratios, default=ZERO)
        return DecayCertificate(q if q > 0 else Fraction(1, 2), onset)
    env = _envelope(mags, p)
    if env is None:
        raise CertificateError(f"no decay certificate on {h} samples with period {p}")
    return env


def _envelope(mags: list[Fraction], p: int) -> DecayCertificate | None:
    h = len(mags)
    for onset in range(1, h - 2 * p + 1):
        m = max(mags[onset - 1: onset - 1 + p])
        later = mags[onset - 1 + p:]
        if m == 0 or not all(x < m for x in later):
            continue
        # smallest q with x <= m q^k, k = floor((t - onset)/p); then round up to a rational
        worst = 0.0
        for i, x in enumerate(later):
            if x:
                k = (i + p) // p
                worst = max(worst, math.exp((_log(x) - _log(m)) / k))
        q = Fraction(worst).limit_denominator(10**6)
        while not all(x <= m * q ** ((i + p) // p) for i, x in enumerate(later)):
            q = q + (ONE - q) / 1024
        if q < 1:
            return DecayCertificate(q if q > 0 else Fraction(1, 2), onset, "envelope")
    return None


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


# -- realizing streams as chains ---------------------------------------------

def as_stat_stream(u: EPStream) -> StatStream:
    """Deterministic chain: prefix states in a line, then a ring over the cycle."""
    values = u.prefix + u.cycle
    n, start_cycle = len(values), len(u.prefix)
    rows = []
    for i in range(n):
        nxt = i + 1 if i + 1 < n else start_cycle
        rows.append(tuple(ONE if j == nxt else ZERO for j in range(n)))
    return StatStream(tuple(rows), tuple(values), 0)


def stat_prepend(c, u: StatStream) -> StatStream:
    """``(c, u)`` as a chain: a fresh initial state with reward ``c`` that moves to ``u.start``."""
    n = u.n_states
    first = tuple(ONE if j == u.start + 1 else ZERO for j in range(n + 1))
    rows = [first] + [(ZERO,) + row for row in u.matrix]
    return StatStream(tuple(rows), (Fraction(c),) + u.rewards, 0)


def stat_add(u: StatStream, v: StatStream) -> StatStream:
    """Pointwise sum via the product chain with rewards ``R_u(i) + R_v(j)``."""
    n, m = u.n_states, v.n_states
    rows, rewards = [], []
    for i in range(n):
        for j in range(m):
            rows.append(tuple(a * b if a and b else ZERO for a in u.matrix[i] for b in v.matrix[j]))
            rewards.append(u.rewards[i] + v.rewards[j])
    return StatStream(tuple(rows), tuple(rewards), u.start * m + v.start)


def stat_negate(u: StatStream) -> StatStream:
    return StatStream(u.matrix, tuple(-r for r in u.rewards), u.start)
