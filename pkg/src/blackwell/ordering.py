"""Exact decision procedures for the 1-optimality order and the average
overtaking order, plus float oracles that evaluate both definitions directly.

Expansion variable
------------------
For a stationary stream, ``V(beta) = sum_{t>=1} beta^t u_t = beta [(I - beta Q)^{-1} R]_s``.
With ``rho = (1 - beta) / beta`` this is ``[(rho I + I - Q)^{-1} R]_s``, whose
Laurent series near ``rho = 0`` is

    V = rho^{-1} [Q* R]_s + sum_{n>=0} (-rho)^n [H^{n+1} R]_s,

where ``H = (I - Q + Q*)^{-1} - Q*`` is the deviation matrix.  ``rho -> 0+`` as
``beta -> 1-``, so coefficient signs read directly as limits.

Coefficient cap
---------------
``rho * (V_u - V_v)`` is a ratio of polynomials in ``rho``; its numerator has
degree at most ``S_u + S_v`` (adjugate entries have degree ``< S``, each
determinant has degree ``S``).  If its series vanishes through that order,
the numerator is the zero polynomial, so ``K = S_u + S_v + 2`` coefficients
certify ``V_u == V_v``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .chain import deviation_apply, gain
from .linalg import Vector
from .mdp import DecisionRule, Mdp, StatStream, enumerate_decision_rules, stationary_stream
from .streams import (
    EPStream,
    Extended,
    as_stat_stream,
    cesaro_of_partial_sums,
    long_run_average,
    memo,
    periodic_part,
    tail_total,
)

Stream = Union[EPStream, StatStream]

ORACLE_BETAS = (0.9, 0.99, 0.999, 0.9999)
ORACLE_NS = (10**3, 10**4, 10**5)


class OrderResult(enum.Enum):
    STRICTLY_BETTER = "strictly_better"
    STRICTLY_WORSE = "strictly_worse"
    EQUIVALENT = "equivalent"

    def flip(self) -> "OrderResult":
        if self is OrderResult.STRICTLY_BETTER:
            return OrderResult.STRICTLY_WORSE
        if self is OrderResult.STRICTLY_WORSE:
            return OrderResult.STRICTLY_BETTER
        return self

    @classmethod
    def from_sign(cls, x) -> "OrderResult":
        if x > 0:
            return cls.STRICTLY_BETTER
        if x < 0:
            return cls.STRICTLY_WORSE
        return cls.EQUIVALENT

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class LaurentSignature:
    """Coefficients ``(a_{-1}, a_0, ..., a_K)`` of ``V_u - V_v`` in powers of ``rho``."""

    coefficients: tuple[Fraction, ...]

    @property
    def K(self) -> int:
        return len(self.coefficients) - 2

    def __getitem__(self, k: int) -> Fraction:
        return self.coefficients[k + 1]

    def leading(self) -> tuple[int, Fraction] | None:
        """``(index, coefficient)`` of the first nonzero entry, or ``None``."""
        for i, a in enumerate(self.coefficients):
            if a:
                return i - 1, a
        return None

    def limit(self) -> Extended:
        """``lim_{beta->1-} (V_u - V_v)``; it exists since the difference is rational."""
        if self[-1] > 0:
            return math.inf
        if self[-1] < 0:
            return -math.inf
        return self[0]

    def to_dict(self) -> dict:
        return {"start_index": -1, "coefficients": [str(a) for a in self.coefficients]}


@dataclass
class CompareReport:
    result: OrderResult
    criterion: str                      # "blackwell" | "avg_overtaking"
    evidence: Extended                  # the limit value that decided the result
    signature: LaurentSignature | None = None
    oracle_signs: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "result": self.result.value,
            "criterion": self.criterion,
            "evidence": format_extended(self.evidence),
        }
        if self.signature is not None:
            d["signature"] = self.signature.to_dict()
        if self.oracle_signs:
            key = "beta" if self.criterion == "blackwell" else "n"
            d["oracle"] = [{key: x, "value": float(y)} for x, y in self.oracle_signs]
        return d


def format_extended(x: Extended) -> str:
    if x == math.inf:
        return "+inf"
    if x == -math.inf:
        return "-inf"
    return str(x)


def _stat(u: Stream) -> StatStream:
    return as_stat_stream(u) if isinstance(u, EPStream) else u


# -- Laurent signature ---------------------------------------------------------

_COEFF_CACHE: dict[tuple, list[Vector]] = {}


def _coefficient_vectors(u: StatStream, k_max: int) -> list[Vector]:
    """``[Q* R, H R, -H^2 R, H^3 R, ...]`` up to index ``k_max``, for all start states."""
    key = (u.matrix, u.rewards)
    vecs = _COEFF_CACHE.get(key)
    if vecs is None:
        if len(_COEFF_CACHE) > 20000:
            _COEFF_CACHE.clear()
        vecs = [gain(u.matrix, u.rewards)]
        _COEFF_CACHE[key] = vecs
        vecs.append(deviation_apply(u.matrix, u.rewards))
    while len(vecs) < k_max + 2:
        # y_n = (-1)^n H^{n+1} R  =>  y_{n+1} = -H y_n
        nxt = deviation_apply(u.matrix, vecs[-1])
        vecs.append(tuple(-x for x in nxt))
    return vecs


def default_K(u: Stream, v: Stream) -> int:
    return _stat(u).n_states + _stat(v).n_states + 2


def laurent_signature(u: Stream, v: Stream, K: int | None = None) -> LaurentSignature:
    su, sv = _stat(u), _stat(v)
    if K is None:
        K = default_K(su, sv)
    if K < 1:
        raise ValueError("K must be >= 1")
    cu = _coefficient_vectors(su, K)
    cv = _coefficient_vectors(sv, K)
    coeffs = tuple(cu[i][su.start] - cv[i][sv.start] for i in range(K + 2))
    return LaurentSignature(coeffs)


def _leading_pair(u: StatStream) -> tuple[Fraction, Fraction]:
    def compute():
        vecs = _coefficient_vectors(u, 0)
        return vecs[0][u.start], vecs[1][u.start]
    return memo(u, "_leading", compute)


def blackwell_compare(u: Stream, v: Stream, K: int | None = None, oracle: bool = False) -> CompareReport:
    """Decide ``liminf_{beta->1-} sum beta^t (u_t - v_t) >= 0`` in both directions.

    The limit exists and is decided by ``a_{-1}`` then ``a_0``; higher
    coefficients are reported as evidence but do not break ties.
    """
    sig = laurent_signature(u, v, K)
    lim = sig.limit()
    rep = CompareReport(OrderResult.from_sign(lim), "blackwell", lim, sig)
    if oracle:
        rep.oracle_signs = [(b, oracle_discounted(u, v, b)) for b in ORACLE_BETAS]
    return rep


def blackwell_order(u: Stream, v: Stream) -> OrderResult:
    """Same decision as :func:`blackwell_compare`, without building the report."""
    su, sv = _stat(u), _stat(v)
    gu, bu = _leading_pair(su)
    gv, bv = _leading_pair(sv)
    if gu != gv:
        return OrderResult.from_sign(gu - gv)
    return OrderResult.from_sign(bu - bv)


# -- average overtaking --------------------------------------------------------

def cesaro_difference(u: Stream, v: Stream) -> Extended:
    """``lim (1/n) sum_{T<=n} sum_{t<=T} (u_t - v_t)`` in ``[-inf, +inf]``."""
    if isinstance(u, EPStream) and isinstance(v, EPStream):
        return cesaro_of_partial_sums(u - v)
    su, sv = _stat(u), _stat(v)
    wu, wv = periodic_part(su), periodic_part(sv)
    drift = long_run_average(wu) - long_run_average(wv)
    if drift:
        # one cycle of w_u - w_v sums to lcm * drift
        return math.inf if drift > 0 else -math.inf
    value = cesaro_of_partial_sums(wu - wv)
    if math.isinf(value):
        return value
    return value + tail_total(su) - tail_total(sv)


def avg_overtaking_compare(u: Stream, v: Stream, oracle: bool = False) -> CompareReport:
    c = cesaro_difference(u, v)
    rep = CompareReport(OrderResult.from_sign(c), "avg_overtaking", c)
    if oracle:
        rep.oracle_signs = [(n, oracle_avg_overtaking(u, v, n)) for n in ORACLE_NS]
    return rep


def avg_overtaking_order(u: Stream, v: Stream) -> OrderResult:
    return OrderResult.from_sign(cesaro_difference(u, v))


# -- float oracles -------------------------------------------------------------

def float_terms(u: Stream, n: int) -> np.ndarray:
    """``u_1..u_n`` in floating point (for oracle sums only)."""
    if isinstance(u, EPStream):
        pre = np.array([float(x) for x in u.prefix])
        cyc = np.array([float(x) for x in u.cycle])
        m = max(n - len(pre), 0)
        reps = -(-m // len(cyc)) if m else 0
        return np.concatenate([pre, np.tile(cyc, reps)])[:n]
    p = np.array(u.matrix, dtype=float)
    r = np.array(u.rewards, dtype=float)
    x = np.zeros(len(r))
    x[u.start] = 1.0
    out = np.empty(n)
    for t in range(n):
        out[t] = x @ r
        x = x @ p
    return out


def _discounted_float(u: Stream, beta: float, horizon: int) -> float:
    """``sum_{t=1}^{horizon} beta^t u_t``, by binary splitting of the geometric matrix sum."""
    su = _stat(u)
    a = beta * np.array(su.matrix, dtype=float)
    n = len(a)
    # g = I + a + ... + a^{k-1}, apow = a^k
    g, apow, k = np.zeros((n, n)), np.eye(n), 0
    for bit in bin(horizon)[2:]:
        g, apow, k = g + apow @ g, apow @ apow, 2 * k
        if bit == "1":
            g, apow, k = np.eye(n) + a @ g, a @ apow, k + 1
    assert k == horizon
    r = np.array(su.rewards, dtype=float)
    return beta * float((g @ r)[su.start])


def oracle_horizon(u: Stream, v: Stream, beta: float) -> int:
    bound = max(_max_abs(u), _max_abs(v), 1e-300) * 2
    # beta^h * bound / (1 - beta) < 1e-12
    return max(int(math.ceil(math.log(1e-12 * (1 - beta) / bound) / math.log(beta))) + 1, 1)


def _max_abs(u: Stream) -> float:
    vals = (u.prefix + u.cycle) if isinstance(u, EPStream) else u.rewards
    return float(max(abs(x) for x in vals))


def oracle_value(u: Stream, beta: float) -> float:
    """Float ``sum_t beta^t u_t`` for one stream, truncated so the remainder is below ``1e-12``."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    return _discounted_float(u, beta, oracle_horizon(u, u, beta))


def oracle_discounted(u: Stream, v: Stream, beta: float, horizon: int | None = None) -> float:
    """Truncated ``sum_{t<=horizon} beta^t (u_t - v_t)`` in floats."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if u == v:
        return 0.0
    if horizon is None:
        horizon = oracle_horizon(u, v, beta)
    return _discounted_float(u, beta, horizon) - _discounted_float(v, beta, horizon)


def oracle_avg_overtaking(u: Stream, v: Stream, n: int) -> float:
    """``(1/n) sum_{T=1}^n sum_{t=1}^T (u_t - v_t)`` in floats."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if u == v:
        return 0.0
    d = float_terms(u, n) - float_terms(v, n)
    weights = np.arange(n, 0, -1, dtype=float)
    return float(d @ weights) / n


# -- optimal rules ---------------------------------------------------------------

def find_blackwell_optimal(
    mdp: Mdp,
    s: int | None = None,
    pairwise: bool = False,
    order: Callable[[Stream, Stream], OrderResult] = blackwell_order,
) -> list[DecisionRule]:
    """Decision rules that are maximal under the 1-optimality order.

    ``s=None`` asks for rules that are maximal from every start state at
    once.  The order is complete and transitive on stationary streams, so by
    default a linear scan finds the maximal set; ``pairwise=True`` checks
    every rule against every other instead.
    """
    rules = enumerate_decision_rules(mdp)
    states = range(mdp.n_states) if s is None else [s]
    keep = set(rules)
    for st in states:
        streams = {f: stationary_stream(mdp, f, st) for f in rules}
        if pairwise:
            maximal = {
                f for f in rules
                if all(order(streams[f], streams[g]) is not OrderResult.STRICTLY_WORSE for g in rules)
            }
        else:
            best = rules[0]
            for f in rules[1:]:
                if order(streams[f], streams[best]) is OrderResult.STRICTLY_BETTER:
                    best = f
            maximal = {
                f for f in rules if order(streams[f], streams[best]) is OrderResult.EQUIVALENT
            }
        keep &= maximal
    result = sorted(keep)
    if s is None and not result:
        raise AssertionError("no rule is maximal at every state; a stationary optimal rule must exist")
    return result


def compare_all(u: Stream, v: Stream, oracle: bool = False) -> Sequence[CompareReport]:
    return blackwell_compare(u, v, oracle=oracle), avg_overtaking_compare(u, v, oracle=oracle)
