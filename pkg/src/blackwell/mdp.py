"""Finite MDPs, decision rules, policies and the reward streams they generate.

Everything is exact: probabilities and rewards are ``Fraction``.  A decision
rule is a tuple of action indices, one per state.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .linalg import ONE, ZERO, Matrix, Vector, vecmat

DecisionRule = tuple[int, ...]

ENUMERATION_CAP = 10**6

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


class MdpError(ValueError):
    """Invalid MDP description. ``where`` names the offending coordinates."""

    def __init__(self, message: str, where: dict | None = None):
        super().__init__(message)
        self.where = where or {}


class EnumerationCapError(ValueError):
    pass


def parse_rational(text: Any) -> Fraction:
    """Parse ``"p/q"``, ``"-2"`` or a plain int.  Decimals are rejected."""
    if isinstance(text, bool):
        raise MdpError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise MdpError(f"decimals rejected; use p/q (got {text!r})")
    if not isinstance(text, str):
        raise MdpError(f"not a rational: {text!r}")
    s = text.strip()
    if not _RATIONAL.fullmatch(s):
        if re.fullmatch(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?", s):
            raise MdpError(f"decimals rejected; use p/q (got {text!r})")
        raise MdpError(f"not a rational: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise MdpError(f"zero denominator in {text!r}") from None


def format_rational(x: Fraction) -> str:
    return str(x)


def check_stochastic(matrix: Sequence[Sequence[Fraction]]) -> None:
    n = len(matrix)
    for i, row in enumerate(matrix):
        if len(row) != n:
            raise ValueError(f"row {i} has length {len(row)}, expected {n}")
        if any(x < 0 for x in row):
            raise ValueError(f"negative entry in row {i}")
        if sum(row, ZERO) != ONE:
            raise ValueError(f"row {i} sums to {sum(row, ZERO)}, not 1")


@dataclass(frozen=True)
class Mdp:
    states: tuple[str, ...]
    actions: tuple[str, ...]
    transition: tuple[Matrix, ...]   # indexed by action
    reward: tuple[Vector, ...]       # indexed by action

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise MdpError(f"unknown state {name!r}", {"state": name}) from None

    def action_index(self, name: str) -> int:
        try:
            return self.actions.index(name)
        except ValueError:
            raise MdpError(f"unknown action {name!r}", {"action": name}) from None

    def reward_bounds(self) -> tuple[Fraction, Fraction]:
        values = [r for vec in self.reward for r in vec]
        return min(values), max(values)

    def to_raw(self) -> dict:
        """Inverse of :func:`validate_mdp`: the file-format document."""
        return {
            "states": list(self.states),
            "actions": list(self.actions),
            "transitions": {
                a: [[str(x) for x in row] for row in self.transition[k]]
                for k, a in enumerate(self.actions)
            },
            "rewards": {a: [str(x) for x in self.reward[k]] for k, a in enumerate(self.actions)},
        }


def validate_mdp(raw: Mapping[str, Any]) -> Mdp:
    """Build an :class:`Mdp` from a parsed MDP document, checking every invariant.

    Errors name states and actions by label, so they can be shown to users as is.
    """
    if not isinstance(raw, Mapping):
        raise MdpError("MDP document must be a mapping")
    for key in ("states", "actions", "transitions", "rewards"):
        if key not in raw:
            raise MdpError(f"missing top-level key {key!r}")
    states = _labels(raw["states"], "states")
    actions = _labels(raw["actions"], "actions")
    n = len(states)
    trans_raw, rew_raw = raw["transitions"], raw["rewards"]
    if not isinstance(trans_raw, Mapping) or not isinstance(rew_raw, Mapping):
        raise MdpError("'transitions' and 'rewards' must map action names")
    for extra in set(trans_raw) - set(actions):
        raise MdpError(f"transitions given for unknown action {extra!r}", {"action": extra})
    for extra in set(rew_raw) - set(actions):
        raise MdpError(f"rewards given for unknown action {extra!r}", {"action": extra})

    transition, reward = [], []
    for a in actions:
        if a not in trans_raw:
            raise MdpError(f"missing transition matrix for action {a}", {"action": a})
        if a not in rew_raw:
            raise MdpError(f"missing reward vector for action {a}", {"action": a})
        rows = trans_raw[a]
        if not isinstance(rows, Sequence) or isinstance(rows, str) or len(rows) != n:
            raise MdpError(f"action {a}: transition matrix must have {n} rows", {"action": a})
        matrix = []
        for i, row in enumerate(rows):
            where = {"state": states[i], "action": a}
            if not isinstance(row, Sequence) or isinstance(row, str) or len(row) != n:
                raise MdpError(
                    f"dimension mismatch at state {states[i]}, action {a}: row must have {n} entries",
                    where,
                )
            try:
                values = tuple(parse_rational(x) for x in row)
            except MdpError as exc:
                raise MdpError(f"{exc} at state {states[i]}, action {a}", where) from None
            for j, x in enumerate(values):
                if x < 0:
                    raise MdpError(
                        f"negative probability at ({states[i]},{states[j]}), action {a}",
                        {"state": states[i], "next_state": states[j], "action": a},
                    )
            total = sum(values, ZERO)
            if total != ONE:
                raise MdpError(f"row sum {total} ≠ 1 at state {states[i]}, action {a}", where)
            matrix.append(values)
        rvec = rew_raw[a]
        if not isinstance(rvec, Sequence) or isinstance(rvec, str) or len(rvec) != n:
            raise MdpError(f"dimension mismatch: action {a} reward vector must have {n} entries",
                           {"action": a})
        try:
            rewards = tuple(parse_rational(x) for x in rvec)
        except MdpError as exc:
            raise MdpError(f"{exc} in rewards of action {a}", {"action": a}) from None
        transition.append(tuple(matrix))
        reward.append(rewards)
    return Mdp(tuple(states), tuple(actions), tuple(transition), tuple(reward))


def _labels(xs: Any, key: str) -> list[str]:
    if not isinstance(xs, Sequence) or isinstance(xs, str) or not xs:
        raise MdpError(f"{key!r} must be a nonempty list of names")
    labels = [str(x) for x in xs]
    if len(set(labels)) != len(labels):
        raise MdpError(f"duplicate names in {key!r}")
    return labels


def _check_rule(mdp: Mdp, f: DecisionRule) -> None:
    if len(f) != mdp.n_states or any(not 0 <= a < mdp.n_actions for a in f):
        raise MdpError(f"invalid decision rule {f!r} for this MDP")


def rule_matrices(mdp: Mdp, f: DecisionRule) -> tuple[Matrix, Vector]:
    """Transition matrix and reward vector of decision rule ``f``."""
    _check_rule(mdp, f)
    matrix = tuple(mdp.transition[a][s] for s, a in enumerate(f))
    rewards = tuple(mdp.reward[a][s] for s, a in enumerate(f))
    return matrix, rewards


def enumerate_decision_rules(mdp: Mdp, cap: int = ENUMERATION_CAP) -> list[DecisionRule]:
    count = mdp.n_actions ** mdp.n_states
    if count > cap:
        raise EnumerationCapError(
            f"{mdp.n_actions}^{mdp.n_states} = {count} decision rules exceeds the cap {cap}"
        )
    return list(itertools.product(range(mdp.n_actions), repeat=mdp.n_states))


@dataclass(frozen=True)
class PolicySpec:
    """Eventually periodic policy: ``prefix`` rules once, then ``cycle`` forever."""

    prefix: tuple[DecisionRule, ...]
    cycle: tuple[DecisionRule, ...]

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("policy cycle must be nonempty")

    @classmethod
    def stationary(cls, f: DecisionRule) -> "PolicySpec":
        return cls((), (tuple(f),))

    @property
    def is_stationary(self) -> bool:
        return not self.prefix and len(set(self.cycle)) == 1

    def rule_at(self, t: int) -> DecisionRule:
        """Rule used at time ``t`` (1-based)."""
        if t <= len(self.prefix):
            return self.prefix[t - 1]
        return self.cycle[(t - 1 - len(self.prefix)) % len(self.cycle)]


@dataclass(frozen=True)
class StatStream:
    """The stream ``u_t = [Q^{t-1} R]_start`` of a stationary chain with rewards."""

    matrix: Matrix
    rewards: Vector
    start: int

    def __post_init__(self):
        check_stochastic(self.matrix)
        if len(self.rewards) != len(self.matrix):
            raise ValueError("reward vector length differs from matrix size")
        if not 0 <= self.start < len(self.matrix):
            raise ValueError(f"start state {self.start} out of range")

    @property
    def n_states(self) -> int:
        return len(self.matrix)

    def terms(self, horizon: int) -> list[Fraction]:
        """First ``horizon`` terms, by forward row-vector products."""
        x = tuple(ONE if i == self.start else ZERO for i in range(self.n_states))
        out = []
        for t in range(horizon):
            if t:
                x = vecmat(x, self.matrix)
            out.append(sum((xi * ri for xi, ri in zip(x, self.rewards) if xi), ZERO))
        return out


def generate_stream(mdp: Mdp, policy: PolicySpec, s: int, horizon: int) -> list[Fraction]:
    """``(u_1, ..., u_horizon)`` for ``policy`` started in state ``s``.

    Uses ``u_t = e_s Q(f_1)...Q(f_{t-1}) R(f_t)`` evaluated left to right.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if not 0 <= s < mdp.n_states:
        raise ValueError(f"state {s} out of range")
    x = tuple(ONE if i == s else ZERO for i in range(mdp.n_states))
    out = []
    for t in range(1, horizon + 1):
        q, r = rule_matrices(mdp, policy.rule_at(t))
        out.append(sum((xi * ri for xi, ri in zip(x, r) if xi), ZERO))
        x = vecmat(x, q)
    return out


def stationary_stream(mdp: Mdp, f: DecisionRule, s: int) -> StatStream:
    q, r = rule_matrices(mdp, f)
    return StatStream(q, r, s)


def policy_stream(mdp: Mdp, policy: PolicySpec, s: int) -> StatStream:
    """Lift an eventually periodic policy to a stationary chain on (phase, state).

    Phase ``k`` runs the ``k``-th rule of ``prefix + cycle``; the last phase
    wraps to the start of the cycle.  The lifted stream from ``(0, s)``
    equals ``generate_stream(mdp, policy, s, .)`` term by term.
    """
    if policy.is_stationary:
        return stationary_stream(mdp, policy.cycle[0], s)
    rules = list(policy.prefix) + list(policy.cycle)
    n, phases = mdp.n_states, len(rules)
    size = n * phases
    rows, rewards = [], []
    for k, f in enumerate(rules):
        q, r = rule_matrices(mdp, f)
        nxt = k + 1 if k + 1 < phases else len(policy.prefix)
        for i in range(n):
            row = [ZERO] * size
            row[nxt * n:(nxt + 1) * n] = q[i]
            rows.append(tuple(row))
            rewards.append(r[i])
    return StatStream(tuple(rows), tuple(rewards), s)


def parse_rule(mdp: Mdp, text: str) -> DecisionRule:
    names = [x.strip() for x in text.split(",")]
    if len(names) != mdp.n_states:
        raise MdpError(f"rule {text!r} names {len(names)} actions, expected {mdp.n_states}")
    return tuple(mdp.action_index(a) for a in names)


def parse_policy(mdp: Mdp, text: str) -> PolicySpec:
    """``"a,b"`` is stationary; ``"a,b;b,b|a,a"`` is prefix ``|`` cycle, rules split by ``;``."""
    if "|" in text:
        pre, cyc = text.split("|", 1)
        prefix = tuple(parse_rule(mdp, r) for r in pre.split(";") if r.strip())
        cycle = tuple(parse_rule(mdp, r) for r in cyc.split(";") if r.strip())
        if not cycle:
            raise MdpError("eventually periodic policy needs a nonempty cycle")
        return PolicySpec(prefix, cycle)
    rules = tuple(parse_rule(mdp, r) for r in text.split(";") if r.strip())
    if not rules:
        raise MdpError("empty policy")
    return PolicySpec((), rules)


def format_rule(mdp: Mdp, f: Iterable[int]) -> str:
    return ",".join(mdp.actions[a] for a in f)
