"""Drivers that check monotonicity (A1), translation invariance (A2) and the
compensation principle (A3) for any ordering, and the coincidence of the
1-optimality and average overtaking orders on stationary streams.

An ordering under test is any deterministic callable ``(u, v) -> OrderResult``
over :class:`EPStream` and :class:`StatStream` values.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import generators as gen
from .linalg import solve_exact
from .mdp import Mdp, StatStream, enumerate_decision_rules, policy_stream, stationary_stream
from .ordering import (
    OrderResult,
    Stream,
    avg_overtaking_order,
    blackwell_order,
)
from .streams import (
    EPStream,
    as_stat_stream,
    dominates,
    long_run_average,
    memo,
    prepend,
    stat_add,
    stat_prepend,
    stream_gain,
)

Ordering = Callable[[Stream, Stream], OrderResult]


@dataclass
class AxiomReport:
    axiom: str
    cases: int = 0
    failures: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "cases": self.cases, "passed": self.passed,
                "failures": self.failures, **({"notes": self.notes} if self.notes else {})}


# -- stream helpers ---------------------------------------------------------

def stream_to_dict(u: Stream) -> dict:
    if isinstance(u, EPStream):
        return {"kind": "ep", **u.to_dict()}
    return {
        "kind": "stat",
        "matrix": [[str(x) for x in row] for row in u.matrix],
        "rewards": [str(x) for x in u.rewards],
        "start": u.start,
    }


def stream_from_dict(d: dict) -> Stream:
    if d["kind"] == "ep":
        return EPStream.from_dict(d)
    return StatStream(
        tuple(tuple(Fraction(x) for x in row) for row in d["matrix"]),
        tuple(Fraction(x) for x in d["rewards"]),
        d["start"],
    )


def plus(u: Stream, v: Stream) -> Stream:
    if isinstance(u, EPStream) and isinstance(v, EPStream):
        return u + v
    return stat_add(_as_stat(u), _as_stat(v))


def average(u: Stream) -> Fraction:
    return long_run_average(u) if isinstance(u, EPStream) else stream_gain(u)


def compensate(u: Stream) -> Stream:
    """``(u_bar, u)``: the stream postponed one period, compensated by its average."""
    c = average(u)
    return prepend(c, u) if isinstance(u, EPStream) else stat_prepend(c, u)


def _as_stat(u: Stream) -> StatStream:
    return as_stat_stream(u) if isinstance(u, EPStream) else u


# -- orderings used as planted failures ------------------------------------------

def always_equivalent(u: Stream, v: Stream) -> OrderResult:
    return OrderResult.EQUIVALENT


def discounted_order(beta=Fraction(1, 2)) -> Ordering:
    """Exact comparison of ``sum_t beta^t u_t`` at one fixed discount factor."""
    beta = Fraction(beta)

    def solve(s: StatStream) -> Fraction:
        n = s.n_states
        a = tuple(tuple((1 if i == j else 0) - beta * s.matrix[i][j] for j in range(n)) for i in range(n))
        return beta * solve_exact(a, s.rewards)[s.start]

    def value(u: Stream) -> Fraction:
        if isinstance(u, EPStream):
            return solve(as_stat_stream(u))
        return memo(u, f"_discounted_{beta}", lambda: solve(u))

    def order(u: Stream, v: Stream) -> OrderResult:
        return OrderResult.from_sign(value(u) - value(v))

    order.__name__ = f"discounted_{beta}"
    return order


def truncated_order(horizon: int = 10) -> Ordering:
    """Overtaking at a fixed horizon, ties broken by the larger peak over the next stretch.

    The tie-break looks at each stream separately, so the order is not
    translation invariant.  It also ignores everything after ``3 * horizon``.
    """

    def order(u: Stream, v: Stream) -> OrderResult:
        tu, tv = u.terms(3 * horizon), v.terms(3 * horizon)
        head = sum(tu[:horizon]) - sum(tv[:horizon])
        if head:
            return OrderResult.from_sign(head)
        return OrderResult.from_sign(max(tu[horizon:]) - max(tv[horizon:]))

    order.__name__ = f"truncated_{horizon}"
    return order


ORDERINGS: dict[str, Ordering] = {
    "blackwell": blackwell_order,
    "avg-overtaking": avg_overtaking_order,
    "always-equivalent": always_equivalent,
    "discounted-half": discounted_order(Fraction(1, 2)),
    "truncated": truncated_order(10),
}


# -- case generation ----------------------------------------------------------------

def a1_cases(rng: random.Random, n: int, p_stat: float = 0.3) -> list[tuple[Stream, Stream]]:
    out = []
    for _ in range(n):
        v = gen.any_stream(rng, p_stat)
        x = gen.positive_ep_stream(rng)
        out.append((plus(v, x), v))
    return out


def a2_cases(rng: random.Random, n: int, p_stat: float = 0.3) -> list[tuple[Stream, Stream, Stream]]:
    return [(gen.any_stream(rng, p_stat), gen.any_stream(rng, p_stat), gen.ep_stream(rng))
            for _ in range(n)]


def a3_cases(rng: random.Random, n: int, p_stat: float = 0.3) -> list[Stream]:
    return [gen.any_stream(rng, p_stat) for _ in range(n)]


# -- shrinking -----------------------------------------------------------------------

def _shrink_stream(u: EPStream) -> Iterable[EPStream]:
    pre, cyc = list(u.prefix), list(u.cycle)
    for i in range(len(pre)):
        yield EPStream(pre[:i] + pre[i + 1:], cyc)
    if len(cyc) > 1:
        for i in range(len(cyc)):
            yield EPStream(pre, cyc[:i] + cyc[i + 1:])
    for i, x in enumerate(pre + cyc):
        for y in (Fraction(0), Fraction(round(x)), Fraction(int(x))):
            if y != x:
                vals = pre + cyc
                vals[i] = y
                yield EPStream(vals[:len(pre)], vals[len(pre):])


def shrink(case: tuple, fails: Callable[[tuple], bool], valid: Callable[[tuple], bool] = lambda c: True,
           budget: int = 400) -> tuple:
    """Greedy shrink of the EPStream members of a failing case."""
    current = case
    improved = True
    while improved and budget > 0:
        improved = False
        for k, member in enumerate(current):
            if not isinstance(member, EPStream):
                continue
            for smaller in _shrink_stream(member):
                budget -= 1
                cand = current[:k] + (smaller,) + current[k + 1:]
                if valid(cand) and fails(cand):
                    current, improved = cand, True
                    break
                if budget <= 0:
                    break
            if improved or budget <= 0:
                break
    return current


def _record(index: int, case: tuple, **info) -> dict:
    return {"case": index, "inputs": [stream_to_dict(x) for x in case], **info}


# -- checks --------------------------------------------------------------------------

def check_a1(order: Ordering, cases: Sequence[tuple[Stream, Stream]], minimize: bool = True) -> AxiomReport:
    """A1: ``u > v`` must give ``strictly_better``."""
    rep = AxiomReport("A1", len(cases))

    def fails(c):
        return order(c[0], c[1]) is not OrderResult.STRICTLY_BETTER

    def valid(c):
        return all(isinstance(x, EPStream) for x in c) and dominates(c[0], c[1])

    for i, (u, v) in enumerate(cases):
        if isinstance(u, EPStream) and isinstance(v, EPStream) and not dominates(u, v):
            raise ValueError(f"A1 case {i} is not a dominating pair")
        got = order(u, v)
        if got is not OrderResult.STRICTLY_BETTER:
            case = (u, v)
            if minimize and valid(case):
                case = shrink(case, fails, valid)
            rep.failures.append(_record(i, case, got=order(*case).value))
    return rep


def check_a2(order: Ordering, cases: Sequence[tuple[Stream, Stream, Stream]], minimize: bool = True) -> AxiomReport:
    """A2: adding the same ``alpha`` to both sides leaves the result unchanged."""
    rep = AxiomReport("A2", len(cases))

    def outcome(c):
        u, v, alpha = c
        return order(u, v), order(plus(u, alpha), plus(v, alpha))

    def fails(c):
        before, after = outcome(c)
        return before is not after

    for i, case in enumerate(cases):
        if fails(case):
            if minimize:
                case = shrink(case, fails)
            before, after = outcome(case)
            rep.failures.append(_record(i, case, before=before.value, after=after.value))
    return rep


def check_a3(order: Ordering, cases: Sequence[Stream], minimize: bool = True) -> AxiomReport:
    """A3: ``(u_bar, u)`` is equivalent to ``u``."""
    rep = AxiomReport("A3", len(cases))

    def fails(c):
        return order(compensate(c[0]), c[0]) is not OrderResult.EQUIVALENT

    for i, u in enumerate(cases):
        case = (u,)
        if fails(case):
            if minimize:
                case = shrink(case, fails)
            rep.failures.append(_record(i, case, average=str(average(case[0])),
                                        got=order(compensate(case[0]), case[0]).value))
    return rep


def run_axiom_suite(order: Ordering, seed: int, n_cases: int, axioms: Iterable[str] = ("A1", "A2", "A3"),
                    p_stat: float = 0.3) -> list[AxiomReport]:
    """Generate seeded cases and run the requested checks.  Deterministic in ``seed``."""
    reports = []
    for ax in axioms:
        rng = random.Random(f"{seed}:{ax}")
        if ax == "A1":
            reports.append(check_a1(order, a1_cases(rng, n_cases, p_stat)))
        elif ax == "A2":
            reports.append(check_a2(order, a2_cases(rng, n_cases, p_stat)))
        elif ax == "A3":
            reports.append(check_a3(order, a3_cases(rng, n_cases, p_stat)))
        else:
            raise ValueError(f"unknown axiom {ax!r}")
    return reports


# -- coincidence on stationary streams -----------------------------------------------

def distinct_streams(streams: Sequence[StatStream]) -> tuple[list[StatStream], list[int]]:
    """Group streams by value.  Returns representatives and, per input, its group index.

    Two streams from chains with ``S_u`` and ``S_v`` states coincide iff their
    first ``S_u + S_v`` terms do: the difference satisfies a linear recurrence of
    that order.
    """
    if not streams:
        return [], []
    n = 2 * max(s.n_states for s in streams)
    reps: list[StatStream] = []
    index: dict[tuple, int] = {}
    groups = []
    for s in streams:
        key = tuple(s.terms(n))
        if key not in index:
            index[key] = len(reps)
            reps.append(s)
        groups.append(index[key])
    return reps, groups


def _weakly(r: OrderResult) -> bool:
    return r is not OrderResult.STRICTLY_WORSE


def check_coincidence(streams: Sequence[StatStream], order_b: Ordering = blackwell_order,
                      order_v: Ordering = avg_overtaking_order, rng: random.Random | None = None,
                      n_triples: int = 200, label: str = "T1-coincidence") -> AxiomReport:
    """Both orders agree on every ordered pair; each is antisymmetric under swap and transitive."""
    rep = AxiomReport(label)
    reps, groups = distinct_streams(streams)
    n = len(reps)
    total = len(streams)
    rep.cases = total * total
    rep.notes = {"streams": total, "distinct_streams": n}

    # members of one group are the same stream: both orders must call them equivalent
    for i, g in enumerate(groups):
        if streams[i] is reps[g]:
            continue
        for name, order in (("blackwell", order_b), ("avg_overtaking", order_v)):
            r = order(streams[i], reps[g])
            if r is not OrderResult.EQUIVALENT:
                rep.failures.append({"check": "reflexivity", "order": name, "got": r.value,
                                     "inputs": [stream_to_dict(streams[i]), stream_to_dict(reps[g])]})

    table_b = [[OrderResult.EQUIVALENT] * n for _ in range(n)]
    table_v = [[OrderResult.EQUIVALENT] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            table_b[i][j] = order_b(reps[i], reps[j])
            table_v[i][j] = order_v(reps[i], reps[j])
    for i in range(n):
        for j in range(n):
            b, v = table_b[i][j], table_v[i][j]
            pair = lambda: [stream_to_dict(reps[i]), stream_to_dict(reps[j])]
            if not isinstance(b, OrderResult) or not isinstance(v, OrderResult):
                rep.failures.append({"check": "trichotomy", "inputs": pair()})
                continue
            if b is not v:
                rep.failures.append({"check": "coincidence", "blackwell": b.value,
                                     "avg_overtaking": v.value, "inputs": pair()})
            for name, table in (("blackwell", table_b), ("avg_overtaking", table_v)):
                if i < j and table[j][i] is not table[i][j].flip():
                    rep.failures.append({"check": "antisymmetry", "order": name,
                                         "forward": table[i][j].value, "backward": table[j][i].value,
                                         "inputs": pair()})
    if n >= 3:
        rng = rng or random.Random(0)
        triples = (itertools.permutations(range(n), 3) if n ** 3 <= n_triples
                   else (tuple(rng.sample(range(n), 3)) for _ in range(n_triples)))
        for a, b, c in triples:
            for name, t in (("blackwell", table_b), ("avg_overtaking", table_v)):
                ab, bc, ac = t[a][b], t[b][c], t[a][c]
                bad = (_weakly(ab) and _weakly(bc) and not _weakly(ac)) or (
                    ab is OrderResult.STRICTLY_BETTER and bc is OrderResult.STRICTLY_BETTER
                    and ac is not OrderResult.STRICTLY_BETTER) or (
                    ab is OrderResult.EQUIVALENT and bc is OrderResult.EQUIVALENT
                    and ac is not OrderResult.EQUIVALENT)
                if bad:
                    rep.failures.append({"check": "transitivity", "order": name,
                                         "results": [ab.value, bc.value, ac.value],
                                         "inputs": [stream_to_dict(reps[k]) for k in (a, b, c)]})
    return rep


def mdp_streams(model: Mdp) -> list[StatStream]:
    return [stationary_stream(model, f, s)
            for f in enumerate_decision_rules(model) for s in range(model.n_states)]


def check_theorem1(model: Mdp, rng: random.Random | None = None, n_triples: int = 200,
                   order_b: Ordering = blackwell_order, order_v: Ordering = avg_overtaking_order) -> AxiomReport:
    """All rules x all start states: the two orders coincide, are complete and transitive."""
    rep = check_coincidence(mdp_streams(model), order_b, order_v, rng, n_triples)
    for f in rep.failures:
        f.setdefault("mdp", model.to_raw())
    return rep


def check_eventually_periodic(model: Mdp, rng: random.Random, n_policies: int = 6) -> AxiomReport:
    """Coincidence on streams of sampled eventually periodic policies (lifted chains)."""
    streams = [policy_stream(model, gen.policy(rng, model), rng.randrange(model.n_states))
               for _ in range(n_policies)]
    rep = check_coincidence(streams, rng=rng, label="EP-policy-coincidence")
    for f in rep.failures:
        f.setdefault("mdp", model.to_raw())
    return rep


def run_theorem1_suite(seed: int, n_mdps: int, max_states: int = 4, max_actions: int = 3,
                       order_b: Ordering = blackwell_order,
                       order_v: Ordering = avg_overtaking_order) -> AxiomReport:
    rng = random.Random(f"{seed}:T1")
    total = AxiomReport("T1-coincidence")
    distinct = 0
    for k in range(n_mdps):
        model = gen.mdp(rng, max_states, max_actions)
        rep = check_theorem1(model, random.Random(f"{seed}:T1:{k}"), order_b=order_b, order_v=order_v)
        total.cases += rep.cases
        distinct += rep.notes["distinct_streams"]
        for f in rep.failures:
            total.failures.append({"mdp_index": k, **f})
    total.notes = {"mdps": n_mdps, "distinct_streams": distinct}
    return total
