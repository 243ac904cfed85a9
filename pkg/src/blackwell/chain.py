"""Structure and limits of finite stochastic matrices, in exact arithmetic.

Recurrent classes are the closed strongly connected components of the
positive-support digraph.  The Cesàro limit ``P*`` is assembled from the
stationary distribution of each class and the absorption probabilities of
the transient states.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
from scipy.sparse.csgraph import connected_components

from .linalg import (
    ONE,
    ZERO,
    Matrix,
    Vector,
    identity,
    matadd,
    matpow,
    matsub,
    matvec,
    solve_exact,
    vecadd,
    vecsub,
)


@dataclass(frozen=True)
class ChainStructure:
    recurrent_classes: tuple[tuple[int, ...], ...]
    transient_states: tuple[int, ...]
    class_periods: tuple[int, ...]
    global_period: int


@dataclass(frozen=True)
class LimitData:
    limiting_matrix: Matrix
    aperiodic: bool
    structure: ChainStructure


def chain_structure(p: Matrix) -> ChainStructure:
    return _structure(p)


@lru_cache(maxsize=4096)
def _structure(p: Matrix) -> ChainStructure:
    n = len(p)
    support = np.array([[x != 0 for x in row] for row in p], dtype=np.int8)
    _, labels = connected_components(support, directed=True, connection="strong")
    comps: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        comps.setdefault(int(lab), []).append(i)
    classes, transient = [], []
    for members in comps.values():
        inside = set(members)
        closed = all(j in inside for i in members for j in range(n) if p[i][j] != 0)
        if closed:
            classes.append(tuple(members))
        else:
            transient.extend(members)
    classes.sort()
    periods = tuple(_class_period(p, c) for c in classes)
    return ChainStructure(
        recurrent_classes=tuple(classes),
        transient_states=tuple(sorted(transient)),
        class_periods=periods,
        global_period=reduce(math.lcm, periods, 1),
    )


def _class_period(p: Matrix, members: tuple[int, ...]) -> int:
    """gcd of ``level(i) + 1 - level(j)`` over edges ``i -> j`` inside the class."""
    level = {members[0]: 0}
    queue = deque([members[0]])
    while queue:
        i = queue.popleft()
        for j in members:
            if p[i][j] != 0 and j not in level:
                level[j] = level[i] + 1
                queue.append(j)
    g = 0
    for i in members:
        for j in members:
            if p[i][j] != 0:
                g = math.gcd(g, abs(level[i] + 1 - level[j]))
    return g


def limiting_matrix(p: Matrix) -> LimitData:
    return _limit(p)


@lru_cache(maxsize=4096)
def _limit(p: Matrix) -> LimitData:
    n = len(p)
    st = _structure(p)
    q = [[ZERO] * n for _ in range(n)]
    dists = []
    for members in st.recurrent_classes:
        pi = _stationary(p, members)
        dists.append(pi)
        for i in members:
            for j, pj in zip(members, pi):
                q[i][j] = pj
    trans = st.transient_states
    if trans:
        a = tuple(
            tuple((ONE if r == c else ZERO) - p[i][j] for c, j in enumerate(trans))
            for r, i in enumerate(trans)
        )
        for members, pi in zip(st.recurrent_classes, dists):
            b = tuple(sum((p[i][j] for j in members), ZERO) for i in trans)
            absorb = solve_exact(a, b)
            for i, h in zip(trans, absorb):
                if h:
                    for j, pj in zip(members, pi):
                        q[i][j] = h * pj
    return LimitData(tuple(map(tuple, q)), st.global_period == 1, st)


def _stationary(p: Matrix, members: tuple[int, ...]) -> Vector:
    """Unique ``x`` with ``x P_C = x`` and ``sum(x) = 1`` on an irreducible class."""
    m = len(members)
    rows = []
    for c in range(m - 1):
        j = members[c]
        rows.append(tuple(p[i][j] - (ONE if r == c else ZERO) for r, i in enumerate(members)))
    rows.append((ONE,) * m)
    b = (ZERO,) * (m - 1) + (ONE,)
    return solve_exact(tuple(rows), b)


def cycle_limit_vectors(p: Matrix, r: Vector, structure: ChainStructure | None = None) -> list[Vector]:
    """The periodic orbit ``C_0, ..., C_{p-1}`` that ``P^t r`` converges to.

    ``C_j = (P^p)* P^j r`` with ``p`` the global period, so ``P C_j = C_{j+1 mod p}``.
    """
    return list(_orbit(p, r))


@lru_cache(maxsize=4096)
def _orbit(p: Matrix, r: Vector) -> tuple[Vector, ...]:
    period = _structure(p).global_period
    mstar = _limit(matpow(p, period)).limiting_matrix if period > 1 else _limit(p).limiting_matrix
    out = [matvec(mstar, r)]
    for _ in range(period - 1):
        out.append(matvec(p, out[-1]))
    return tuple(out)


@lru_cache(maxsize=4096)
def fundamental_matrix(p: Matrix) -> Matrix:
    """``Z = I - P + P*``; always nonsingular for a stochastic ``P``."""
    return matadd(matsub(identity(len(p)), p), _limit(p).limiting_matrix)


def deviation_apply(p: Matrix, x: Vector) -> Vector:
    """``H x`` where ``H = Z^{-1} - P* = Z^{-1}(I - P*)`` is the deviation matrix."""
    z = fundamental_matrix(p)
    return vecsub(solve_exact(z, x), matvec(_limit(p).limiting_matrix, x))


@lru_cache(maxsize=4096)
def tail_sum(p: Matrix, r: Vector) -> Vector:
    """``sum_{t>=0} (P^t r - C_{t mod p})`` for every start state.

    With ``M = P^p`` aperiodic, the sum regroups as ``H_M (r + P r + ... + P^{p-1} r)``.
    """
    period = _structure(p).global_period
    m = matpow(p, period) if period > 1 else p
    acc, x = r, r
    for _ in range(period - 1):
        x = matvec(p, x)
        acc = vecadd(acc, x)
    return deviation_apply(m, acc)


def is_stochastic(p: Matrix) -> bool:
    return all(all(x >= 0 for x in row) and sum(row, ZERO) == ONE for row in p)


def gain(p: Matrix, r: Vector) -> Vector:
    return matvec(_limit(p).limiting_matrix, r)

