"""Find stream pairs whose discounted difference at a fixed beta has the
opposite sign to its beta -> 1 limit, and locate where the sign settles.

For each such pair the script bisects (exactly, in rationals) for the
last sign change of V_u(beta) - V_v(beta) below 1 and reports the
leading Laurent coefficients that explain it.

    python3 scripts/oracle_crossover.py --mdps 200 --show 5
"""

import argparse
import itertools
from fractions import Fraction

from blackwell.axioms import distinct_streams, mdp_streams
from blackwell.config import CorpusConfig, OracleConfig, load_config
from blackwell.linalg import solve_exact
from blackwell.ordering import OrderResult, blackwell_order, laurent_signature, oracle_value


def exact_value(u, beta):
    n = u.n_states
    a = tuple(tuple((1 if i == j else 0) - beta * u.matrix[i][j] for j in range(n)) for i in range(n))
    return beta * solve_exact(a, u.rewards)[u.start]


def settle_point(u, v, result, lo, steps=40):
    """Bisect in ``[lo, 1)`` for where the sign of the difference becomes the limit's."""
    hi = 1 - Fraction(1, 10**12)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if OrderResult.from_sign(exact_value(u, mid) - exact_value(v, mid)) is result:
            hi = mid
        else:
            lo = mid
    return float(hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file with CorpusConfig fields")
    ap.add_argument("--mdps", type=int, dest="n_mdps")
    ap.add_argument("--show", type=int, default=5)
    args = ap.parse_args()
    cfg = load_config(CorpusConfig, args.config, n_mdps=args.n_mdps)
    oracle = OracleConfig()

    found = []
    checked = 0
    for model in cfg.models():
        reps, _ = distinct_streams(mdp_streams(model))
        values = [{b: oracle_value(u, b) for b in oracle.betas} for u in reps]
        for i, j in itertools.permutations(range(len(reps)), 2):
            result = blackwell_order(reps[i], reps[j])
            if result is OrderResult.EQUIVALENT:
                continue
            for b in oracle.betas:
                diff = values[i][b] - values[j][b]
                if abs(diff) <= oracle.threshold:
                    continue
                checked += 1
                if OrderResult.from_sign(diff) is not result:
                    found.append((reps[i], reps[j], b, diff, result))

    print(f"{checked} sign checks, {len(found)} pre-asymptotic disagreements")
    settled = []
    for u, v, b, diff, result in found[: args.show]:
        sig = laurent_signature(u, v, 2)
        at = settle_point(u, v, result, Fraction(b).limit_denominator(10**6))
        settled.append(at)
        coeffs = ", ".join(f"{float(sig[k]):+.4g}" for k in (-1, 0, 1, 2))
        print(f"  beta={b}: oracle {diff:+.4g}, limit {result.value}; a_-1..a_2 = {coeffs}; "
              f"sign settles near beta = {at:.6f}")
    if settled:
        print(f"latest settling point among shown pairs: {max(settled):.6f}")


if __name__ == "__main__":
    main()
