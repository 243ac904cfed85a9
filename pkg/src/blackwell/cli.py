"""Command-line front end.

Exit codes: 0 success, 1 axiom-suite failure, 2 input error, 3 internal
invariant breach.  ``--format machine`` emits canonical JSON (sorted keys),
byte-identical for identical inputs, flags and seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import axioms
from .mdp import (
    Mdp,
    MdpError,
    PolicySpec,
    enumerate_decision_rules,
    format_rule,
    generate_stream,
    parse_policy,
    policy_stream,
    stationary_stream,
    validate_mdp,
)
from .ordering import (
    avg_overtaking_compare,
    blackwell_compare,
    find_blackwell_optimal,
    format_extended,
)
from .streams import CertificateError, decompose

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def load_mdp(path: str) -> Mdp:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from None
    try:
        return validate_mdp(raw)
    except MdpError as exc:
        raise InputError(f"{path}: {exc}") from None


def mdp_digest(mdp: Mdp) -> str:
    blob = json.dumps(mdp.to_raw(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def resolve_policy(mdp: Mdp, text: str | None) -> PolicySpec:
    if text is None:
        rules = enumerate_decision_rules(mdp)
        if len(rules) != 1:
            raise InputError("--policy is required when the MDP has more than one decision rule")
        return PolicySpec.stationary(rules[0])
    try:
        return parse_policy(mdp, text)
    except MdpError as exc:
        raise InputError(str(exc)) from None


def resolve_state(mdp: Mdp, name: str | None) -> int:
    if name is None:
        return 0
    try:
        return mdp.state_index(name)
    except MdpError as exc:
        raise InputError(str(exc)) from None


def format_policy(mdp: Mdp, policy: PolicySpec) -> str:
    cyc = ";".join(format_rule(mdp, f) for f in policy.cycle)
    if not policy.prefix:
        return cyc
    return ";".join(format_rule(mdp, f) for f in policy.prefix) + "|" + cyc


# -- commands ----------------------------------------------------------------------

def cmd_validate(args) -> tuple[int, dict, list[str]]:
    mdp = load_mdp(args.path)
    report = {"valid": True, "states": list(mdp.states), "actions": list(mdp.actions),
              "mdp_digest": mdp_digest(mdp)}
    lines = [f"valid: {len(mdp.states)} states, {len(mdp.actions)} actions (digest {report['mdp_digest']})"]
    return EXIT_OK, report, lines


def cmd_stream(args):
    mdp = load_mdp(args.path)
    policy = resolve_policy(mdp, args.policy)
    s = resolve_state(mdp, args.state)
    if args.horizon < 1:
        raise InputError("--horizon must be >= 1")
    u = generate_stream(mdp, policy, s, args.horizon)
    report = {"mdp_digest": mdp_digest(mdp), "policy": format_policy(mdp, policy),
              "state": mdp.states[s], "stream": [str(x) for x in u]}
    return EXIT_OK, report, [" ".join(report["stream"])]


def cmd_decompose(args):
    mdp = load_mdp(args.path)
    policy = resolve_policy(mdp, args.policy)
    s = resolve_state(mdp, args.state)
    u = policy_stream(mdp, policy, s)
    try:
        d = decompose(u, args.horizon)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    shown = [str(x) for x in d.tail_samples[: args.show]]
    cert = d.decay_certificate
    report = {
        "mdp_digest": mdp_digest(mdp),
        "policy": format_policy(mdp, policy),
        "state": mdp.states[s],
        "period": d.period,
        "cycle": [str(x) for x in d.periodic_part.cycle],
        "horizon": d.horizon,
        "tail": shown,
        "tail_sum": str(d.tail_sum),
        "certificate": {"q": str(cert.q), "onset": cert.onset, "kind": cert.kind},
    }
    lines = [
        f"period p = {d.period}",
        f"periodic part cycle: ({' '.join(report['cycle'])})",
        f"tail (first {len(shown)}): {' '.join(shown)}",
        f"tail sum: {d.tail_sum}",
        f"decay certificate: q = {cert.q}, T0 = {cert.onset} ({cert.kind})",
    ]
    return EXIT_OK, report, lines


def _operand(operand: str, policy_text: str | None):
    path, sep, state = operand.rpartition(":")
    if not sep or not path:
        path, state = operand, None
    mdp = load_mdp(path)
    policy = resolve_policy(mdp, policy_text)
    s = resolve_state(mdp, state)
    return mdp, policy, s, policy_stream(mdp, policy, s)


def cmd_compare(args):
    mdp_a, pol_a, sa, u = _operand(args.a, args.policy_a)
    mdp_b, pol_b, sb, v = _operand(args.b, args.policy_b)
    crits = ["blackwell", "avg-overtaking"] if args.criterion == "both" else [args.criterion]
    results, lines = [], []
    for c in crits:
        rep = (blackwell_compare(u, v, K=args.K, oracle=args.oracle) if c == "blackwell"
               else avg_overtaking_compare(u, v, oracle=args.oracle))
        results.append(rep.to_dict())
        lines.append(f"{rep.criterion}: {rep.result.value} (evidence {format_extended(rep.evidence)})")
        if rep.signature is not None:
            lines.append("  signature a_-1..a_K: " + " ".join(map(str, rep.signature.coefficients)))
        for x, y in rep.oracle_signs:
            lines.append(f"  oracle {'beta' if c == 'blackwell' else 'n'}={x}: {y:+.10g}")
    report = {
        "a": {"mdp_digest": mdp_digest(mdp_a), "policy": format_policy(mdp_a, pol_a), "state": mdp_a.states[sa]},
        "b": {"mdp_digest": mdp_digest(mdp_b), "policy": format_policy(mdp_b, pol_b), "state": mdp_b.states[sb]},
        "results": results,
    }
    return EXIT_OK, report, lines


def cmd_optimal(args):
    mdp = load_mdp(args.path)
    s = None if args.all_states or args.state is None else resolve_state(mdp, args.state)
    rules = find_blackwell_optimal(mdp, s)
    names = [format_rule(mdp, f) for f in rules]
    report = {"mdp_digest": mdp_digest(mdp), "mode": "all-states" if s is None else mdp.states[s],
              "maximal_rules": names}
    lines = [f"maximal rules ({report['mode']}):"] + ["  " + n for n in names]
    if args.verbose:
        evidence = []
        states = range(mdp.n_states) if s is None else [s]
        for f in enumerate_decision_rules(mdp):
            for st in states:
                ref = stationary_stream(mdp, rules[0], st)
                other = stationary_stream(mdp, f, st)
                rep = blackwell_compare(ref, other)
                evidence.append({"rule": format_rule(mdp, f), "state": mdp.states[st],
                                 "best_vs_rule": rep.result.value, "evidence": format_extended(rep.evidence)})
                lines.append(f"  {names[0]} vs {format_rule(mdp, f)} @ {mdp.states[st]}: "
                             f"{rep.result.value} ({format_extended(rep.evidence)})")
        report["evidence"] = evidence
    return EXIT_OK, report, lines


SUITES = {"a1": ["A1"], "a2": ["A2"], "a3": ["A3"], "theorem1": [], "all": ["A1", "A2", "A3"]}


def cmd_axioms(args):
    if args.cases < 0:
        raise InputError("--cases must be >= 0")
    if args.ordering:
        orders = {args.ordering: axioms.ORDERINGS[args.ordering]}
    else:
        orders = {"blackwell": axioms.ORDERINGS["blackwell"],
                  "avg-overtaking": axioms.ORDERINGS["avg-overtaking"]}
    reports = []
    for name, order in orders.items():
        for rep in axioms.run_axiom_suite(order, args.seed, args.cases, SUITES[args.suite]):
            reports.append({"ordering": name, **rep.to_dict()})
    if args.suite in ("theorem1", "all"):
        if args.ordering and args.ordering not in ("blackwell", "avg-overtaking"):
            rep = axioms.run_theorem1_suite(args.seed, args.cases, order_v=axioms.ORDERINGS[args.ordering])
            reports.append({"ordering": f"blackwell vs {args.ordering}", **rep.to_dict()})
        else:
            rep = axioms.run_theorem1_suite(args.seed, args.cases)
            reports.append({"ordering": "blackwell vs avg-overtaking", **rep.to_dict()})
    failed = any(r["failures"] for r in reports)
    lines = []
    for r in reports:
        status = "PASS" if not r["failures"] else "FAIL"
        lines.append(f"{status} {r['axiom']} [{r['ordering']}]: {r['cases']} cases, {len(r['failures'])} failures")
        for f in r["failures"][:3]:
            lines.append("  counterexample: " + json.dumps(f, sort_keys=True))
    if args.cases == 0:
        lines.append("zero cases run")
    report = {"seed": args.seed, "cases": args.cases, "suite": args.suite, "reports": reports}
    return (EXIT_FAIL if failed else EXIT_OK), report, lines


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "machine"], default="text")

    p = argparse.ArgumentParser(prog="blackwell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", parents=[common], help="check an MDP file")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("stream", parents=[common], help="print expected-reward stream")
    sp.add_argument("path")
    sp.add_argument("--policy", help='"a,b" (stationary) or "a,b;b,b|a,a" (prefix|cycle)')
    sp.add_argument("--state")
    sp.add_argument("--horizon", type=int, default=10)
    sp.set_defaults(func=cmd_stream)

    sp = sub.add_parser("decompose", parents=[common], help="periodic part plus vanishing tail")
    sp.add_argument("path")
    sp.add_argument("--policy")
    sp.add_argument("--state")
    sp.add_argument("--horizon", type=int, default=None)
    sp.add_argument("--show", type=int, default=8, help="tail samples to print")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("compare", parents=[common], help="compare two streams")
    sp.add_argument("a", metavar="PATH_A:STATE_A")
    sp.add_argument("b", metavar="PATH_B:STATE_B")
    sp.add_argument("--policy-a")
    sp.add_argument("--policy-b")
    sp.add_argument("--criterion", choices=["blackwell", "avg-overtaking", "both"], default="both")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--K", type=int, default=None, help="signature length (default S_a + S_b + 2)")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("optimal", parents=[common], help="maximal decision rules")
    sp.add_argument("path")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--state")
    g.add_argument("--all-states", action="store_true")
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_optimal)

    sp = sub.add_parser("axioms", parents=[common], help="run axiom and coincidence suites")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--cases", type=int, default=200)
    sp.add_argument("--suite", choices=list(SUITES), default="all")
    sp.add_argument("--ordering", choices=list(axioms.ORDERINGS), help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_axioms)
    return p


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return str(x)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report, lines = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AssertionError, CertificateError) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.format == "machine":
        echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "format")}
        doc = {"command": echo, **report}
        print(json.dumps(doc, sort_keys=True, indent=2, default=_json_default))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
