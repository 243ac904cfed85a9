"""Run the A1/A2/A3 suites for the chosen orderings and print a summary table.

    python3 scripts/run_axioms.py --seed 42 --cases 500
    python3 scripts/run_axioms.py --config suite.json --json results.json
"""

import argparse
import json
import time

from blackwell.axioms import ORDERINGS, run_axiom_suite
from blackwell.config import AxiomSuiteConfig, load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file with AxiomSuiteConfig fields")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--cases", type=int, dest="n_cases")
    ap.add_argument("--ordering", action="append", dest="orderings", choices=list(ORDERINGS))
    ap.add_argument("--json", help="write full reports here")
    args = ap.parse_args()
    cfg = load_config(AxiomSuiteConfig, args.config, seed=args.seed, n_cases=args.n_cases,
                      orderings=args.orderings and tuple(args.orderings))

    rows, dump = [], []
    for name in cfg.orderings:
        start = time.perf_counter()
        reports = run_axiom_suite(ORDERINGS[name], cfg.seed, cfg.n_cases, cfg.axioms, cfg.p_stat)
        elapsed = time.perf_counter() - start
        for r in reports:
            rows.append((name, r.axiom, r.cases, len(r.failures)))
            dump.append({"ordering": name, **r.to_dict()})
        print(f"{name}: {elapsed:.1f}s")
    print(f"\n{'ordering':<20}{'axiom':<6}{'cases':>7}{'failures':>10}")
    for name, ax, n, f in rows:
        print(f"{name:<20}{ax:<6}{n:>7}{f:>10}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"config": cfg.__dict__, "reports": dump}, fh, indent=2, sort_keys=True, default=str)


if __name__ == "__main__":
    main()
