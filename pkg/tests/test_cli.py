import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import DATA


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "blackwell", *map(str, args)],
                          capture_output=True, text=True, timeout=300)
    return proc.returncode, proc.stdout, proc.stderr


def machine(*args):
    code, out, err = run(*args, "--format", "machine")
    return code, json.loads(out) if out.strip() else None, err


def test_validate():
    code, out, _ = run("validate", DATA / "swap.json")
    assert code == 0 and out.startswith("valid: 2 states, 1 actions")


def test_validate_rowsum_names_state_and_action():
    code, _, err = run("validate", DATA / "bad_rowsum.json")
    assert code == 2
    assert "row sum 5/6" in err and "state" in err and "action" in err


def test_validate_rejects_decimals():
    code, _, err = run("validate", DATA / "bad_decimal.json")
    assert code == 2 and "decimals rejected; use p/q" in err


def test_missing_file_and_bad_json(tmp_path):
    assert run("validate", tmp_path / "nope.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run("validate", bad)
    assert code == 2 and "not valid JSON" in err


def test_stream():
    assert run("stream", DATA / "swap.json", "--horizon", 6)[1].strip() == "1 0 1 0 1 0"
    assert run("stream", DATA / "absorbing.json", "--horizon", 4)[1].strip() == "1 1/2 1/4 1/8"
    assert run("stream", DATA / "swap.json", "--horizon", 1)[1].strip() == "1"
    assert run("stream", DATA / "swap.json", "--horizon", 0)[0] == 2


def test_stream_needs_policy_when_ambiguous():
    code, _, err = run("stream", DATA / "dominance.json")
    assert code == 2 and "--policy" in err


def test_stream_rational_round_trip():
    _, doc, _ = machine("stream", DATA / "absorbing.json", "--horizon", 12)
    assert [Fraction(x) for x in doc["stream"]] == [Fraction(1, 2 ** t) for t in range(12)]


def test_decompose():
    _, doc, _ = machine("decompose", DATA / "swap.json")
    assert doc["period"] == 2 and doc["cycle"] == ["1", "0"] and set(doc["tail"]) == {"0"}
    _, doc, _ = machine("decompose", DATA / "absorbing.json")
    assert doc["period"] == 1 and doc["cycle"] == ["0"]
    assert doc["tail"][:3] == ["1", "1/2", "1/4"] and doc["certificate"]["q"] == "1/2"
    assert doc["tail_sum"] == "2"
    _, doc, _ = machine("decompose", DATA / "identity.json")
    assert doc["period"] == 1 and doc["cycle"] == ["1"] and set(doc["tail"]) == {"0"}
    assert run("decompose", DATA / "swap.json", "--horizon", 3)[0] == 2


def test_compare_swap_pair():
    code, doc, _ = machine("compare", f"{DATA / 'swap.json'}:s1", f"{DATA / 'swap.json'}:s2")
    assert code == 0
    assert [r["result"] for r in doc["results"]] == ["strictly_better"] * 2
    assert [r["evidence"] for r in doc["results"]] == ["1/2"] * 2


def test_compare_identical_and_constants():
    code, doc, _ = machine("compare", f"{DATA / 'swap.json'}:s1", f"{DATA / 'swap.json'}:s1")
    assert {r["result"] for r in doc["results"]} == {"equivalent"}
    code, doc, _ = machine("compare", DATA / "constant_one.json", DATA / "constant_zero.json",
                           "--criterion", "blackwell")
    r = doc["results"][0]
    assert r["result"] == "strictly_better" and r["evidence"] == "+inf"
    assert r["signature"]["coefficients"][0] == "1"


def test_compare_oracle():
    code, out, _ = run("compare", f"{DATA / 'swap.json'}:s1", f"{DATA / 'swap.json'}:s2", "--oracle")
    assert code == 0 and "oracle beta=0.99: +0.497487" in out and "oracle n=100000" in out


def test_compare_bad_operand():
    assert run("compare", f"{DATA / 'swap.json'}:nowhere", f"{DATA / 'swap.json'}:s1")[0] == 2


def test_optimal():
    _, doc, _ = machine("optimal", DATA / "swap.json", "--all-states")
    assert doc["maximal_rules"] == ["go,go"]
    _, doc, _ = machine("optimal", DATA / "dominance.json")
    assert len(doc["maximal_rules"]) == 1
    _, doc, _ = machine("optimal", DATA / "gain_vs_transient.json", "--state", "choice")
    assert doc["maximal_rules"] and all(r.startswith("b,") for r in doc["maximal_rules"])
    code, out, _ = run("optimal", DATA / "gain_vs_transient.json", "--all-states", "--verbose")
    assert code == 0 and "vs" in out


def test_axioms_pass_and_zero_cases():
    code, out, _ = run("axioms", "--seed", 42, "--cases", 200, "--suite", "all")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run("axioms", "--seed", 1, "--cases", 0)
    assert code == 0 and "zero cases run" in out


@pytest.mark.parametrize("ordering,suite", [("always-equivalent", "a1"), ("truncated", "a3"),
                                            ("discounted-half", "theorem1")])
def test_axioms_planted_failure(ordering, suite):
    code, out, _ = run("axioms", "--seed", 3, "--cases", 10, "--suite", suite, "--ordering", ordering)
    assert code == 1 and "FAIL" in out and "counterexample" in out


def test_axioms_requires_seed():
    assert run("axioms")[0] == 2


def test_machine_output_is_byte_identical():
    args = ("axioms", "--seed", 9, "--cases", 30, "--suite", "a2", "--ordering", "truncated",
            "--format", "machine")
    first, second = run(*args), run(*args)
    assert first[1] == second[1] and first[1]
    args = ("compare", f"{DATA / 'absorbing.json'}:s1", f"{DATA / 'swap.json'}:s2", "--oracle",
            "--format", "machine")
    assert run(*args)[1] == run(*args)[1]
