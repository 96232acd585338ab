"""The command-line interface: outputs, formats, and exit codes."""

import json
import subprocess

import pytest

from lpadexpl.cli import main

from conftest import FIXTURES, golden_text

POS = str(FIXTURES / "covid_pos.lpad")
NEG = str(FIXTURES / "covid_neg.lpad")
RC2 = str(FIXTURES / "restrict_c2.json")
RMIN = str(FIXTURES / "restrict_min.json")


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def test_check_reports_static_diagnostics(capsys):
    code, out, _ = run(capsys, ["check", NEG])
    assert code == 0
    assert out == (
        "probabilistic clauses: 6\n"
        "derived clauses: 8\n"
        "annotations: 8\n"
        "range-restricted: yes\n"
        "stratified: yes (4 strata)\n"
        "check passed\n"
    )


def test_check_fails_on_range_violation(capsys, tmp_path):
    bad = tmp_path / "bad.lpad"
    bad.write_text("f(a):0.5.\nq(X) :- \\+f(X).\n")
    code, out, _ = run(capsys, ["check", str(bad)])
    assert code == 2
    assert "range-restricted: no" in out
    assert out.endswith("check failed\n")


def test_check_fails_on_negative_cycle(capsys, tmp_path):
    bad = tmp_path / "cycle.lpad"
    bad.write_text("p :- \\+q.\nq :- \\+p.\n")
    code, out, _ = run(capsys, ["check", str(bad)])
    assert code == 2
    assert "stratified: no" in out
    assert out.endswith("check failed\n")


# ---------------------------------------------------------------------------
# prob
# ---------------------------------------------------------------------------


def test_prob_prints_nine_decimals(capsys):
    code, out, _ = run(capsys, ["prob", POS, "covid(p1)"])
    assert (code, out) == (0, "0.936000000\n")


def test_prob_methods_agree_on_the_restricted_program(capsys):
    results = {}
    for method in ("engine", "oracle", "transform"):
        code, out, _ = run(
            capsys,
            ["prob", NEG, "covid(p1)", "--restrict", RMIN, "--method", method],
        )
        assert code == 0
        results[method] = out
    assert set(results.values()) == {"0.914716800\n"}


def test_prob_of_a_negative_query(capsys):
    code, out, _ = run(capsys, ["prob", POS, "\\+covid(p3)"])
    assert (code, out) == (0, "1.000000000\n")


def test_prob_with_constants_override_and_relevant(capsys):
    code, out, _ = run(capsys, ["prob", POS, "covid(p1)", "--constants", "p1,p2"])
    assert (code, out) == (0, "0.936000000\n")
    code, out, _ = run(capsys, ["prob", POS, "covid(p1)", "--relevant"])
    assert (code, out) == (0, "0.936000000\n")


def test_prob_respects_enumeration_limit(capsys):
    code, _, err = run(
        capsys, ["prob", NEG, "covid(p1)", "--method", "oracle", "--limit", "100"]
    )
    assert code == 2
    assert err.startswith("error:")


# ---------------------------------------------------------------------------
# explain
# ---------------------------------------------------------------------------


def test_explain_text_blocks(capsys):
    code, out, _ = run(capsys, ["explain", NEG, "covid(p1)", "--restrict", RC2])
    assert code == 0
    assert out == (
        "proof 1\ncovid(p1)\n   pcr(p1)\np = 0.9\n"
        "\n"
        "proof 2\n" + golden_text("text_proof2.txt") + "p = 0.147168\n"
    )


def test_explain_top_one(capsys):
    code, out, _ = run(
        capsys, ["explain", NEG, "covid(p1)", "--restrict", RC2, "--top", "1"]
    )
    assert (code, out) == (0, "proof 1\ncovid(p1)\n   pcr(p1)\np = 0.9\n")


def test_explain_nl_blocks(capsys):
    code, out, _ = run(
        capsys, ["explain", NEG, "covid(p1)", "--restrict", RC2, "--format", "nl"]
    )
    assert code == 0
    assert out == (
        "proof 1\np1 has covid-19 because\n   the pcr test of p1 was positive\np = 0.9\n"
        "\n"
        "proof 2\n" + golden_text("nl_proof2.txt") + "p = 0.147168\n"
    )


def test_explain_graph_single_proof(capsys):
    code, out, _ = run(
        capsys,
        ["explain", NEG, "covid(p1)", "--restrict", RC2, "--format", "graph", "--top", "1"],
    )
    assert code == 0
    assert out == (
        "digraph proof {\n"
        '  n0 [label="covid(p1)"];\n'
        '  n1 [label="pcr(p1)"];\n'
        "  n0 -> n1;\n"
        "}\n"
    )


def test_explain_graph_of_one_tree_matches_golden(capsys):
    code, out, _ = run(
        capsys, ["explain", NEG, "covid(p1)", "--restrict", RC2, "--format", "graph"]
    )
    assert code == 0
    # two proofs render as disconnected components; the second one, shifted
    # by the two nodes of the first, is the golden single-tree graph
    assert out.startswith("digraph proof {\n")
    golden = golden_text("graph_proof2.txt")
    for line in golden.splitlines()[1:-1]:
        shifted = line
        for old, new in [("n5", "n7"), ("n4", "n6"), ("n3", "n5"), ("n2", "n4"), ("n1", "n3"), ("n0", "n2")]:
            shifted = shifted.replace(old, new)
        assert shifted in out


def test_explain_json_schema(capsys):
    code, out, _ = run(
        capsys, ["explain", NEG, "covid(p1)", "--restrict", RC2, "--format", "json"]
    )
    assert code == 0
    record = json.loads(out)
    assert record["query"] == "covid(p1)"
    assert [p["rank"] for p in record["proofs"]] == [1, 2]
    assert record["proofs"][0]["probability"] == pytest.approx(0.9)
    assert record["proofs"][1]["probability"] == pytest.approx(0.147168)
    assert record["proofs"][0]["tree"]["literal"] == "covid(p1)"
    tree2 = record["proofs"][1]["tree"]
    assert [c["literal"] for c in tree2["children"]] == [
        "contact(p1,p2)",
        "covid(p2)",
        "¬protected(p1)",
    ]


def test_explain_no_proofs(capsys):
    code, out, _ = run(capsys, ["explain", POS, "covid(p9)"])
    assert (code, out) == (0, "no proofs\n")
    code, out, _ = run(capsys, ["explain", POS, "covid(p9)", "--format", "json"])
    assert code == 0
    assert json.loads(out)["proofs"] == []


def test_explain_folded(capsys):
    code, out, _ = run(
        capsys,
        ["explain", NEG, "covid(p1)", "--restrict", RC2, "--fold-depth", "1", "--top", "2"],
    )
    assert code == 0
    assert "covid(p2) ..." in out
    assert "¬protected(p1) ..." in out


def test_explain_alternatives(capsys):
    code, out, _ = run(
        capsys,
        ["explain", NEG, "covid(p1)", "--restrict", RC2, "--alternatives"],
    )
    assert code == 0
    assert "¬ffp2(p1) {surgical(p1), cloth(p1), none}" in out


def test_explain_output_is_deterministic(capsys):
    argv = ["explain", NEG, "covid(p1)", "--restrict", RC2, "--format", "nl"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second


# ---------------------------------------------------------------------------
# worlds
# ---------------------------------------------------------------------------


def test_worlds_rows_and_total(capsys):
    code, out, _ = run(
        capsys, ["worlds", NEG, "--restrict", RMIN, "--query", "covid(p1)"]
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 577
    assert lines[0] == (
        "p=0.009331200  "
        "{(c1,[p1],1),(c1,[p2],1),(c2,[p1,p2],1),(c3,[p1],1),"
        "(c4,[p1],1),(c5,[p1],1),(c6,[p1],1)}  [covid(p1)=T]"
    )
    assert lines[-1] == "total = 1.000000000"


def test_worlds_without_queries_has_no_marks(capsys):
    code, out, _ = run(capsys, ["worlds", NEG, "--restrict", RMIN])
    assert code == 0
    assert out.splitlines()[0].endswith("}")


def test_worlds_limit(capsys):
    code, _, err = run(capsys, ["worlds", NEG, "--restrict", RC2])
    assert code == 2
    assert err.startswith("error:")


# ---------------------------------------------------------------------------
# duals
# ---------------------------------------------------------------------------


def test_duals_of_a_singleton_set(capsys):
    code, out, _ = run(
        capsys, ["duals", NEG, "--restrict", RMIN, "{{(c6,[p1],1)}}"]
    )
    assert (code, out) == (0, "{{(c6,[p1],2)},{(c6,[p1],3)}}\n")


def test_duals_of_a_two_choice_composite(capsys):
    code, out, _ = run(
        capsys, ["duals", NEG, "--restrict", RMIN, "{{(c5,[p1],1),(c6,[p1],2)}}"]
    )
    assert (code, out) == (0, "{{(c5,[p1],2)},{(c6,[p1],1)},{(c6,[p1],3)}}\n")


def test_duals_of_the_empty_set(capsys):
    code, out, _ = run(capsys, ["duals", NEG, "--restrict", RMIN, "{}"])
    assert (code, out) == (0, "{{}}\n")


def test_duals_of_an_expression(capsys):
    code, out, _ = run(
        capsys, ["duals", NEG, "--restrict", RMIN, "(c5,[p1],1) & ~(c6,[p1],1)"]
    )
    assert (code, out) == (0, "{{(c5,[p1],2)},{(c6,[p1],1)}}\n")


# ---------------------------------------------------------------------------
# Errors and exit codes
# ---------------------------------------------------------------------------


def test_usage_errors_exit_one(capsys):
    for argv in [["explain"], ["bogus"], []]:
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1
    err = capsys.readouterr().err
    assert "usage:" in err


def test_syntax_error_exits_two(capsys, tmp_path):
    bad = tmp_path / "broken.lpad"
    bad.write_text("covid(p1\n")
    code, _, err = run(capsys, ["check", str(bad)])
    assert code == 2
    assert err.startswith("error:")
    assert "line" in err


def test_missing_file_exits_two(capsys):
    code, _, err = run(capsys, ["prob", "/nonexistent.lpad", "q"])
    assert code == 2
    assert err.startswith("error:")


def test_non_range_restricted_program_rejected_outside_check(capsys, tmp_path):
    bad = tmp_path / "bad.lpad"
    bad.write_text("f(a):0.5.\nq(X) :- \\+f(X).\n")
    code, _, err = run(capsys, ["prob", str(bad), "q(a)"])
    assert code == 2
    assert "not range-restricted" in err


def test_bad_restriction_exits_two(capsys, tmp_path):
    r = tmp_path / "r.json"
    r.write_text('{"c99": []}')
    code, _, err = run(capsys, ["prob", NEG, "covid(p1)", "--restrict", str(r)])
    assert code == 2
    assert err.startswith("error:")


def test_installed_script_runs():
    result = subprocess.run(
        ["lpadexpl", "prob", POS, "covid(p1)"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 0
    assert result.stdout == "0.936000000\n"
