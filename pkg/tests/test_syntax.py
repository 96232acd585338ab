import pytest

from lpadexpl.errors import LpadSyntaxError, ProgramError
from lpadexpl.syntax import (
    Atom,
    Constant,
    Literal,
    Variable,
    apply_query,
    compose,
    is_range_restricted,
    mgu,
    parse_program,
    parse_query,
    print_program,
    query_str,
)

from conftest import fixture_text


def test_parse_covid_programs():
    p = parse_program(fixture_text("covid_pos.lpad"))
    assert len(p.prob_clauses) == 2
    assert len(p.derived_clauses) == 6
    assert len(p.annotations) == 3
    n = parse_program(fixture_text("covid_neg.lpad"))
    assert len(n.prob_clauses) == 6
    assert len(n.derived_clauses) == 8
    assert len(n.annotations) == 8
    assert [c.cid for c in n.prob_clauses] == ["c1", "c2", "c3", "c4", "c5", "c6"]


def test_implicit_none_head():
    p = parse_program("covid(X):0.4; flu(X):0.3 :- contact(X).\ncontact(a).\n")
    c = p.prob_clauses[0]
    assert c.n_explicit == 2
    assert len(c.heads) == 3
    assert c.heads[2][0] == Atom("none")
    assert c.heads[2][1] == pytest.approx(0.3)
    # at most the explicit heads are printed back
    assert "none" not in print_program(p)


def test_no_none_head_when_probabilities_sum_to_one():
    p = parse_program("a:0.5; b:0.5.\n")
    c = p.prob_clauses[0]
    assert c.n_explicit == 2
    assert len(c.heads) == 2


def test_head_probability_errors():
    with pytest.raises(LpadSyntaxError):
        parse_program("a:0.7; b:0.5.\n")
    with pytest.raises(LpadSyntaxError):
        parse_program("a:-0.1.\n")


def test_reserved_none_predicate_rejected():
    with pytest.raises(ProgramError):
        parse_program("none:0.5.\n")
    with pytest.raises(ProgramError):
        parse_program("p :- none.\n")
    with pytest.raises(ProgramError):
        parse_query("none")


def test_predicate_heads_only_one_clause_kind():
    with pytest.raises(ProgramError):
        parse_program("p(a):0.5.\np(b).\n")


def test_parse_query_forms():
    q = parse_query("covid(p1), \\+flu(p2).")
    assert len(q) == 2
    assert q[0].positive and q[0].atom == Atom("covid", (Constant("p1"),))
    assert not q[1].positive
    assert parse_query("covid(p1)") == parse_query("covid(p1).")
    assert query_str(q) == "covid(p1), \\+flu(p2)"


def test_syntax_error_reports_position():
    with pytest.raises(LpadSyntaxError) as e:
        parse_program("p :- q(\n")
    assert "line" in str(e.value) and "column" in str(e.value)


def test_roundtrip_through_printer():
    p = parse_program(fixture_text("covid_neg.lpad"))
    again = parse_program(print_program(p))
    assert again.prob_clauses == p.prob_clauses
    assert again.derived_clauses == p.derived_clauses
    assert again.annotations == p.annotations


def test_annotation_parsing():
    p = parse_program('%!read \\+young(A) as: "A is not young"\nyoung(a):0.2.\n')
    ann = p.annotations[0]
    assert not ann.pattern.positive
    assert ann.pattern.atom.predicate == "young"
    assert ann.template == "A is not young"


def test_mgu_basic():
    X, Y = Variable("X"), Variable("Y")
    s = mgu(Atom("p", (X, Constant("b"))), Atom("p", (Constant("a"), Y)))
    assert s == {X: Constant("a"), Y: Constant("b")}
    assert mgu(Atom("p", (X, X)), Atom("p", (Constant("a"), Constant("b")))) is None
    assert mgu(Atom("p", (X,)), Atom("q", (X,))) is None
    assert mgu(Atom("p", (X,)), Atom("p", (Y,))) in ({X: Y}, {Y: X})


def test_mgu_is_idempotent_on_chained_variables():
    X, Y = Variable("X"), Variable("Y")
    s = mgu(Atom("p", (X, Y)), Atom("p", (Y, Constant("a"))))
    assert apply_query(s, parse_query("p(X,Y)")) == parse_query("p(a,a)")


def test_compose():
    X, Y = Variable("X"), Variable("Y")
    s = compose({X: Y}, {Y: Constant("a")})
    assert s == {X: Constant("a"), Y: Constant("a")}


def test_range_restriction():
    ok, violations = is_range_restricted(parse_program(fixture_text("covid_neg.lpad")))
    assert ok and violations == []
    ok, violations = is_range_restricted(parse_program("p(X) :- q(Y).\nq(a).\n"))
    assert not ok and "X" in violations[0]
    # a negative literal does not bind head variables
    ok, _ = is_range_restricted(parse_program("p(X) :- \\+q(X).\nq(a).\n"))
    assert not ok
    ok, _ = is_range_restricted(parse_program("p(X):0.5 :- \\+q(X), r(X).\nr(a).\nq(a).\n"))
    assert ok


def test_literal_rendering():
    lit = parse_query("\\+flu(p2)")[0]
    assert str(lit) == "¬flu(p2)"
    assert lit.to_source() == "\\+flu(p2)"
    assert lit.negate().positive
