import pytest

from lpadexpl.errors import ProgramError, StratificationError
from lpadexpl.grounder import ground, relevant_subset, stratify, theta_key
from lpadexpl.syntax import Variable, Constant, parse_program, parse_query

from conftest import fixture_text, load_restriction


def test_ground_covid_pos(pos_ground):
    g = pos_ground
    assert len(g.instances) == 12  # 3 for c1, 9 for c2
    assert len(g.derived) == 6
    assert g.constants == ("p1", "p2", "p3")
    assert g.selection_count() == 157_464


def test_instances_in_clause_then_lexicographic_order(pos_ground):
    cids = [inst.cid for inst in pos_ground.instances]
    assert cids == ["c1"] * 3 + ["c2"] * 9
    c1_keys = [inst.key for inst in pos_ground.instances[:3]]
    assert c1_keys == [
        (("X", "p1"),),
        (("X", "p2"),),
        (("X", "p3"),),
    ]


def test_theta_key_sorted_by_variable_name():
    key = theta_key({Variable("Y"): Constant("p2"), Variable("X"): Constant("p1")})
    assert key == (("X", "p1"), ("Y", "p2"))


def test_instance_lookup(pos_ground):
    inst = pos_ground.instance("c2", (("X", "p1"), ("Y", "p2")))
    assert inst.n_explicit == 2
    assert inst.n_heads == 3  # covid, flu, implicit none
    assert str(inst.head_atom(1)) == "covid(p1)"
    assert inst.prob(3) == pytest.approx(0.3)
    assert inst.values_str() == "[p1,p2]"
    with pytest.raises(ProgramError):
        pos_ground.instance("c9", ())


def test_restriction_limits_instances(neg_ground):
    by_cid = {}
    for inst in neg_ground.instances:
        by_cid[inst.cid] = by_cid.get(inst.cid, 0) + 1
    assert by_cid["c2"] == 2
    assert by_cid["c1"] == 3  # unrestricted clauses keep all groundings
    assert neg_ground.selection_count() == 7_962_624


def test_minimal_restriction(neg_ground_min):
    assert len(neg_ground_min.instances) == 7
    assert neg_ground_min.selection_count() == 576


def test_restriction_validation(neg_program):
    with pytest.raises(ProgramError):
        ground(neg_program, restriction={"c99": [{"X": "p1"}]})
    with pytest.raises(ProgramError):
        ground(neg_program, restriction={"c1": [{"Z": "p1"}]})


def test_constants_override(pos_program):
    g = ground(pos_program, constants=["p1", "p2"])
    assert len(g.instances) == 2 + 4


def test_derived_clauses_fully_ground(neg_ground_full):
    assert len(neg_ground_full.derived) == 12  # 2 rules x 3 constants + 6 facts
    assert all(not_vars_free(c) for c in neg_ground_full.derived)


def not_vars_free(clause):
    from lpadexpl.syntax import clause_vars

    return clause_vars(clause) == ()


def test_relevant_subset_keeps_reachable_instances(neg_ground_full):
    rs = relevant_subset(neg_ground_full, parse_query("covid(p1)"))
    assert len(rs.instances) == 24  # contagion chains reach every instance
    rs2 = relevant_subset(neg_ground_full, parse_query("pcr(p1)"))
    assert len(rs2.instances) == 0
    assert len(rs2.derived) == 1


def test_strata_follow_negation(neg_ground_full):
    strata = neg_ground_full.strata
    assert strata[("young", 1)] < strata[("vulnerable", 1)]
    assert strata[("vulnerable", 1)] < strata[("protected", 1)]
    assert strata[("protected", 1)] < strata[("covid", 1)]
    assert max(strata.values()) == 3


def test_positive_recursion_is_stratified():
    p = parse_program(
        "edge(a,b).\nedge(b,c).\n"
        "path(X,Y) :- edge(X,Y).\n"
        "path(X,Y) :- edge(X,Z), path(Z,Y).\n"
    )
    strata = stratify(ground(p))
    assert strata[("path", 2)] == strata[("edge", 2)] == 0


def test_negative_cycle_detected():
    g = ground(parse_program("p :- \\+q.\nq :- \\+p.\n"))
    with pytest.raises(StratificationError) as e:
        stratify(g)
    assert "negative cycle" in str(e.value)


def test_negative_self_loop_detected():
    g = ground(parse_program("p :- \\+p.\n"))
    with pytest.raises(StratificationError) as e:
        stratify(g)
    assert "p -> p" in str(e.value)
