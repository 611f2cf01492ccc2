"""Order layer: construction, ranks, width, qf types, and the file format."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtower.errors import CycleDetected, DuplicateElement, EmptyPoset, UnknownElement
from normtower.poset import (
    EQUAL,
    GREATER,
    INCOMPARABLE,
    LESS,
    QfType,
    is_explicitly_nontrivial,
    is_w_nontrivial,
    is_w_nontrivial_exact_rank,
    lower_cone_classes,
    make_antichain,
    make_chain,
    make_wide_poset,
    parse_poset_text,
    poset_to_text,
    qf_type,
    random_poset,
    rank,
    validate_poset,
)

ZOO = [
    make_chain(2),
    make_chain(3),
    make_antichain(3),
    make_wide_poset(1, 2),
    make_wide_poset(1, 3),
    make_wide_poset(2, 3),
] + [random_poset(seed, 5, 0.4) for seed in range(6)]


def brute_rank(P):
    """Independent rank oracle: naive recursion over strict lower sets."""
    memo = {}

    def rk(e):
        if e not in memo:
            below = P.strictly_below(e)
            memo[e] = 1 + max((rk(s) for s in below), default=-1)
        return memo[e]

    return {e: rk(e) for e in P.elements}


# construction and validation


def test_empty_rejected():
    with pytest.raises(EmptyPoset):
        validate_poset([], [])


def test_duplicate_rejected():
    with pytest.raises(DuplicateElement):
        validate_poset(["a", "a"], [])


def test_unknown_pair_member_rejected():
    with pytest.raises(UnknownElement):
        validate_poset(["a"], [("a", "z")])


def test_two_cycle_rejected_with_witness():
    with pytest.raises(CycleDetected) as exc:
        validate_poset(["a", "b"], [("a", "b"), ("b", "a")])
    # witness walks back to its starting element
    msg = str(exc.value)
    assert "a" in msg and "b" in msg


def test_reflexive_pair_rejected():
    with pytest.raises(CycleDetected):
        validate_poset(["a"], [("a", "a")])


def test_transitive_closure_is_taken():
    P = validate_poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert P.lt("a", "c")
    assert P.compare("c", "a") == GREATER


def test_compare_codes():
    P = make_wide_poset(1, 2)
    assert P.compare("b0", "t0") == LESS
    assert P.compare("t0", "b0") == GREATER
    assert P.compare("b0", "b1") == INCOMPARABLE
    assert P.compare("b0", "b0") == EQUAL


def test_restricted_to_keeps_induced_order():
    P = make_chain(3)
    Q = P.restricted_to(["a", "c"])
    assert Q.lt("a", "c")
    assert len(Q) == 2


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_random_poset_is_transitive(seed):
    P = random_poset(seed, 6, 0.35)
    for a in P.elements:
        for b in P.elements:
            for c in P.elements:
                if P.lt(a, b) and P.lt(b, c):
                    assert P.lt(a, c)


# rank


@pytest.mark.parametrize("P", ZOO, ids=lambda p: p.name)
def test_rank_matches_brute_oracle(P):
    info = rank(P)
    oracle = brute_rank(P)
    assert info.rk == oracle
    assert info.rk_of_poset == max(oracle.values()) + 1


def test_rank_levels_partition_elements():
    for P in ZOO:
        info = rank(P)
        seen = [e for a in sorted(info.levels) for e in info.levels[a]]
        assert sorted(seen) == sorted(P.elements)
        for a, row in info.levels.items():
            assert all(info.rk[e] == a for e in row)


def test_rank_strictly_increases_upward():
    for P in ZOO:
        info = rank(P)
        for a, b in P.pairs():
            assert info.rk[a] < info.rk[b]


def test_known_ranks():
    info = rank(make_chain(3))
    assert info.rk == {"a": 0, "b": 1, "c": 2}
    assert info.rk_of_poset == 3
    info = rank(make_antichain(3))
    assert set(info.rk.values()) == {0}
    assert info.rk_of_poset == 1
    info = rank(make_wide_poset(2, 3))
    assert info.rk["t0"] == 1 and info.rk["b2"] == 0
    assert info.rk_of_poset == 2


# width surrogates


def test_wide_poset_is_wide():
    assert is_w_nontrivial(make_wide_poset(1, 3), 2).ok
    assert is_w_nontrivial(make_wide_poset(2, 3), 2).ok


def test_wide_enough_cone_classes():
    # the lone top is its own cone class, so wide posets fail above w=1
    assert is_explicitly_nontrivial(make_antichain(3), 3)
    assert not is_explicitly_nontrivial(make_wide_poset(1, 3), 2)
    assert not is_explicitly_nontrivial(make_chain(2), 2)


def test_chain_width_gap():
    # reflexive counting saves the chain, exact-rank counting does not
    P = make_chain(2)
    assert is_w_nontrivial(P, 2).ok
    rep = is_w_nontrivial_exact_rank(P, 2)
    assert not rep.ok
    assert rep.failures == (("b", 0, 1),)


def test_cone_classes_partition():
    P = make_wide_poset(1, 3)
    classes = lower_cone_classes(P)
    assert sorted(e for c in classes for e in c) == sorted(P.elements)
    assert ("b0", "b1", "b2") in classes


# quantifier-free types


def test_qf_type_of_known_tuples():
    P = make_chain(2)
    assert qf_type(("a", "b"), P).render() == "2:<"
    assert qf_type(("b", "a"), P).render() == "2:>"
    assert qf_type(("a", "a"), P).render() == "2:="
    Q = make_antichain(3)
    assert qf_type(("a", "b"), Q).render() == "2:#"


def test_qf_type_render_parse_roundtrip():
    for P in ZOO:
        names = P.elements[:3] if len(P) >= 3 else P.elements
        for t1 in names:
            for t2 in names:
                p = qf_type((t1, t2, names[0]), P)
                assert QfType.parse(p.render()) == p


def test_qf_type_rejects_unknown():
    with pytest.raises(UnknownElement):
        qf_type(("a", "nope"), make_chain(2))


def test_qf_type_mat_consistency_guard():
    with pytest.raises(AssertionError):
        QfType(2, (3, 0, 0, 3))  # asymmetric off-diagonal pair


# file format


def test_poset_text_roundtrip():
    for P in ZOO:
        Q = parse_poset_text(poset_to_text(P), name=P.name)
        assert Q == P
        assert Q.name == P.name


def test_parse_rejects_missing_header():
    with pytest.raises(ValueError):
        parse_poset_text("elem a\n")


def test_parse_ignores_comments_and_blanks():
    P = parse_poset_text("poset\n# top\nelem a\n\nelem b\nlt a b # tail\n")
    assert P.lt("a", "b")
