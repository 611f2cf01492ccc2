"""Decorated-chain generators and their finite universes."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtower.chains import (
    ChainGen,
    conj_action,
    enumerate_gens,
    level_set,
    parse_gen,
    restrict,
)
from normtower.errors import IndexOutOfRange, UniverseTooLarge, UnknownElement
from normtower.poset import make_antichain, make_chain, make_wide_poset, random_poset

POSETS = [
    make_chain(2),
    make_chain(3),
    make_antichain(3),
    make_wide_poset(1, 2),
    make_wide_poset(1, 3),
]


def brute_gens(P):
    """All decorated strictly decreasing chains, assembled by brute force."""
    names = list(P.elements)
    chains = []

    def grow(chain):
        chains.append(tuple(chain))
        for s in names:
            if P.lt(s, chain[-1]):
                grow(chain + [s])

    for e in names:
        grow([e])
    out = set()
    for c in chains:
        for eta in itertools.product((0, 1), repeat=len(c) - 1):
            out.add(ChainGen(c, eta))
    return out


def test_generator_counts():
    assert len(enumerate_gens(make_chain(2)).gens) == 4
    assert len(enumerate_gens(make_chain(3)).gens) == 13
    assert len(enumerate_gens(make_antichain(3)).gens) == 3
    assert len(enumerate_gens(make_wide_poset(1, 2)).gens) == 7
    assert len(enumerate_gens(make_wide_poset(1, 3)).gens) == 10
    assert len(enumerate_gens(make_wide_poset(2, 3)).gens) == 17


@pytest.mark.parametrize("P", POSETS, ids=lambda p: p.name)
def test_universe_matches_brute_enumeration(P):
    U = enumerate_gens(P)
    assert set(U.gens) == brute_gens(P)


def test_cap_rejects_oversized_universe():
    with pytest.raises(UniverseTooLarge):
        enumerate_gens(make_wide_poset(2, 3), cap=10)
    # the bound is on the generator count, not the element count
    enumerate_gens(make_wide_poset(2, 3), cap=17)


def test_ids_sorted_by_descending_chain_length():
    for P in POSETS:
        U = enumerate_gens(P)
        lengths = [x.n for x in U.gens]
        assert lengths == sorted(lengths, reverse=True)


def test_gen_id_roundtrip_and_unknown():
    U = enumerate_gens(make_chain(2))
    for i, x in enumerate(U.gens):
        assert U.gen_id(x) == i
    with pytest.raises(UnknownElement):
        U.gen_id(ChainGen(("z",), ()))


def test_level_data():
    U = enumerate_gens(make_chain(2))
    # the lone decorated two-step chain with a cleared bit sits below level 0
    low = level_set(U, 0)
    assert {x.render() for x in low} == {"(b>a;0)"}
    assert U.level_mask(0).bit_count() == 1
    # every generator lies below the poset rank
    assert U.level_mask(U.rank_info.rk_of_poset) == (1 << len(U.gens)) - 1


def test_rk2_values():
    U = enumerate_gens(make_chain(2))
    by_render = {x.render(): U.rk2[i] for i, x in enumerate(U.gens)}
    assert by_render == {
        "(a;)": 0,
        "(b;)": 1,
        "(b>a;0)": -1,
        "(b>a;1)": 0,
    }


def test_restrict_prefixes():
    x = ChainGen(("c", "b", "a"), (1, 0))
    assert restrict(x, 0) == ChainGen(("c",), ())
    assert restrict(x, 1) == ChainGen(("c", "b"), (1,))
    assert restrict(x, 2) == x
    with pytest.raises(IndexOutOfRange):
        restrict(x, 3)


def test_conj_action_twists_prefix_extensions():
    x = ChainGen(("c", "b"), (1,))
    y = ChainGen(("c", "b", "a"), (1, 0))
    z = conj_action(x, y)
    assert z.eta == (1, 1)
    # same chain, non-prefix decoration: untouched
    w = ChainGen(("c", "b", "a"), (0, 0))
    assert conj_action(x, w) == w
    # shorter or equal chains are never twisted
    assert conj_action(y, x) == x


def test_conj_action_is_involution_preserving_length():
    for P in POSETS:
        U = enumerate_gens(P)
        for x in U.gens:
            for y in U.gens:
                z = conj_action(x, y)
                assert z.n == y.n
                assert z.tbar == y.tbar
                assert conj_action(x, z) == y


def test_parse_gen_roundtrip():
    for P in POSETS:
        for x in enumerate_gens(P).gens:
            assert parse_gen(x.render()) == x


def test_parse_gen_rejects_garbage():
    with pytest.raises(ValueError):
        parse_gen("b>a;0")


@given(st.integers(0, 5000))
@settings(max_examples=30, deadline=None)
def test_random_universe_prefix_tables_consistent(seed):
    P = random_poset(seed, 4, 0.5)
    try:
        U = enumerate_gens(P, cap=16)
    except UniverseTooLarge:
        return
    for i, x in enumerate(U.gens):
        for k in range(x.n):
            assert U.gens[U.prefix_id[i][k]] == restrict(x, k)
            flipped = U.gens[U.flip_id[i][k]]
            assert flipped.tbar == x.tbar
            assert flipped.eta[k] != x.eta[k]
