"""Rewriting engine vs the level-decomposition oracle, plus coset geometry."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtower.chains import ChainGen, enumerate_gens
from normtower.errors import NotConjClosed, UniverseMismatch
from normtower.group import (
    GroupElement,
    coset_of,
    element_from_word,
    enumerate_group,
    fast_ops,
    gen_element,
    identity,
    in_level,
    inverse,
    multiply,
    oracle_from_element,
    oracle_identity,
    oracle_multiply,
    oracle_to_element,
    parse_element,
    render_element,
    subgroup_from_gens,
)
from normtower.poset import make_antichain, make_chain, make_wide_poset

_UNIVERSES = {}


def universe(P):
    if P.name not in _UNIVERSES:
        _UNIVERSES[P.name] = enumerate_gens(P)
    return _UNIVERSES[P.name]


CHAIN2 = make_chain(2)
W12 = make_wide_poset(1, 2)
W13 = make_wide_poset(1, 3)


# engine vs oracle


def test_multiply_agrees_with_oracle_exhaustively_on_chain2():
    U = universe(CHAIN2)
    elems = list(enumerate_group(U))
    assert len(elems) == 16
    for g1 in elems:
        for g2 in elems:
            via_engine = multiply(g1, g2)
            via_oracle = oracle_to_element(
                oracle_multiply(oracle_from_element(g1), oracle_from_element(g2))
            )
            assert via_engine == via_oracle


def test_oracle_roundtrip_is_bijective():
    for P in (CHAIN2, W12):
        U = universe(P)
        seen = set()
        for g in enumerate_group(U):
            v = oracle_from_element(g)
            assert oracle_to_element(v) == g
            seen.add(v)
        assert len(seen) == 1 << len(U.gens)


def test_oracle_identity_is_identity():
    U = universe(CHAIN2)
    v = oracle_from_element(gen_element(U, 0))
    assert oracle_multiply(oracle_identity(U), v) == v
    assert oracle_multiply(v, oracle_identity(U)) == v


# group laws


def test_group_laws_exhaustive_on_chain2():
    U = universe(CHAIN2)
    elems = list(enumerate_group(U))
    e = identity(U)
    for g in elems:
        assert multiply(e, g) == g
        assert multiply(g, e) == g
        assert multiply(inverse(g), g) == e
        assert multiply(g, inverse(g)) == e
    for g1 in elems:
        for g2 in elems:
            for g3 in elems:
                assert multiply(multiply(g1, g2), g3) == multiply(
                    g1, multiply(g2, g3)
                )


def test_group_laws_sampled_on_w13():
    U = universe(W13)
    fast = fast_ops(U)
    rng = random.Random(7)
    size = 1 << len(U.gens)
    for _ in range(300):
        a, b, c = (rng.randrange(size) for _ in range(3))
        assert fast.mul(fast.mul(a, b), c) == fast.mul(a, fast.mul(b, c))
        assert fast.mul(a, fast.inv_one(a)) == 0
        assert fast.mul(fast.inv_one(a), a) == 0


def test_generators_are_involutions():
    for P in (CHAIN2, W12, W13, make_antichain(3)):
        U = universe(P)
        fast = fast_ops(U)
        for i in range(len(U.gens)):
            assert fast.mul(1 << i, 1 << i) == 0


def test_chain2_non_involutions_are_exactly_four():
    # over the two-chain the group is not boolean: the four elements mixing
    # one decorated long chain with the top singleton square to the product
    # of the two decorated long chains
    U = universe(CHAIN2)
    fast = fast_ops(U)
    non_inv = {
        render_element(GroupElement(U, m))
        for m in range(16)
        if fast.mul(m, m) != 0
    }
    assert non_inv == {
        "(b>a;0)*(b;)",
        "(b>a;1)*(b;)",
        "(b>a;0)*(a;)*(b;)",
        "(b>a;1)*(a;)*(b;)",
    }
    square = {
        render_element(GroupElement(U, fast.mul(m, m)))
        for m in range(16)
        if fast.mul(m, m) != 0
    }
    assert square == {"(b>a;0)*(b>a;1)"}


def test_fast_tables_match_public_multiplier():
    for P in (CHAIN2, W12):
        U = universe(P)
        fast = fast_ops(U)
        size = 1 << len(U.gens)
        inv = fast.inv_table()
        for m1 in range(size):
            g1 = GroupElement(U, m1)
            assert inverse(g1).mask == inv[m1]
        for x in range(len(U.gens)):
            col = fast.lmul_table(x)
            for m in range(size):
                assert multiply(gen_element(U, x), GroupElement(U, m)).mask == col[m]
        for s in range(len(U.gens)):
            tab = fast.conj_table(s)
            for m in range(size):
                g = GroupElement(U, m)
                want = multiply(multiply(g, gen_element(U, s)), inverse(g))
                assert tab[m] == want.mask


def test_universe_mismatch_rejected():
    g1 = identity(universe(CHAIN2))
    g2 = identity(universe(W12))
    with pytest.raises(UniverseMismatch):
        multiply(g1, g2)


# normal form properties


@given(st.integers(0, 2**30), st.integers(1, 10))
@settings(max_examples=200, deadline=None)
def test_word_length_bound(seed, length):
    U = universe(W13)
    rng = random.Random(seed)
    word = [rng.randrange(len(U.gens)) for _ in range(length)]
    g = element_from_word(U, word)
    assert g.mask.bit_count() <= length


def test_word_roundtrip():
    for P in (CHAIN2, W12):
        U = universe(P)
        for g in enumerate_group(U):
            assert element_from_word(U, g.word) == g


def test_render_parse_roundtrip():
    U = universe(W12)
    for g in enumerate_group(U):
        assert parse_element(U, render_element(g)) == g
    assert render_element(identity(U)) == "e"


# levels and cosets


def test_in_level_matches_generator_ranks():
    U = universe(CHAIN2)
    for g in enumerate_group(U):
        for alpha in range(3):
            want = all(U.rk2[i] < alpha for i in range(4) if g.mask >> i & 1)
            assert in_level(g, alpha) == want


def test_chain2_cosets():
    U = universe(CHAIN2)
    cosets = {coset_of(g) for g in enumerate_group(U)}
    # |G| / |level-0 subgroup| = 16 / 2
    assert len(cosets) == 8
    # the identity's coset collects exactly the level-0 subgroup
    unit = coset_of(identity(U))
    members = [g for g in enumerate_group(U) if coset_of(g) == unit]
    assert {render_element(g) for g in members} == {"e", "(b>a;0)"}


def test_coset_representative_is_word_least():
    U = universe(W13)
    fast = fast_ops(U)
    pool = U.level_mask(0)
    rng = random.Random(3)
    for _ in range(50):
        m = rng.randrange(1 << len(U.gens))
        c = coset_of(GroupElement(U, m))
        mem = {fast.mul(c.rep_mask, h) for h in _submasks_list(pool)}
        assert m in mem
        assert min(mem, key=_word_key) == c.rep_mask


def _submasks_list(pool):
    out = []
    s = pool
    while True:
        out.append(s)
        if s == 0:
            return out
        s = (s - 1) & pool


def _word_key(m):
    out = []
    while m:
        b = m & -m
        out.append(b.bit_length() - 1)
        m ^= b
    return tuple(out)


def test_cosets_partition_the_group():
    U = universe(CHAIN2)
    by_coset = {}
    for g in enumerate_group(U):
        by_coset.setdefault(coset_of(g), []).append(g)
    sizes = {len(v) for v in by_coset.values()}
    assert sizes == {2}


# generator-pool subgroups


def test_level_pool_is_conj_closed():
    U = universe(W13)
    pool_ids = [i for i in range(len(U.gens)) if U.level_mask(0) >> i & 1]
    S = subgroup_from_gens(U, pool_ids)
    assert S.size == 8
    assert S.contains(identity(U))


def test_open_pool_rejected_with_witness():
    U = universe(CHAIN2)
    ids = {x.render(): i for i, x in enumerate(U.gens)}
    with pytest.raises(NotConjClosed) as exc:
        subgroup_from_gens(U, [ids["(b;)"], ids["(b>a;0)"]])
    actor, moved, image = exc.value.witness
    assert actor.render() == "(b;)"
    assert moved.render() == "(b>a;0)"
    assert image.render() == "(b>a;1)"
