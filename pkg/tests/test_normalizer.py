"""Normalizer computations against naive conjugation, and tower shapes."""

import random

import pytest

from normtower.chains import enumerate_gens
from normtower.errors import StepLimitExceeded
from normtower.group import (
    GroupElement,
    enumerate_group,
    fast_ops,
    inverse,
    multiply,
)
from normtower.normalizer import (
    KTowerReport,
    Subgroup,
    check_level_normalizers,
    level_subgroup,
    normalizer,
    tower,
    tower_k_fast,
    tower_twisted_brute,
    whole_group,
)
from normtower.poset import make_antichain, make_chain, make_wide_poset

_UNIVERSES = {}


def universe(P):
    if P.name not in _UNIVERSES:
        _UNIVERSES[P.name] = enumerate_gens(P)
    return _UNIVERSES[P.name]


SINGLETON = make_chain(1)
CHAIN2 = make_chain(2)
ANTICHAIN2 = make_antichain(2)
ANTICHAIN3 = make_antichain(3)
W12 = make_wide_poset(1, 2)
W13 = make_wide_poset(1, 3)


def brute_normalizer(U, member_masks):
    """Two-sided conjugation over every group element, via public multiply."""
    out = set()
    S = [GroupElement(U, m) for m in member_masks]
    for g in enumerate_group(U):
        gi = inverse(g)
        if all(
            multiply(multiply(g, s), gi).mask in member_masks
            and multiply(multiply(gi, s), g).mask in member_masks
            for s in S
        ):
            out.add(g.mask)
    return frozenset(out)


def closure_of(U, seed_masks):
    fast = fast_ops(U)
    members = {0} | {fast.inv_one(m) for m in seed_masks} | set(seed_masks)
    while True:
        fresh = {
            fast.mul(a, b) for a in members for b in members
        } - members
        if not fresh:
            return frozenset(members)
        members |= fresh


# subgroup containers


def test_pool_subgroup_membership_and_size():
    U = universe(CHAIN2)
    zero = level_subgroup(U, 0)
    assert zero.size == 2
    assert zero.contains_mask(0)
    full = whole_group(U)
    assert full.size == 16
    assert all(full.contains_mask(m) for m in range(16))


def test_explicit_members_recover_the_pool():
    U = universe(CHAIN2)
    pool = U.level_mask(1, strict=True)
    explicit = Subgroup(U, members=frozenset(_submasks(pool)))
    assert explicit.pool_mask == pool
    assert explicit == Subgroup(U, pool_mask=pool)


def _submasks(pool):
    s = pool
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & pool


# normalizer vs naive conjugation


@pytest.mark.parametrize("alpha", [0, 1])
def test_normalizer_of_level_pools_matches_brute(alpha):
    U = universe(CHAIN2)
    S = level_subgroup(U, alpha)
    got = normalizer(whole_group(U), S)
    assert got.members == brute_normalizer(U, S.members)


def test_normalizer_of_explicit_subgroups_matches_brute():
    U = universe(CHAIN2)
    rng = random.Random(41)
    for _ in range(6):
        seeds = [rng.randrange(16) for _ in range(2)]
        members = closure_of(U, seeds)
        S = Subgroup(U, members=members)
        got = normalizer(whole_group(U), S)
        assert got.members == brute_normalizer(U, members)


def test_pool_and_explicit_paths_agree():
    U = universe(W12)
    S_pool = level_subgroup(U, 0)
    S_members = Subgroup(U, members=S_pool.members, pool_mask=None)
    # explicit construction may rediscover the pool; force the slow path
    S_members.pool_mask = None
    a = normalizer(whole_group(U), S_pool)
    b = normalizer(whole_group(U), S_members)
    assert a.members == b.members


def test_normalizer_contains_the_subgroup():
    U = universe(W12)
    for alpha in range(U.rank_info.rk_of_poset + 1):
        S = level_subgroup(U, alpha)
        N = normalizer(whole_group(U), S)
        assert all(N.contains_mask(m) for m in S.members)


# group-side towers


def test_tower_on_chain2_climbs_the_levels():
    U = universe(CHAIN2)
    rep = tower(whole_group(U), level_subgroup(U, 0))
    assert rep.tau == 2
    assert rep.sizes == (2, 8, 16)
    assert rep.levels[1] == level_subgroup(U, 1)
    assert rep.levels[-1] == whole_group(U)


def test_tower_from_the_whole_group_is_already_stable():
    U = universe(CHAIN2)
    rep = tower(whole_group(U), whole_group(U))
    assert rep.tau == 0


def test_tower_step_limit():
    U = universe(CHAIN2)
    with pytest.raises(StepLimitExceeded):
        tower(whole_group(U), level_subgroup(U, 0), max_steps=1)


# twisted-side towers


@pytest.mark.parametrize("P", [SINGLETON, ANTICHAIN2], ids=lambda P: P.name)
def test_brute_twisted_tower_is_the_preimage_of_the_group_tower(P):
    U = universe(P)
    brute = tower_twisted_brute(U)
    fast = tower_k_fast(U)
    assert isinstance(fast, KTowerReport)
    assert len(brute) == fast.tau + 1
    assert len(brute[0]) == 2
    from normtower.twisted import enumerate_twisted

    elements = list(enumerate_twisted(U))
    for i, glevel in enumerate(fast.glevels):
        want = frozenset(p for p in elements if glevel.contains_mask(p.g.mask))
        assert brute[i + 1] == want


def test_fast_tower_heights():
    assert tower_k_fast(universe(CHAIN2)).tau == 3
    assert tower_k_fast(universe(ANTICHAIN3)).tau == 2
    report = tower_k_fast(universe(CHAIN2))
    assert report.expected == 3
    assert report.match
    assert report.gpart_sizes == (1, 2, 8, 16)


def test_fast_tower_accepts_a_poset_argument():
    report = tower_k_fast(CHAIN2)
    assert report.tau == 3


# level-by-level structure


def test_level_normalizers_on_chain2():
    rep = check_level_normalizers(universe(CHAIN2))
    assert rep.all_supersets
    assert rep.top_fixed
    assert [v.alpha for v in rep.verdicts] == [0, 1]
    assert all(v.equal for v in rep.verdicts)
    assert all(v.outsider_witnesses == () for v in rep.verdicts)


def test_level_normalizers_on_w13():
    rep = check_level_normalizers(universe(W13))
    assert rep.all_supersets
    assert all(v.equal for v in rep.verdicts)


def test_level_normalizers_report_carries_width_verdict():
    rep = check_level_normalizers(universe(ANTICHAIN3), w=2)
    assert rep.w == 2
    assert rep.width.ok
