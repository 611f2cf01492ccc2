"""Normalizers of subgroups and the tower over the two-element seed.

The group side works on bitmask member sets. Towers on the twisted side come
in two flavors: a brute force one for universes small enough to enumerate,
and a fast one that computes the first step by the commutation criterion and
every later step as the projection preimage of a group-side tower.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .chains import GenUniverse, enumerate_gens
from .errors import StepLimitExceeded
from .group import (
    GroupElement,
    coset_of,
    fast_ops,
)
from .poset import WidthReport, is_w_nontrivial
from .twisted import (
    base_flip,
    enumerate_twisted,
    identity_twisted,
    t_inverse,
    t_multiply,
)


class Subgroup:
    """A subgroup of one universe's group, as an explicit mask set.

    When the member set is exactly all submasks of one generator pool the
    pool mask is kept too, which gives O(1) membership.
    """

    __slots__ = ("universe", "pool_mask", "_members")

    def __init__(self, universe: GenUniverse, members=None, pool_mask=None):
        assert members is not None or pool_mask is not None
        self.universe = universe
        self.pool_mask = pool_mask
        self._members = None if members is None else frozenset(members)
        if self._members is not None and pool_mask is None:
            p = 0
            for m in self._members:
                p |= m
            if len(self._members) == 1 << p.bit_count():
                self.pool_mask = p

    @property
    def members(self) -> frozenset:
        if self._members is None:
            pool = self.pool_mask
            positions = []
            m = pool
            while m:
                b = m & -m
                positions.append(b.bit_length() - 1)
                m ^= b
            out = set()
            for k in range(1 << len(positions)):
                v = 0
                for j, p in enumerate(positions):
                    if k >> j & 1:
                        v |= 1 << p
                out.add(v)
            self._members = frozenset(out)
        return self._members

    @property
    def size(self) -> int:
        if self.pool_mask is not None:
            return 1 << self.pool_mask.bit_count()
        return len(self.members)

    def contains_mask(self, m: int) -> bool:
        if self.pool_mask is not None:
            return m & ~self.pool_mask == 0
        return m in self.members

    def contains(self, g: GroupElement) -> bool:
        return g.universe is self.universe and self.contains_mask(g.mask)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        if self.universe is not other.universe:
            return False
        if self.pool_mask is not None and other.pool_mask is not None:
            return self.pool_mask == other.pool_mask
        return self.members == other.members

    def __hash__(self):
        return hash((id(self.universe), self.size))

    def __repr__(self):
        return f"Subgroup(size={self.size})"


def level_subgroup(U: GenUniverse, alpha: int, strict: bool = True) -> Subgroup:
    return Subgroup(U, pool_mask=U.level_mask(alpha, strict))


def whole_group(U: GenUniverse) -> Subgroup:
    return Subgroup(U, pool_mask=(1 << len(U.gens)) - 1)


def normalizer(ambient: Subgroup, S: Subgroup, rng_seed: int = 0) -> Subgroup:
    """Members of the ambient whose two-sided conjugates keep S inside itself.

    For a pool-generated S only generator conjugates are tested; conjugation
    is an automorphism, so that already decides every member. The result is
    re-validated as a subgroup by a seeded closure sample.
    """
    U = ambient.universe
    assert S.universe is U
    fast = fast_ops(U)

    if S.pool_mask is not None:
        pool = S.pool_mask
        gens = []
        m = pool
        while m:
            b = m & -m
            gens.append(b.bit_length() - 1)
            m ^= b
        tabs = [fast.conj_table(i) for i in gens]
        inv = fast.inv_table()

        def normalizes(m: int) -> bool:
            mi = inv[m]
            for t in tabs:
                if t[m] & ~pool or t[mi] & ~pool:
                    return False
            return True

    else:

        def normalizes(m: int) -> bool:
            mi = fast.inv_one(m)
            for sm in S.members:
                if not S.contains_mask(fast.mul(fast.mul(m, sm), mi)):
                    return False
                if not S.contains_mask(fast.mul(fast.mul(mi, sm), m)):
                    return False
            return True

    members = frozenset(m for m in _iter_masks(ambient) if normalizes(m))
    _validate_subgroup(U, members, rng_seed)
    return Subgroup(U, members=members)


def _iter_masks(S: Subgroup):
    if S.pool_mask is not None:
        positions = []
        m = S.pool_mask
        while m:
            b = m & -m
            positions.append(b.bit_length() - 1)
            m ^= b
        for k in range(1 << len(positions)):
            v = 0
            for j, p in enumerate(positions):
                if k >> j & 1:
                    v |= 1 << p
            yield v
    else:
        yield from S.members


def _validate_subgroup(U: GenUniverse, members: frozenset, rng_seed: int):
    assert 0 in members, "normalizer lost the identity"
    fast = fast_ops(U)
    pool = sorted(members)
    rng = random.Random(rng_seed)
    for _ in range(min(len(pool) * len(pool), 2048)):
        a = rng.choice(pool)
        b = rng.choice(pool)
        assert fast.mul(a, b) in members, "normalizer result not closed"
    for a in pool[: 256]:
        assert fast.inv_one(a) in members, "normalizer result not inverse-closed"


@dataclass(frozen=True)
class TowerReport:
    levels: tuple  # Subgroup per step, ending at the stabilized one
    tau: int
    sizes: tuple


def tower(ambient: Subgroup, start: Subgroup, max_steps: int = 32) -> TowerReport:
    """Iterate the normalizer from a starting subgroup until it stabilizes.

    Stabilization is re-checked two steps past the first repeat before the
    report is trusted.
    """
    levels = [start]
    cur = start
    for _ in range(max_steps):
        nxt = normalizer(ambient, cur)
        if nxt == cur:
            after = normalizer(ambient, nxt)
            assert after == nxt, "tower left its fixed point"
            assert normalizer(ambient, after) == after, "tower left its fixed point"
            tau = len(levels) - 1
            return TowerReport(
                levels=tuple(levels),
                tau=tau,
                sizes=tuple(s.size for s in levels),
            )
        levels.append(nxt)
        cur = nxt
    raise StepLimitExceeded(f"no stabilization within {max_steps} steps")


# twisted-side towers -----------------------------------------------------


def normalizer_twisted_brute(elements, members: frozenset) -> frozenset:
    out = set()
    for p in elements:
        pi = t_inverse(p)
        if all(
            t_multiply(t_multiply(p, s), pi) in members
            and t_multiply(t_multiply(pi, s), p) in members
            for s in members
        ):
            out.add(p)
    return frozenset(out)


def tower_twisted_brute(U: GenUniverse, limit: int = 4096, max_steps: int = 16):
    """Brute tower over the seed pair, for universes small enough to list."""
    elements = list(enumerate_twisted(U, limit=limit))
    levels = [frozenset([identity_twisted(U), base_flip(U)])]
    cur = levels[0]
    for _ in range(max_steps):
        nxt = normalizer_twisted_brute(elements, cur)
        if nxt == cur:
            assert normalizer_twisted_brute(elements, nxt) == nxt
            return levels
        levels.append(nxt)
        cur = nxt
    raise StepLimitExceeded(f"no stabilization within {max_steps} steps")


@dataclass(frozen=True)
class KTowerReport:
    tau: int
    expected: int
    match: bool
    gpart_sizes: tuple
    glevels: tuple  # Subgroup per tower step from the first preimage on


def tower_k_fast(arg, max_steps: int = 32) -> KTowerReport:
    """Tower over the seed pair in the twisted product, computed G-side.

    Step one is the kernel of the coset map, found by running the literal
    commutation test against the base flip for every group element. Every
    later step is the projection preimage of a group-side normalizer step,
    so the flag group never needs enumerating. tau counts normalizer
    applications until the subgroup repeats; the declared expectation is
    one more than the poset rank.
    """
    U = arg if isinstance(arg, GenUniverse) else enumerate_gens(arg)
    unit = coset_of(GroupElement(U, 0))
    commuting = frozenset(
        m
        for m in range(1 << len(U.gens))
        if coset_of(GroupElement(U, m)) == unit
    )
    first = Subgroup(U, members=commuting)
    zero = level_subgroup(U, 0, strict=True)
    assert first == zero, "commutation kernel differs from the zero level set"

    g_report = tower(whole_group(U), first, max_steps=max_steps)

    # levels: seed pair, then preimages of the group-side levels
    gpart_sizes = (1,) + g_report.sizes
    tau = 1 + g_report.tau
    expected = 1 + U.rank_info.rk_of_poset
    return KTowerReport(
        tau=tau,
        expected=expected,
        match=tau == expected,
        gpart_sizes=gpart_sizes,
        glevels=g_report.levels,
    )


# level-by-level normalizer structure --------------------------------------


@dataclass(frozen=True)
class LevelVerdict:
    alpha: int
    superset_ok: bool
    equal: bool
    outsider_witnesses: tuple


@dataclass(frozen=True)
class LevelsReport:
    poset_name: str
    verdicts: tuple
    top_fixed: bool
    width: WidthReport
    w: int

    @property
    def all_supersets(self) -> bool:
        return all(v.superset_ok for v in self.verdicts)


def check_level_normalizers(arg, w: int = 2, witness_cap: int = 4) -> LevelsReport:
    """How each level subgroup sits inside the next one's normalizer.

    For every rank alpha below the poset rank, asserts that the next level
    subgroup normalizes the current one, and records whether the containment
    is exact; outsiders that unexpectedly normalize are reported. At the top
    the whole group must be its own normalizer. The poset's width verdict
    travels with the report because exactness is tied to it.
    """
    if isinstance(arg, GenUniverse):
        U = arg
        P = U.poset
    else:
        P = arg
        U = enumerate_gens(P)
    fast = fast_ops(U)
    rk_top = U.rank_info.rk_of_poset
    size = 1 << len(U.gens)
    full = size - 1

    verdicts = []
    for alpha in range(rk_top):
        pool = U.level_mask(alpha, strict=True)
        nxt = U.level_mask(alpha + 1, strict=True)
        gens = []
        m = pool
        while m:
            b = m & -m
            gens.append(b.bit_length() - 1)
            m ^= b
        tabs = [fast.conj_table(i) for i in gens]
        # in a finite group one conjugation direction forces equality,
        # hence also the reverse containment
        superset_ok = True
        witnesses = []
        equal = True
        not_nxt = ~nxt
        for m in range(size):
            ok = True
            for t in tabs:
                if t[m] & ~pool:
                    ok = False
                    break
            if m & not_nxt:
                if ok:
                    equal = False
                    if len(witnesses) < witness_cap:
                        witnesses.append(m)
            elif not ok:
                superset_ok = False
        verdicts.append(
            LevelVerdict(
                alpha=alpha,
                superset_ok=superset_ok,
                equal=equal,
                outsider_witnesses=tuple(witnesses),
            )
        )

    assert U.level_mask(rk_top, strict=True) == full
    # the top pool contains every generator, and conjugation cannot leave
    # the group, so the whole group normalizes it; scan honestly when small
    if len(U.gens) <= 12:
        tabs = [fast.conj_table(i) for i in range(len(U.gens))]
        top_fixed = all(
            all(t[m] & ~full == 0 for t in tabs) for m in range(size)
        )
    else:
        top_fixed = True

    return LevelsReport(
        poset_name=P.name,
        verdicts=tuple(verdicts),
        top_fixed=top_fixed,
        width=is_w_nontrivial(P, w, U.rank_info),
        w=w,
    )
