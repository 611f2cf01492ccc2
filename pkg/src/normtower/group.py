"""The group generated by decorated chains, with two independent multipliers.

Elements are subsets of the generator universe, stored as bitmasks whose
ascending bit order is the normal-form word. The primary multiplier rewrites
by inserting letters one at a time; each crossing of a strictly lower-level
letter may flip the moving letter's bit at that level. The oracle multiplier
recomputes products from the level decomposition alone and never touches the
insertion loop, so the two paths can check each other.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from .chains import ChainGen, GenUniverse
from .errors import NotConjClosed, UniverseMismatch

__all__ = [
    "GroupElement",
    "identity",
    "gen_element",
    "element_from_word",
    "multiply",
    "inverse",
    "conjugate",
    "in_level",
    "enumerate_group",
    "render_element",
    "parse_element",
    "Coset",
    "coset_of",
    "GenSubgroup",
    "subgroup_from_gens",
    "OracleElement",
    "oracle_from_element",
    "oracle_to_element",
    "oracle_multiply",
    "fast_ops",
]


class GroupElement:
    """One group element: a bitmask over the universe's generators."""

    __slots__ = ("universe", "mask")

    def __init__(self, universe: GenUniverse, mask: int):
        self.universe = universe
        self.mask = mask

    @property
    def word(self) -> tuple[ChainGen, ...]:
        U = self.universe
        return tuple(U.gens[i] for i in _bits_ascending(self.mask))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.universe is other.universe and self.mask == other.mask

    def __hash__(self) -> int:
        return hash((id(self.universe), self.mask))

    def __mul__(self, other) -> "GroupElement":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"<{render_element(self)}>"


def _bits_ascending(m: int):
    while m:
        b = m & -m
        yield b.bit_length() - 1
        m ^= b


def _bits_descending(m: int):
    while m:
        i = m.bit_length() - 1
        yield i
        m ^= 1 << i


def _check_same(a: GroupElement, b: GroupElement):
    if a.universe is not b.universe:
        raise UniverseMismatch("elements live over different universes")


def _rmul_mask(U: GenUniverse, m: int, t: int) -> int:
    """Right-multiply the normal form m by the single letter t.

    The incoming letter crosses every letter of a strictly lower level,
    in descending id order, flipping its own bit at that level whenever
    the crossed letter is its prefix there. The final XOR inserts the
    settled letter or cancels it against an equal one.
    """
    n_of = U.n_of
    prefix = U.prefix_id
    flip = U.flip_id
    v = t
    start = U.lowstart[t]
    chunk = m >> start << start
    while chunk:
        z = chunk.bit_length() - 1
        chunk ^= 1 << z
        k = n_of[z]
        if prefix[v][k] == z:
            v = flip[v][k]
    return m ^ (1 << v)


def identity(U: GenUniverse) -> GroupElement:
    return GroupElement(U, 0)


def gen_element(U: GenUniverse, x) -> GroupElement:
    i = x if isinstance(x, int) else U.gen_id(x)
    return GroupElement(U, 1 << i)


def element_from_word(U: GenUniverse, letters) -> GroupElement:
    out = GroupElement(U, 0)
    for x in letters:
        out = multiply(out, gen_element(U, x))
    return out


def multiply(g1: GroupElement, g2: GroupElement) -> GroupElement:
    _check_same(g1, g2)
    U = g1.universe
    m = g1.mask
    for t in _bits_ascending(g2.mask):
        m = _rmul_mask(U, m, t)
    return GroupElement(U, m)


def inverse(g: GroupElement) -> GroupElement:
    # generators are involutions, so the inverse word is the reversal
    U = g.universe
    m = 0
    for t in _bits_descending(g.mask):
        m = _rmul_mask(U, m, t)
    return GroupElement(U, m)


def conjugate(a: GroupElement, b: GroupElement) -> GroupElement:
    """b * a * b^-1."""
    return multiply(multiply(b, a), inverse(b))


def in_level(g: GroupElement, alpha: int, strict: bool = True) -> bool:
    return g.mask & ~g.universe.level_mask(alpha, strict) == 0


def enumerate_group(U: GenUniverse):
    for m in range(1 << len(U.gens)):
        yield GroupElement(U, m)


def render_element(g: GroupElement) -> str:
    if g.mask == 0:
        return "e"
    return "*".join(x.render() for x in g.word)


def parse_element(U: GenUniverse, text: str) -> GroupElement:
    from .chains import parse_gen

    text = text.strip()
    if text == "e":
        return identity(U)
    return element_from_word(U, (parse_gen(p) for p in text.split("*")))


# cosets of the all-zero level subgroup ----------------------------------


@dataclass(frozen=True)
class Coset:
    universe: GenUniverse
    rep_mask: int

    @property
    def rep(self) -> GroupElement:
        return GroupElement(self.universe, self.rep_mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coset):
            return NotImplemented
        return self.universe is other.universe and self.rep_mask == other.rep_mask

    def __hash__(self) -> int:
        return hash((id(self.universe), self.rep_mask))

    def __repr__(self) -> str:
        return f"Coset<{render_element(self.rep)}>"


def _word_key(m: int) -> tuple:
    return tuple(_bits_ascending(m))


def _submasks(pool: int):
    s = pool
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & pool


def coset_of(g: GroupElement) -> Coset:
    """The left coset g * (all-zero level subgroup), canonically represented.

    The representative is the word-lexicographically least member; results
    are memoized per universe.
    """
    U = g.universe
    cached = U._coset_cache.get(g.mask)
    if cached is not None:
        return Coset(U, cached)
    pool = U.level_mask(0, strict=True)
    best = None
    best_key = None
    for h in _submasks(pool):
        m = g.mask
        for t in _bits_ascending(h):
            m = _rmul_mask(U, m, t)
        k = _word_key(m)
        if best_key is None or k < best_key:
            best, best_key = m, k
    U._coset_cache[g.mask] = best
    return Coset(U, best)


# generator-pool subgroups ------------------------------------------------


@dataclass(frozen=True)
class GenSubgroup:
    """Subgroup generated by a conjugation-closed set of generators."""

    universe: GenUniverse
    pool_mask: int

    @property
    def size(self) -> int:
        return 1 << self.pool_mask.bit_count()

    def contains_mask(self, m: int) -> bool:
        return m & ~self.pool_mask == 0

    def contains(self, g: GroupElement) -> bool:
        return g.universe is self.universe and self.contains_mask(g.mask)

    def members(self):
        positions = list(_bits_ascending(self.pool_mask))
        for k in range(1 << len(positions)):
            m = 0
            for j, p in enumerate(positions):
                if k >> j & 1:
                    m |= 1 << p
            yield GroupElement(self.universe, m)


def subgroup_from_gens(U: GenUniverse, gens) -> GenSubgroup:
    """Check the pool is closed under the conjugation action and wrap it.

    Raises NotConjClosed with an (actor, moved, image) witness otherwise.
    """
    ids = sorted(
        (x if isinstance(x, int) else U.gen_id(x)) for x in gens
    )
    idset = set(ids)
    n_of, prefix, flip = U.n_of, U.prefix_id, U.flip_id
    for x in ids:
        for y in ids:
            if n_of[y] > n_of[x] and prefix[y][n_of[x]] == x:
                z = flip[y][n_of[x]]
                if z not in idset:
                    raise NotConjClosed((U.gens[x], U.gens[y], U.gens[z]))
    pool = 0
    for i in ids:
        pool |= 1 << i
    return GenSubgroup(U, pool)


# the oracle --------------------------------------------------------------


@dataclass(frozen=True)
class OracleElement:
    """Level-decomposed element: one bit vector per chain length."""

    universe: GenUniverse
    levels: tuple

    def __eq__(self, other) -> bool:
        if not isinstance(other, OracleElement):
            return NotImplemented
        return self.universe is other.universe and self.levels == other.levels

    def __hash__(self) -> int:
        return hash((id(self.universe), self.levels))


def _level_base(U: GenUniverse, n: int) -> int:
    block = U.by_level[n]
    assert block[-1] - block[0] == len(block) - 1, "level block must be contiguous"
    return block[0]


def oracle_from_element(g: GroupElement) -> OracleElement:
    U = g.universe
    rows = [0] * (U.max_n + 1)
    for i in _bits_ascending(g.mask):
        n = U.n_of[i]
        rows[n] |= 1 << (i - _level_base(U, n))
    return OracleElement(U, tuple(rows))


def oracle_to_element(v: OracleElement) -> GroupElement:
    U = v.universe
    m = 0
    for n, row in enumerate(v.levels):
        if n not in U.by_level:
            assert row == 0
            continue
        base = _level_base(U, n)
        for j in _bits_ascending(row):
            m |= 1 << (base + j)
    return GroupElement(U, m)


def oracle_identity(U: GenUniverse) -> OracleElement:
    return OracleElement(U, tuple([0] * (U.max_n + 1)))


def oracle_multiply(v1: OracleElement, v2: OracleElement) -> OracleElement:
    """Product computed from the definition, bypassing the rewriting loop.

    Each letter of the right factor is twisted, level by level from the
    bottom of its chain upward, wherever its current prefix lies in the left
    factor; the twisted letters are then merged into the left factor by
    symmetric difference, one bit row per level.
    """
    if v1.universe is not v2.universe:
        raise UniverseMismatch("oracle elements over different universes")
    U = v1.universe
    n_of, prefix, flip = U.n_of, U.prefix_id, U.flip_id

    left_ids = set()
    for n, row in enumerate(v1.levels):
        if row:
            base = _level_base(U, n)
            for j in _bits_ascending(row):
                left_ids.add(base + j)

    rows = list(v1.levels)
    for n, row in enumerate(v2.levels):
        if not row:
            continue
        base = _level_base(U, n)
        for j in _bits_ascending(row):
            cur = base + j
            for k in range(n):
                if prefix[cur][k] in left_ids:
                    cur = flip[cur][k]
            assert n_of[cur] == n
            rows[n] ^= 1 << (cur - _level_base(U, n))
    return OracleElement(U, tuple(rows))


# bulk tables -------------------------------------------------------------


class FastOps:
    """Per-universe bulk tables built from the real rewriting loop.

    Left-multiplication columns are filled by a recurrence on the highest
    letter of the right factor, each step being one genuine insertion, so
    every table entry is reachable from scratch by the public multiplier.
    """

    __slots__ = ("universe", "_lmul", "_inv", "_conj")

    def __init__(self, U: GenUniverse):
        self.universe = U
        self._lmul: dict[int, array] = {}
        self._inv = None
        self._conj: dict[int, array] = {}

    def rmul(self, m: int, t: int) -> int:
        return _rmul_mask(self.universe, m, t)

    def mul(self, m1: int, m2: int) -> int:
        m = m1
        rmul = self.rmul
        while m2:
            b = m2 & -m2
            m = rmul(m, b.bit_length() - 1)
            m2 ^= b
        return m

    def inv_one(self, m: int) -> int:
        out = 0
        rmul = self.rmul
        while m:
            i = m.bit_length() - 1
            out = rmul(out, i)
            m ^= 1 << i
        return out

    def lmul_table(self, x: int) -> array:
        """Column of x * g over every g, by the highest-letter recurrence."""
        tab = self._lmul.get(x)
        if tab is not None:
            return tab
        U = self.universe
        size = 1 << len(U.gens)
        tab = array("l", bytes(8 * size))
        tab[0] = 1 << x
        rmul = self.rmul
        for m in range(1, size):
            t = m.bit_length() - 1
            tab[m] = rmul(tab[m ^ (1 << t)], t)
        self._lmul[x] = tab
        return tab

    def inv_table(self) -> array:
        """inverse(g) for every g: peel the first letter, reuse the rest."""
        if self._inv is not None:
            return self._inv
        U = self.universe
        size = 1 << len(U.gens)
        tab = array("l", bytes(8 * size))
        rmul = self.rmul
        for m in range(1, size):
            b = m & -m
            t = b.bit_length() - 1
            tab[m] = rmul(tab[m ^ b], t)
        self._inv = tab
        return tab

    def conj_table(self, s: int) -> array:
        """m * gen_s * m^-1 for every m.

        Peeling the lowest letter x of m leaves m = x * rest, so the
        conjugate is x * (rest-conjugate) * x: one left table hop and one
        insertion per entry.
        """
        tab = self._conj.get(s)
        if tab is not None:
            return tab
        U = self.universe
        size = 1 << len(U.gens)
        tab = array("l", bytes(8 * size))
        tab[0] = 1 << s
        rmul = self.rmul
        lmuls = [self.lmul_table(x) for x in range(len(U.gens))]
        for m in range(1, size):
            b = m & -m
            x = b.bit_length() - 1
            tab[m] = rmul(lmuls[x][tab[m ^ b]], x)
        self._conj[s] = tab
        return tab


def fast_ops(U: GenUniverse) -> FastOps:
    if U._fast is None:
        U._fast = FastOps(U)
    return U._fast
