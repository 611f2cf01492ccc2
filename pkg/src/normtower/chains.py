"""Decorated decreasing chains: the generator universe for the twisted groups.

A generator is a strictly decreasing chain through the poset together with
one bit per step. Generators are enumerated in a fixed total order so that
generator index equals position in that order everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IndexOutOfRange, UniverseTooLarge, UnknownElement
from .poset import Poset, RankInfo, rank

DEFAULT_CAP = 20


@dataclass(frozen=True)
class ChainGen:
    """One generator: a decreasing chain with a bit per adjacent step."""

    tbar: tuple
    eta: tuple

    def __post_init__(self):
        assert len(self.tbar) >= 1
        assert len(self.eta) == len(self.tbar) - 1
        assert all(b in (0, 1) for b in self.eta)

    @property
    def n(self) -> int:
        return len(self.tbar) - 1

    @property
    def last(self):
        """The chain's minimum element; rank data reads off this end."""
        return self.tbar[-1]

    def render(self) -> str:
        return "({};{})".format(
            ">".join(str(t) for t in self.tbar),
            "".join(str(b) for b in self.eta),
        )

    def __repr__(self) -> str:
        return f"ChainGen{self.render()}"


def parse_gen(text: str) -> ChainGen:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"bad generator literal: {text!r}")
    chain, _, bits = body[1:-1].rpartition(";")
    tbar = tuple(chain.split(">"))
    eta = tuple(int(c) for c in bits)
    return ChainGen(tbar, eta)


def restrict(x: ChainGen, n: int) -> ChainGen:
    """Initial segment of x down to step n (keeps the top of the chain)."""
    if n < 0 or n > x.n:
        raise IndexOutOfRange(n)
    return ChainGen(x.tbar[: n + 1], x.eta[:n])


def conj_action(x: ChainGen, y: ChainGen) -> ChainGen:
    """Twist y at step n(x) when x is a strict prefix of y; else y unchanged."""
    if y.n > x.n and restrict(y, x.n) == x:
        k = x.n
        eta = y.eta[:k] + (1 - y.eta[k],) + y.eta[k + 1 :]
        return ChainGen(y.tbar, eta)
    return y


class GenUniverse:
    """All generators over one poset, in canonical order, with fast tables.

    The order sorts by chain length descending, then by the chain's element
    indices, then by the bit string. Tables give, per generator, the id of
    each proper prefix and of each one-bit flip; the conjugation action and
    the rewriting loops run on these ids.
    """

    __slots__ = (
        "poset",
        "rank_info",
        "gens",
        "index",
        "n_of",
        "rk1",
        "rk2",
        "prefix_id",
        "flip_id",
        "max_n",
        "by_level",
        "lowstart",
        "_level_bit",
        "_coset_cache",
        "_fast",
    )

    def __init__(self, poset: Poset, gens, rank_info: RankInfo):
        self.poset = poset
        self.rank_info = rank_info
        self.gens: tuple[ChainGen, ...] = tuple(gens)
        self.index = {x: i for i, x in enumerate(self.gens)}
        self.n_of = tuple(x.n for x in self.gens)
        self.rk1 = tuple(rank_info.rk[x.last] for x in self.gens)
        self.rk2 = tuple(
            rank_info.rk[x.last] if all(x.eta) else -1 for x in self.gens
        )
        self.max_n = max(self.n_of)
        self.prefix_id = tuple(
            tuple(self.index[restrict(x, k)] for k in range(x.n))
            for x in self.gens
        )
        flips = []
        for x in self.gens:
            row = []
            for k in range(x.n):
                eta = x.eta[:k] + (1 - x.eta[k],) + x.eta[k + 1 :]
                row.append(self.index[ChainGen(x.tbar, eta)])
            flips.append(tuple(row))
        self.flip_id = tuple(flips)
        by_level: dict[int, list[int]] = {}
        for i, n in enumerate(self.n_of):
            by_level.setdefault(n, []).append(i)
        self.by_level = {n: tuple(ids) for n, ids in by_level.items()}
        # first id strictly below each generator's level block
        self.lowstart = tuple(
            self.by_level[n][-1] + 1 for n in self.n_of
        )
        self._level_bit = {}
        self._coset_cache = {}
        self._fast = None

        # ids must be sorted by the canonical order, and the all-zero level
        # set must coincide with the some-bit-clear generators
        assert all(
            self.n_of[i] >= self.n_of[i + 1] for i in range(len(self.gens) - 1)
        )
        zero = {i for i, x in enumerate(self.gens) if not all(x.eta)}
        assert zero == set(_level_ids(self, 0, strict=True))

    def __len__(self) -> int:
        return len(self.gens)

    def gen_id(self, x: ChainGen) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise UnknownElement(x.render()) from None

    def level_mask(self, alpha: int, strict: bool = True) -> int:
        key = (alpha, strict)
        if key not in self._level_bit:
            m = 0
            for i in _level_ids(self, alpha, strict):
                m |= 1 << i
            self._level_bit[key] = m
        return self._level_bit[key]


def _level_ids(U: GenUniverse, alpha: int, strict: bool):
    if strict:
        return [i for i in range(len(U.gens)) if U.rk2[i] < alpha]
    return [i for i in range(len(U.gens)) if U.rk2[i] <= alpha]


def _sort_key(U_poset: Poset, x: ChainGen):
    return (
        -x.n,
        tuple(U_poset.index(t) for t in x.tbar),
        x.eta,
    )


def enumerate_gens(P: Poset, cap: int = DEFAULT_CAP) -> GenUniverse:
    """Enumerate every decorated decreasing chain over P.

    The count is computed before materializing bit decorations, so an
    oversized universe is rejected without building it.
    """
    info = rank(P)
    chains: list[tuple] = []
    n = len(P)

    def descend(chain_ids: list[int]):
        chains.append(tuple(chain_ids))
        last = chain_ids[-1]
        m = P._below[last]
        for j in range(n):
            if m & (1 << j):
                chain_ids.append(j)
                descend(chain_ids)
                chain_ids.pop()

    for i in range(n):
        descend([i])

    total = sum(1 << (len(c) - 1) for c in chains)
    if total > cap:
        raise UniverseTooLarge(total, cap)

    gens = []
    for c in chains:
        tbar = tuple(P.elements[i] for i in c)
        for bits in range(1 << (len(c) - 1)):
            eta = tuple((bits >> k) & 1 for k in range(len(c) - 1))
            gens.append(ChainGen(tbar, eta))
    gens.sort(key=lambda x: _sort_key(P, x))
    return GenUniverse(P, gens, info)


def level_set(U: GenUniverse, alpha: int, strict: bool = True) -> tuple[ChainGen, ...]:
    """Generators whose decorated rank sits below (or at) alpha."""
    assert 0 <= alpha <= U.rank_info.rk_of_poset
    return tuple(U.gens[i] for i in _level_ids(U, alpha, strict))
