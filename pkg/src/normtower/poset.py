"""Finite strict partial orders, their rank data, and quantifier-free types.

Everything downstream (generator enumeration, group tables, reports) needs a
deterministic element order, so a Poset stores its elements sorted by name
and keeps the relation transitively closed in per-element bitmasks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (
    CycleDetected,
    DuplicateElement,
    EmptyPoset,
    UnknownElement,
)

INCOMPARABLE = 3
LESS, EQUAL, GREATER = 0, 1, 2


class Poset:
    """Immutable finite strict partial order over named elements."""

    __slots__ = ("name", "elements", "_index", "_below")

    def __init__(self, elements, pairs, name: str | None = None):
        elems = list(elements)
        if not elems:
            raise EmptyPoset("poset needs at least one element")
        seen = set()
        for e in elems:
            if e in seen:
                raise DuplicateElement(e)
            seen.add(e)
        self.name = name or "poset"
        self.elements: tuple[str, ...] = tuple(sorted(elems))
        self._index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        below = [0] * n
        for a, b in pairs:
            ia = self._require(a)
            ib = self._require(b)
            below[ib] |= 1 << ia
        # Warshall closure on the bitmask rows; cheap at desk scale.
        for k in range(n):
            kbit = 1 << k
            bk = below[k]
            for i in range(n):
                if below[i] & kbit:
                    below[i] |= bk
        for i in range(n):
            if below[i] & (1 << i):
                raise CycleDetected(self._cycle_witness(pairs, i))
        self._below = tuple(below)

    def _require(self, name) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElement(name) from None

    def _cycle_witness(self, pairs, start: int) -> list[str]:
        # walk the raw edges back to the start element
        adj: dict[str, list[str]] = {}
        for a, b in pairs:
            adj.setdefault(a, []).append(b)
        target = self.elements[start]
        path = [target]
        seen = set()
        cur = target
        while True:
            nxt = None
            for b in sorted(adj.get(cur, ())):
                if b == target:
                    return path + [target]
                if b not in seen:
                    nxt = b
                    break
            if nxt is None:
                return path + [target]
            seen.add(nxt)
            path.append(nxt)
            cur = nxt

    # basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, name) -> bool:
        return name in self._index

    def index(self, name) -> int:
        return self._require(name)

    def lt(self, a, b) -> bool:
        return bool(self._below[self._require(b)] & (1 << self._require(a)))

    def leq(self, a, b) -> bool:
        return a == b or self.lt(a, b)

    def compare(self, a, b) -> int:
        """0 for a<b, 1 for a=b, 2 for a>b, 3 for incomparable."""
        if a == b:
            return EQUAL
        if self.lt(a, b):
            return LESS
        if self.lt(b, a):
            return GREATER
        return INCOMPARABLE

    def below_mask(self, name) -> int:
        return self._below[self._require(name)]

    def strictly_below(self, name) -> tuple[str, ...]:
        m = self.below_mask(name)
        return tuple(e for i, e in enumerate(self.elements) if m & (1 << i))

    def pairs(self) -> tuple[tuple[str, str], ...]:
        out = []
        for j, b in enumerate(self.elements):
            m = self._below[j]
            for i, a in enumerate(self.elements):
                if m & (1 << i):
                    out.append((a, b))
        return tuple(out)

    def restricted_to(self, keep, name: str | None = None) -> "Poset":
        keep = set(keep)
        pairs = [(a, b) for a, b in self.pairs() if a in keep and b in keep]
        return Poset(sorted(keep), pairs, name=name or f"{self.name}|sub")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self._below == other._below

    def __hash__(self) -> int:
        return hash((self.elements, self._below))

    def __repr__(self) -> str:
        return f"Poset({self.name!r}, {len(self.elements)} elements)"


def validate_poset(elements, pairs, name: str | None = None) -> Poset:
    """Build a Poset from raw element and strict-pair lists.

    The relation is replaced by its transitive closure; cycles (including
    reflexive pairs), duplicate or unknown names, and empty element sets
    are rejected.
    """
    return Poset(elements, pairs, name=name)


# rank ----------------------------------------------------------------


@dataclass(frozen=True)
class RankInfo:
    rk: dict
    rk_of_poset: int
    levels: dict
    rk_inf: dict


def rank(P: Poset) -> RankInfo:
    """Well-founded rank of every element, plus the poset rank.

    rk is computed by recursion over the strict order; rk_inf re-derives the
    same values by iterating the defining closure condition from zero, and
    the two are asserted equal (finite strict orders are well founded).
    """
    n = len(P)
    order = sorted(range(n), key=lambda i: P._below[i].bit_count())
    rk_list = [0] * n
    for i in order:
        m = P._below[i]
        best = -1
        for j in range(n):
            if m & (1 << j) and rk_list[j] > best:
                best = rk_list[j]
        rk_list[i] = best + 1
    rk = {e: rk_list[i] for i, e in enumerate(P.elements)}

    rk_inf = _rank_by_fixpoint(P)
    assert rk_inf == rk, "fixpoint rank disagrees with recursive rank"

    top = max(rk_list)
    levels: dict[int, tuple[str, ...]] = {}
    for a in range(top + 1):
        levels[a] = tuple(e for e in P.elements if rk[e] == a)

    # rank image below any element is an initial segment
    for i, e in enumerate(P.elements):
        seen = {rk_list[j] for j in range(n) if P._below[i] & (1 << j)}
        for beta in range(rk_list[i]):
            assert beta in seen, (e, beta)

    return RankInfo(rk=rk, rk_of_poset=top + 1, levels=levels, rk_inf=rk_inf)


def _rank_by_fixpoint(P: Poset) -> dict:
    # literal reading: rk(t) >= a iff for every b < a some s < t has rk(s) >= b
    n = len(P)
    geq = [[True] * n]  # geq[a][i]: rk(element i) >= a
    while True:
        a = len(geq)
        row = []
        for i in range(n):
            m = P._below[i]
            ok = True
            for b in range(a):
                if not any(m & (1 << j) and geq[b][j] for j in range(n)):
                    ok = False
                    break
            row.append(ok)
        if not any(row):
            break
        geq.append(row)
        if a > n:  # cannot exceed element count on a finite strict order
            raise AssertionError("rank fixpoint failed to close")
    out = {}
    for i, e in enumerate(P.elements):
        v = 0
        for a in range(len(geq)):
            if geq[a][i]:
                v = a
        out[e] = v
    return out


# width surrogates ------------------------------------------------------


@dataclass(frozen=True)
class WidthReport:
    ok: bool
    failures: tuple

    def __bool__(self) -> bool:
        return self.ok


def is_w_nontrivial(P: Poset, w: int, info: RankInfo | None = None) -> WidthReport:
    """Width-w lower-cone richness.

    True iff for every element t and every beta < rk(t) there are at least w
    elements s <= t (reflexively) with rk(s) >= beta. Failures are reported
    as (t, beta, count) triples.
    """
    info = info or rank(P)
    failures = []
    for t in P.elements:
        for beta in range(info.rk[t]):
            cnt = sum(
                1 for s in P.elements if P.leq(s, t) and info.rk[s] >= beta
            )
            if cnt < w:
                failures.append((t, beta, cnt))
    return WidthReport(ok=not failures, failures=tuple(failures))


def is_w_nontrivial_exact_rank(
    P: Poset, w: int, info: RankInfo | None = None
) -> WidthReport:
    """Variant counting only witnesses of rank exactly beta.

    Strictly stronger than is_w_nontrivial and not equivalent to it at
    finite width: on the chain a<b at w=2 the at-least count below b for
    beta=0 is {a,b} but the exact-rank count is {a} alone.
    """
    info = info or rank(P)
    failures = []
    for t in P.elements:
        for beta in range(info.rk[t]):
            cnt = sum(
                1 for s in P.elements if P.leq(s, t) and info.rk[s] == beta
            )
            if cnt < w:
                failures.append((t, beta, cnt))
    return WidthReport(ok=not failures, failures=tuple(failures))


def lower_cone_classes(P: Poset) -> tuple[tuple[str, ...], ...]:
    """Partition of the elements by equal strict lower cones."""
    buckets: dict[int, list[str]] = {}
    for e in P.elements:
        buckets.setdefault(P.below_mask(e), []).append(e)
    return tuple(tuple(v) for _, v in sorted(buckets.items()))


def is_explicitly_nontrivial(P: Poset, w: int) -> bool:
    """True iff every equal-lower-cone class has at least w members.

    When true this implies is_w_nontrivial(P, w); the implication is
    asserted on the instance rather than assumed.
    """
    ok = all(len(c) >= w for c in lower_cone_classes(P))
    if ok:
        assert is_w_nontrivial(P, w).ok, "cone-class width did not imply rank width"
    return ok


# quantifier-free types --------------------------------------------------

REL_CHARS = {LESS: "<", EQUAL: "=", GREATER: ">", INCOMPARABLE: "#"}
_CHAR_RELS = {v: k for k, v in REL_CHARS.items()}


@dataclass(frozen=True)
class QfType:
    """Arity-k order type: one relation code per ordered index pair."""

    k: int
    mat: tuple  # row-major k*k codes

    def __post_init__(self):
        assert len(self.mat) == self.k * self.k
        for i in range(self.k):
            assert self.mat[i * self.k + i] == EQUAL
            for j in range(self.k):
                a, b = self.mat[i * self.k + j], self.mat[j * self.k + i]
                assert (a, b) in ((0, 2), (2, 0), (1, 1), (3, 3))

    def code(self, l1: int, l2: int) -> int:
        return self.mat[l1 * self.k + l2]

    @property
    def codes(self) -> frozenset:
        return frozenset(
            (self.mat[i * self.k + j], i, j)
            for i in range(self.k)
            for j in range(self.k)
        )

    def render(self) -> str:
        syms = "".join(
            REL_CHARS[self.code(i, j)]
            for i in range(self.k)
            for j in range(i + 1, self.k)
        )
        return f"{self.k}:{syms}"

    @staticmethod
    def parse(text: str) -> "QfType":
        head, _, syms = text.partition(":")
        k = int(head)
        mat = [EQUAL] * (k * k)
        it = iter(syms)
        for i in range(k):
            for j in range(i + 1, k):
                c = _CHAR_RELS[next(it)]
                mat[i * k + j] = c
                mat[j * k + i] = {LESS: GREATER, GREATER: LESS}.get(c, c)
        return QfType(k, tuple(mat))

    def __repr__(self) -> str:
        return f"QfType({self.render()!r})"


def qf_type(tbar, P: Poset) -> QfType:
    k = len(tbar)
    for t in tbar:
        if t not in P:
            raise UnknownElement(t)
    mat = tuple(P.compare(a, b) for a in tbar for b in tbar)
    return QfType(k, mat)


# generators for the test zoo --------------------------------------------


def make_wide_poset(m: int, n: int) -> Poset:
    """m mutually incomparable tops, each above n mutually incomparable bottoms."""
    assert m >= 1 and n >= 1
    tops = [f"t{i}" for i in range(m)]
    bottoms = [f"b{i}" for i in range(n)]
    pairs = [(b, t) for b in bottoms for t in tops]
    return Poset(tops + bottoms, pairs, name=f"wide_{m}_{n}")


def make_chain(n: int) -> Poset:
    names = [chr(ord("a") + i) for i in range(n)]
    pairs = [(names[i], names[i + 1]) for i in range(n - 1)]
    return Poset(names, pairs, name=f"chain{n}")


def make_antichain(n: int) -> Poset:
    names = [chr(ord("a") + i) for i in range(n)]
    return Poset(names, [], name=f"antichain{n}")


def random_poset(seed: int, n: int, density: float) -> Poset:
    """Deterministic random DAG on n nodes, transitively closed."""
    assert n >= 1
    rng = random.Random(seed)
    names = [f"e{i}" for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                pairs.append((names[i], names[j]))
    return Poset(names, pairs, name=f"random_{seed}_{n}")


# file format -------------------------------------------------------------


def parse_poset_text(text: str, name: str | None = None) -> Poset:
    """Parse the line format: header `poset`, then `elem` and `lt` lines."""
    elements = []
    pairs = []
    saw_header = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not saw_header:
            if line != "poset":
                raise ValueError(f"expected 'poset' header, got {line!r}")
            saw_header = True
            continue
        fields = line.split()
        if fields[0] == "elem" and len(fields) == 2:
            elements.append(fields[1])
        elif fields[0] == "lt" and len(fields) == 3:
            pairs.append((fields[1], fields[2]))
        else:
            raise ValueError(f"bad poset line: {line!r}")
    if not saw_header:
        raise ValueError("missing 'poset' header")
    return validate_poset(elements, pairs, name=name)


def poset_to_text(P: Poset) -> str:
    lines = ["poset"]
    lines += [f"elem {e}" for e in P.elements]
    lines += [f"lt {a} {b}" for a, b in P.pairs()]
    return "\n".join(lines) + "\n"


def load_poset(path) -> Poset:
    from pathlib import Path

    p = Path(path)
    return parse_poset_text(p.read_text(encoding="utf-8"), name=p.stem)
