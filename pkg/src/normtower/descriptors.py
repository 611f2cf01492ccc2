"""Formal words over tuple positions, evaluated into the groups.

A group descriptor is a list of items, each selecting positions of a tuple
and decorating the selection with bits; an item whose selection is not
strictly decreasing in the poset contributes an identity factor. A twisted
descriptor adds coset-flag parts. Equivalence of descriptors at a fixed
quantifier-free type is decided by evaluating on stored realizing instances,
with cross-instance agreement asserted rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chains import ChainGen, GenUniverse, enumerate_gens
from .errors import (
    ArityMismatch,
    ArityTooLarge,
    SearchBudgetExceeded,
    TypeNotRealizedInTable,
    UnrealizableType,
)
from .group import (
    GroupElement,
    _submasks,
    coset_of,
    fast_ops,
    gen_element,
    identity,
    multiply,
)
from .poset import Poset, QfType, make_antichain, make_chain, make_wide_poset, qf_type
from .twisted import TwistedElement, t_multiply


@dataclass(frozen=True)
class GroupDescriptor:
    """Items of (position sequence, bit string), one arity for the whole word."""

    k: int
    items: tuple  # of (lbar: tuple[int], eta: tuple[int])

    def __post_init__(self):
        for lbar, eta in self.items:
            assert len(eta) == len(lbar) - 1
            assert all(0 <= i < self.k for i in lbar)
            assert all(b in (0, 1) for b in eta)

    def render(self) -> str:
        if not self.items:
            return "e"
        return ";".join(
            "({}|{})".format(
                ",".join(str(i) for i in lbar),
                "".join(str(b) for b in eta),
            )
            for lbar, eta in self.items
        )


@dataclass(frozen=True)
class TwistedDescriptor:
    """A group part followed by any number of nonempty coset-flag parts."""

    k: int
    parts: tuple  # of GroupDescriptor

    def __post_init__(self):
        assert len(self.parts) >= 1
        for part in self.parts:
            assert part.k == self.k
        for part in self.parts[1:]:
            assert part.items, "flag parts must be nonempty"

    def render(self) -> str:
        return "||".join(part.render() for part in self.parts)


def parse_group_descriptor(text: str, k: int) -> GroupDescriptor:
    text = text.strip()
    if text == "e":
        return GroupDescriptor(k, ())
    items = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ValueError(f"bad descriptor item: {chunk!r}")
        body, _, bits = chunk[1:-1].partition("|")
        lbar = tuple(int(s) for s in body.split(","))
        eta = tuple(int(c) for c in bits)
        items.append((lbar, eta))
    return GroupDescriptor(k, tuple(items))


def parse_twisted_descriptor(text: str, k: int) -> TwistedDescriptor:
    parts = tuple(parse_group_descriptor(p, k) for p in text.split("||"))
    return TwistedDescriptor(k, parts)


def support(d) -> frozenset:
    if isinstance(d, GroupDescriptor):
        out = set()
        for lbar, _ in d.items:
            out.update(lbar)
        return frozenset(out)
    out = set()
    for part in d.parts:
        out |= support(part)
    return frozenset(out)


def eval_group(tbar, rho: GroupDescriptor, U: GenUniverse) -> GroupElement:
    """Left-to-right product of the selected generators.

    A selection that is not a strictly decreasing chain contributes the
    identity instead of a generator.
    """
    if len(tbar) != rho.k:
        raise ArityMismatch(f"tuple length {len(tbar)} vs arity {rho.k}")
    P = U.poset
    out = identity(U)
    for lbar, eta in rho.items:
        sel = tuple(tbar[i] for i in lbar)
        if all(P.lt(sel[j + 1], sel[j]) for j in range(len(sel) - 1)):
            out = multiply(out, gen_element(U, ChainGen(sel, eta)))
    return out


def eval_twisted(tbar, d: TwistedDescriptor, U: GenUniverse) -> TwistedElement:
    if len(tbar) != d.k:
        raise ArityMismatch(f"tuple length {len(tbar)} vs arity {d.k}")
    out = TwistedElement(eval_group(tbar, d.parts[0], U), frozenset())
    for part in d.parts[1:]:
        flag = TwistedElement(
            identity(U), frozenset([coset_of(eval_group(tbar, part, U))])
        )
        out = t_multiply(out, flag)
    return out


# probe registry and type catalogs ----------------------------------------


def _plus_point(P: Poset, extra: str, name: str) -> Poset:
    return Poset(list(P.elements) + [extra], P.pairs(), name=name)


def probe_zoo() -> tuple[Poset, ...]:
    """Deterministic list of small posets used to realize types."""
    zoo = [
        make_chain(2),
        make_antichain(2),
        make_chain(3),
        make_antichain(3),
        _plus_point(make_chain(2), "c", "chain2_plus_point"),
        make_wide_poset(1, 2),
        _plus_point(make_chain(3), "d", "chain3_plus_point"),
        make_wide_poset(2, 2),
    ]
    return tuple(sorted(zoo, key=lambda P: (len(P), P.name)))


@dataclass(frozen=True)
class TypeCatalog:
    k: int
    witnesses: dict  # QfType -> tuple of (Poset, tbar), canonical first
    _universes: dict

    def universe(self, P: Poset) -> GenUniverse:
        U = self._universes.get(P.name)
        if U is None:
            U = enumerate_gens(P)
            self._universes[P.name] = U
        return U

    @property
    def types(self) -> tuple:
        return tuple(self.witnesses)


_CATALOGS: dict = {}


def enumerate_qf_types(k: int, probes=None) -> TypeCatalog:
    """All arity-k types realized over the probes, with realizing instances.

    Probes are scanned smallest first and tuples in lexicographic order, so
    the first stored witness of each type is its canonical instance.
    """
    if k > 4:
        raise ArityTooLarge(f"arity {k} over the supported bound 4")
    assert k >= 1
    if probes is None:
        if k in _CATALOGS:
            return _CATALOGS[k]
        probes = probe_zoo()
        cache_key = k
    else:
        probes = tuple(sorted(probes, key=lambda P: (len(P), P.name)))
        cache_key = None
    witnesses: dict[QfType, list] = {}
    per_probe_cap = 3
    for P in probes:
        counts: dict[QfType, int] = {}
        for tbar in itertools.product(P.elements, repeat=k):
            p = qf_type(tbar, P)
            have = counts.get(p, 0)
            if have < per_probe_cap:
                counts[p] = have + 1
                witnesses.setdefault(p, []).append((P, tbar))
    catalog = TypeCatalog(
        k=k,
        witnesses={p: tuple(ws) for p, ws in witnesses.items()},
        _universes={},
    )
    if cache_key is not None:
        _CATALOGS[cache_key] = catalog
    return catalog


# equivalence ---------------------------------------------------------------


def _verdict(d1, d2, level: int, P: Poset, tbar, catalog: TypeCatalog) -> bool:
    U = catalog.universe(P)
    if level == 0:
        return eval_group(tbar, d1, U) == eval_group(tbar, d2, U)
    if level == 1:
        return coset_of(eval_group(tbar, d1, U)) == coset_of(eval_group(tbar, d2, U))
    if level == 2:
        return eval_twisted(tbar, d1, U) == eval_twisted(tbar, d2, U)
    raise ValueError(f"equivalence level must be 0, 1, or 2, not {level}")


def equivalent(
    d1,
    d2,
    p: QfType,
    level: int,
    catalog: TypeCatalog | None = None,
    instances: int = 2,
) -> bool:
    """Whether the two descriptors evaluate alike at type p.

    Decided on the canonical realizing instance; further stored instances
    are evaluated too and their verdicts asserted to agree, making the
    one-instance license checkable instead of assumed.
    """
    if level in (0, 1):
        assert isinstance(d1, GroupDescriptor) and isinstance(d2, GroupDescriptor)
    else:
        assert isinstance(d1, TwistedDescriptor) and isinstance(d2, TwistedDescriptor)
    assert d1.k == p.k and d2.k == p.k
    catalog = catalog or enumerate_qf_types(p.k)
    ws = catalog.witnesses.get(p)
    if not ws:
        raise UnrealizableType(p.render())
    verdicts = [
        _verdict(d1, d2, level, P, tbar, catalog)
        for P, tbar in ws[: max(2, instances)]
    ]
    assert all(v == verdicts[0] for v in verdicts), (
        "equivalence verdict varied across realizing instances"
    )
    return verdicts[0]


def normalize0(rho: GroupDescriptor, p: QfType) -> GroupDescriptor:
    """Evaluation-preserving cleanup at type p.

    Drops items whose selection cannot be strictly decreasing under p and
    cancels adjacent equal items; sound for every tuple of type p.
    """
    items = [
        (lbar, eta)
        for lbar, eta in rho.items
        if all(p.code(lbar[j], lbar[j + 1]) == 2 for j in range(len(lbar) - 1))
    ]
    changed = True
    while changed:
        changed = False
        for j in range(len(items) - 1):
            if items[j] == items[j + 1]:
                del items[j : j + 2]
                changed = True
                break
    return GroupDescriptor(rho.k, tuple(items))


def class_signature(rho: GroupDescriptor, p: QfType):
    """Mod-2 multiset of selected position-class tuples of contributing items.

    Positions the type declares equal are merged; the bits are left out
    because twisting moves them. Equal level-0 evaluations force equal
    signatures: rewriting cancels letters only in identical chains and never
    moves a letter out of its chain.
    """
    reps = {}
    for i in range(p.k):
        for j in range(i + 1):
            if p.code(i, j) == 1:
                reps[i] = j
                break
    sig = set()
    for lbar, _ in rho.items:
        if all(p.code(lbar[j], lbar[j + 1]) == 2 for j in range(len(lbar) - 1)):
            key = tuple(reps[i] for i in lbar)
            sig ^= {key}
    return frozenset(sig)


# reduction -----------------------------------------------------------------


def _candidate_items(positions: tuple, max_len: int, k: int):
    """All items over the given positions, shortest and lex-least first."""
    out = []
    for ln in range(1, min(max_len, k) + 1):
        for lbar in itertools.permutations(positions, ln):
            for bits in itertools.product((0, 1), repeat=ln - 1):
                out.append((lbar, bits))
    return out


def _candidates_over_support(d: TwistedDescriptor, positions: tuple):
    """Lex-ordered candidate descriptors drawn from the given positions."""
    k = d.k
    part_lens = [len(part.items) for part in d.parts]
    max_item_len = max(
        (len(lbar) for part in d.parts for lbar, _ in part.items),
        default=1,
    )
    items = _candidate_items(positions, max_item_len, k)

    def item_lists(max_items: int, nonempty: bool):
        lo = 1 if nonempty else 0
        for n in range(lo, max_items + 1):
            yield from itertools.product(items, repeat=n)

    for n_parts in range(1, len(d.parts) + 1):
        part0_cap = part_lens[0]
        flag_cap = max(part_lens[1:], default=0)
        pools = [item_lists(part0_cap, nonempty=False)]
        pools += [
            item_lists(flag_cap, nonempty=True) for _ in range(n_parts - 1)
        ]
        for combo in itertools.product(*pools):
            yield TwistedDescriptor(
                k, tuple(GroupDescriptor(k, its) for its in combo)
            )


def reduce_descriptor(
    d: TwistedDescriptor,
    p: QfType,
    budget: int = 10_000,
    catalog: TypeCatalog | None = None,
) -> TwistedDescriptor:
    """Smallest-support equivalent form of d at type p.

    Searches supports in ascending size then lexicographic order, and within
    one support searches candidates in a fixed lexicographic order, so the
    first hit is the canonical reduced form and the procedure is idempotent
    on its own output. Every candidate evaluation counts against the budget;
    exhaustion raises with the best descriptor found so far attached.
    """
    catalog = catalog or enumerate_qf_types(p.k)
    if not catalog.witnesses.get(p):
        raise UnrealizableType(p.render())
    own = sorted(support(d))
    spent = 0
    for size in range(len(own) + 1):
        for positions in itertools.combinations(own, size):
            for cand in _candidates_over_support(d, positions):
                spent += 1
                if spent > budget:
                    raise SearchBudgetExceeded(
                        f"reduction budget {budget} exhausted",
                        best_so_far=d,
                    )
                if equivalent(cand, d, p, level=2, catalog=catalog):
                    return cand
    # the grammar strips junk items, so an equivalent always exists at or
    # below the full support; reaching here means d had none and stands
    return d


# type-indexed descriptor tables -------------------------------------------


@dataclass(frozen=True)
class TypeMap:
    """Assignment of a twisted descriptor to each quantifier-free type.

    The two flags are declarations, checked by validate_typemap when asked:
    disjoint means the row descriptors have pairwise disjoint supports,
    reduced means every row passes truly_reduced at its own key.
    """

    k: int
    table: dict  # QfType -> TwistedDescriptor
    disjoint: bool = False
    reduced: bool = False

    def __post_init__(self):
        for p, d in self.table.items():
            if p.k != self.k or d.k != self.k:
                raise ArityMismatch(
                    f"arity {self.k} table holds {p.k}/{d.k} entry"
                )


def constant_typemap(k: int, d: TwistedDescriptor, catalog=None) -> TypeMap:
    """Table sending every realized arity-k type to the same descriptor."""
    catalog = catalog or enumerate_qf_types(k)
    return TypeMap(k, {p: d for p in catalog.types})


def eval_typemap(tbar, q: TypeMap, U: GenUniverse) -> TwistedElement:
    """Evaluate the row selected by the type of tbar; the lookup is strict."""
    p = qf_type(tbar, U.poset)
    d = q.table.get(p)
    if d is None:
        raise TypeNotRealizedInTable(p.render())
    return eval_twisted(tbar, d, U)


def validate_typemap(q: TypeMap, catalog=None, check_flags: bool = True):
    """Require q total on the catalog's realized types, then audit flags."""
    catalog = catalog or enumerate_qf_types(q.k)
    for p in catalog.types:
        if p not in q.table:
            raise TypeNotRealizedInTable(p.render())
    if not check_flags:
        return
    if q.disjoint:
        rows = list(q.table.values())
        for i, a in enumerate(rows):
            for b in rows[i + 1 :]:
                overlap = support(a) & support(b)
                assert not overlap, (
                    f"disjoint table rows share positions {sorted(overlap)}"
                )
    if q.reduced:
        for p, d in q.table.items():
            assert truly_reduced(d, p, catalog=catalog), (
                f"table row at {p.render()} admits a smaller support"
            )


# exact reducedness ---------------------------------------------------------


def _pool_for_positions(tbar, positions, U: GenUniverse) -> int:
    elems = {tbar[i] for i in positions}
    pool = 0
    for idx, x in enumerate(U.gens):
        if set(x.tbar) <= elems:
            pool |= 1 << idx
    return pool


def _coset_achievable(coset, pool: int, U: GenUniverse) -> bool:
    fast = fast_ops(U)
    return any(
        fast.mul(coset.rep_mask, h) & ~pool == 0
        for h in _submasks(U.level_mask(0))
    )


def _achievable(value: TwistedElement, pool: int, U: GenUniverse) -> bool:
    """Can some legal descriptor over a support with this pool hit value?

    Pools are closed under the crossing twists (twisting never changes the
    underlying chain and every bit pattern over a chain is pooled), so the
    group elements reachable from a pool are exactly its submasks, and the
    reachable flag sets are arbitrary finite sets of cosets meeting the pool.
    The one exception is the unit coset: the empty word already reaches it,
    so no flag part carrying it is support-minimal and no legal descriptor
    puts it in a flag set.
    """
    if value.g.mask & ~pool:
        return False
    unit = coset_of(identity(U))
    if unit in value.h:
        return False
    return all(_coset_achievable(c, pool, U) for c in value.h)


def truly_reduced(
    d: TwistedDescriptor,
    p: QfType,
    catalog: TypeCatalog | None = None,
    instances: int = 2,
) -> bool:
    """Decide whether d is a legal descriptor no equivalent beats on support.

    Two gates. First, every flag part must need its full position set for
    its own coset; a part whose coset is already reachable over fewer
    positions (the unit coset over none, in the extreme) is not admissible
    as a flag part at all. Second, the evaluated value must not be
    attainable from any one-smaller position set of the whole support.

    Unlike reduce_descriptor this ignores the size-bounded search grammar
    and answers the semantic question outright. Rewriting only flips
    decoration bits, never the chain under a letter, so a coset is
    attainable from a pool exactly when one of its members is; that makes
    the membership test complete, and one-smaller subsets suffice because
    attainability only grows with the position set and every needed chain
    already lies under the own support.
    """
    catalog = catalog or enumerate_qf_types(p.k)
    wits = catalog.witnesses.get(p)
    if not wits:
        raise UnrealizableType(p.render())
    own = sorted(support(d))
    verdicts = []
    for P, tbar in wits[: max(1, instances)]:
        U = catalog.universe(P)

        def part_minimal(part) -> bool:
            positions = sorted({i for lbar, _ in part.items for i in lbar})
            c = coset_of(eval_group(tbar, part, U))
            for drop in positions:
                keep = tuple(i for i in positions if i != drop)
                if _coset_achievable(c, _pool_for_positions(tbar, keep, U), U):
                    return False
            return True

        if not all(part_minimal(part) for part in d.parts[1:]):
            verdicts.append(False)
            continue
        value = eval_twisted(tbar, d, U)
        red = True
        for drop in own:
            keep = tuple(i for i in own if i != drop)
            if _achievable(value, _pool_for_positions(tbar, keep, U), U):
                red = False
                break
        verdicts.append(red)
    assert len(set(verdicts)) == 1, "witness instances disagree on reducedness"
    return verdicts[0]
