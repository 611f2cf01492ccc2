"""Finite inverse systems of posets with partial projections.

A system is a directed index poset whose nodes each carry a finite poset,
with coherent partial projection maps running downward. On top of it live
shift permutations: patterns declared at one node act by left multiplication
on twisted-product points at every node below, with graceful fallbacks when
a pattern fails to project or fails to be a decreasing chain. The module
verifies the compatibility and closure laws for these shifts, checks the
five limit-node clauses plus the bounded existential-limit refinement, and
constructs systems from families of finite functions ordered through an
explicit proper ideal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .chains import ChainGen, GenUniverse, enumerate_gens
from .descriptors import (
    GroupDescriptor,
    TwistedDescriptor,
    TypeMap,
    enumerate_qf_types,
    eval_typemap,
)
from .errors import (
    ArityTooLarge,
    EmptyPoset,
    IncoherentProjection,
    NodeNotBelow,
    NotAProperIdeal,
    NotDirected,
    PaddingOverflow,
    PartialOnNice,
    UnknownElement,
)
from .group import GroupElement, coset_of, gen_element, identity, multiply
from .poset import GREATER, Poset, QfType, qf_type
from .twisted import TwistedElement, identity_twisted, t_multiply


# system ---------------------------------------------------------------------


@dataclass
class Powis:
    """Validated inverse system: index poset, node posets, projections.

    Projection maps are stored only for strictly related node pairs; the
    identity projection of a node onto itself is implicit. A missing pair
    entry is the everywhere-undefined partial map.
    """

    nodes: Poset
    posets: dict
    maps: dict  # (low, high) -> {elem_in_high: elem_in_low}
    limit: str | None
    nice: bool
    cap: int | None = None  # generator cap for node universes
    _universes: dict = field(default_factory=dict, repr=False)
    _catalogs: dict = field(default_factory=dict, repr=False)

    def proj(self, u: str, v: str) -> dict:
        """Partial projection from the poset at v down to the poset at u."""
        if u == v:
            return {e: e for e in self.posets[u].elements}
        if not self.nodes.lt(u, v):
            raise NodeNotBelow(f"{u} is not below {v}")
        return self.maps.get((u, v), {})

    def universe(self, node: str) -> GenUniverse:
        U = self._universes.get(node)
        if U is None:
            if self.cap is None:
                U = enumerate_gens(self.posets[node])
            else:
                U = enumerate_gens(self.posets[node], cap=self.cap)
            self._universes[node] = U
        return U

    def below(self, u: str) -> tuple:
        return tuple(w for w in self.nodes.elements if self.nodes.leq(w, u))


def _compose_partial(outer: dict, inner: dict) -> dict:
    # inner first, then outer; defined exactly where both stages are
    return {
        t: outer[x]
        for t, x in inner.items()
        if x in outer
    }


def _coherence_witness(nodes: Poset, maps: dict, node_set=None):
    """First composable triple whose maps disagree, or None."""
    names = [n for n in nodes.elements if node_set is None or n in node_set]

    def pm(u, v):
        return maps.get((u, v), {})

    for w in names:
        for v in names:
            if not nodes.lt(v, w):
                continue
            for u in names:
                if not nodes.lt(u, v):
                    continue
                direct = pm(u, w)
                composed = _compose_partial(pm(u, v), pm(v, w))
                if direct != composed:
                    keys = set(direct) | set(composed)
                    for t in sorted(keys):
                        if direct.get(t) != composed.get(t):
                            return (u, v, w, t)
    return None


def validate_powis(
    nodes: Poset,
    posets: dict,
    maps: dict,
    limit: str | None = None,
    require_nice: bool = False,
) -> Powis:
    """Check directedness, map well-formedness and coherence; classify nice.

    Coherence is exact equality of partial maps, domains included, over
    every composable triple. Niceness means every projection between
    strictly related nodes is total.
    """
    for n in nodes.elements:
        if n not in posets:
            raise UnknownElement(f"no poset for node {n}")
    for n in posets:
        if n not in nodes:
            raise UnknownElement(f"poset for unknown node {n}")
    if limit is not None and limit not in nodes:
        raise UnknownElement(f"unknown limit node {limit}")

    clean = {}
    for (u, v), pm in maps.items():
        if u == v:
            raise ValueError("identity projections are implicit")
        if not nodes.lt(u, v):
            raise ValueError(f"map for unrelated nodes {u},{v}")
        for y, x in pm.items():
            if y not in posets[v]:
                raise UnknownElement(f"map {u}<{v}: {y} not at {v}")
            if x not in posets[u]:
                raise UnknownElement(f"map {u}<{v}: {x} not at {u}")
        clean[(u, v)] = dict(pm)

    names = nodes.elements
    for u, v in itertools.combinations(names, 2):
        if not any(nodes.leq(u, w) and nodes.leq(v, w) for w in names):
            raise NotDirected(f"{u} and {v} have no common upper bound")

    bad = _coherence_witness(nodes, clean)
    if bad is not None:
        raise IncoherentProjection(bad)

    nice = True
    for u, v in nodes.pairs():
        pm = clean.get((u, v))
        if pm is None or len(pm) != len(posets[v].elements):
            nice = False
            if require_nice:
                raise PartialOnNice(f"projection {u}<{v} is not total")
    return Powis(nodes, dict(posets), clean, limit, nice)


# move patterns ---------------------------------------------------------------


@dataclass(frozen=True)
class MovePattern:
    """Declared move: one chain-with-bits, or a finite sequence of them.

    Chains here are raw element tuples and may fail to be decreasing; the
    decision whether a move actually applies happens per node, after
    projection.
    """

    variant: str  # "single" | "sequence"
    moves: tuple  # of (elements tuple, bits tuple)

    def __post_init__(self):
        assert self.variant in ("single", "sequence")
        if self.variant == "single":
            assert len(self.moves) == 1
        for chain, bits in self.moves:
            assert len(chain) >= 1 and len(bits) == len(chain) - 1
            assert all(b in (0, 1) for b in bits)

    @property
    def his(self) -> frozenset:
        out = set()
        for chain, _ in self.moves:
            out |= set(chain)
        return frozenset(out)

    @property
    def arity(self) -> int:
        return sum(len(chain) for chain, _ in self.moves)

    def render(self) -> str:
        body = ";".join(
            ">".join(chain) + ":" + "".join(map(str, bits))
            for chain, bits in self.moves
        )
        if self.variant == "single":
            return f"move[{body}]"
        return f"moves[{body}]"


def single_move(chain, bits) -> MovePattern:
    return MovePattern("single", ((tuple(chain), tuple(bits)),))


def sequence_move(pairs) -> MovePattern:
    return MovePattern(
        "sequence", tuple((tuple(c), tuple(b)) for c, b in pairs)
    )


def _map_chain(pm: dict, chain) -> tuple | None:
    out = []
    for e in chain:
        x = pm.get(e)
        if x is None:
            return None
        out.append(x)
    return tuple(out)


def lift_pattern(S: Powis, u: str, v: str, z: MovePattern):
    """Carry a pattern at v down to u along the projection; None if it
    mentions anything outside the domain. Lifting is componentwise, so it
    preserves the variant and commutes with composed projections."""
    if not S.nodes.leq(u, v):
        raise NodeNotBelow(f"{u} is not below {v}")
    pm = S.proj(u, v)
    moves = []
    for chain, bits in z.moves:
        chain2 = _map_chain(pm, chain)
        if chain2 is None:
            return None
        moves.append((chain2, bits))
    return MovePattern(z.variant, tuple(moves))


# shift permutations -----------------------------------------------------------


@dataclass(frozen=True)
class DPoint:
    """Point of the sliced domain: a node and a twisted element over it.

    The element must live in the universe the owning system caches for the
    node, or cross-slice comparisons degenerate.
    """

    node: str
    value: TwistedElement


@dataclass(frozen=True)
class ShiftPerm:
    """Shift declared at a node: either a move pattern, or a tuple paired
    with a type-indexed descriptor table."""

    node: str
    pattern: MovePattern | None = None
    tbar: tuple | None = None
    table: TypeMap | None = None

    def __post_init__(self):
        if self.pattern is not None:
            assert self.tbar is None and self.table is None
        else:
            assert self.tbar is not None and self.table is not None
            assert len(self.tbar) == self.table.k

    def render(self) -> str:
        if self.pattern is not None:
            return f"shift@{self.node} {self.pattern.render()}"
        return f"shift@{self.node} table/{','.join(self.tbar)}"


def _decreasing(P: Poset, chain) -> bool:
    return all(P.lt(chain[i + 1], chain[i]) for i in range(len(chain) - 1))


def shift_multiplier(S: Powis, perm: ShiftPerm, node: str) -> TwistedElement:
    """Left multiplier the shift uses at one node; identity when inert.

    A single move applies when its projected chain is strictly decreasing,
    contributing that generator. A sequence applies when every component
    does, contributing the flag of the product coset; the empty sequence
    contributes the bare flag. A table payload applies when the tuple
    projects, contributing the row selected by the projected type.
    """
    U = S.universe(node)
    pm = S.proj(node, perm.node)
    if perm.pattern is None:
        proj_t = _map_chain(pm, perm.tbar)
        if proj_t is None:
            return identity_twisted(U)
        return eval_typemap(proj_t, perm.table, U)
    z = perm.pattern
    P = S.posets[node]
    if z.variant == "single":
        chain, bits = z.moves[0]
        chain2 = _map_chain(pm, chain)
        if chain2 is None or not _decreasing(P, chain2):
            return identity_twisted(U)
        return TwistedElement(
            gen_element(U, ChainGen(chain2, bits)), frozenset()
        )
    w = identity(U)
    for chain, bits in z.moves:
        chain2 = _map_chain(pm, chain)
        if chain2 is None or not _decreasing(P, chain2):
            return identity_twisted(U)
        w = multiply(w, gen_element(U, ChainGen(chain2, bits)))
    return TwistedElement(identity(U), frozenset([coset_of(w)]))


def apply_shift(S: Powis, perm: ShiftPerm, pt: DPoint) -> DPoint:
    if not S.nodes.leq(pt.node, perm.node):
        raise NodeNotBelow(f"{pt.node} is not below {perm.node}")
    assert pt.value.g.universe is S.universe(pt.node)
    mult = shift_multiplier(S, perm, pt.node)
    return DPoint(pt.node, t_multiply(mult, pt.value))


# compatibility across edges ----------------------------------------------------


@dataclass(frozen=True)
class EdgeCompat:
    low: str
    high: str
    checked: int
    skipped: int
    mismatches: tuple


@dataclass(frozen=True)
class CompatReport:
    edges: tuple

    @property
    def ok(self) -> bool:
        return all(not e.mismatches for e in self.edges)


def _random_pattern(rng: random.Random, S: Powis, v: str) -> MovePattern:
    P = S.posets[v]
    gens = S.universe(v).gens

    def one():
        if gens and rng.random() < 0.5:
            x = gens[rng.randrange(len(gens))]
            bits = tuple(rng.randint(0, 1) for _ in x.eta)
            return (x.tbar, bits)
        ln = rng.randint(1, min(3, len(P.elements)))
        chain = tuple(rng.choice(P.elements) for _ in range(ln))
        return (chain, tuple(rng.randint(0, 1) for _ in range(ln - 1)))

    if rng.random() < 0.6:
        return MovePattern("single", (one(),))
    return MovePattern(
        "sequence", tuple(one() for _ in range(rng.randint(0, 2)))
    )


def _random_point(
    rng: random.Random, S: Powis, nodes, max_flags: int
) -> DPoint:
    w = rng.choice(list(nodes))
    U = S.universe(w)
    bits = min(len(U.gens), 14)
    g = GroupElement(U, rng.randrange(1 << bits))
    flags = frozenset(
        coset_of(GroupElement(U, rng.randrange(1 << bits)))
        for _ in range(rng.randint(0, max_flags))
    )
    return DPoint(w, TwistedElement(g, flags))


def check_shift_compat(
    S: Powis, samples: int = 250, seed: int = 0, max_flags: int = 2
) -> CompatReport:
    """Sample the restriction law: a lifted shift agrees with the original
    on every point of the smaller slice family.

    For each strictly related node pair, random patterns at the top are
    lifted to the bottom; patterns that fail to lift are counted as skipped
    rather than silently dropped.
    """
    edges = []
    for u, v in S.nodes.pairs():
        rng = random.Random(f"{seed}:{u}:{v}")
        dom = S.below(u)
        # slices below u must all be slices below v
        assert all(S.nodes.leq(w, v) for w in dom)
        checked = skipped = 0
        mismatches = []
        for _ in range(samples):
            z = _random_pattern(rng, S, v)
            x = lift_pattern(S, u, v, z)
            if x is None:
                skipped += 1
                continue
            pt = _random_point(rng, S, dom, max_flags)
            a = apply_shift(S, ShiftPerm(u, pattern=x), pt)
            b = apply_shift(S, ShiftPerm(v, pattern=z), pt)
            checked += 1
            if a.value != b.value:
                mismatches.append((u, v, pt.node, z.render()))
        edges.append(
            EdgeCompat(u, v, checked, skipped, tuple(mismatches))
        )
    return CompatReport(tuple(edges))


# closure of shifts under composition --------------------------------------------


def _node_catalog(S: Powis, k: int):
    cat = S._catalogs.get(k)
    if cat is None:
        probes = {P.name: P for P in S.posets.values()}
        cat = enumerate_qf_types(k, probes=tuple(probes.values()))
        S._catalogs[k] = cat
    return cat


def _type_restrict(p: QfType, positions) -> QfType:
    sel = tuple(positions)
    return QfType(
        len(sel), tuple(p.code(i, j) for i in sel for j in sel)
    )


def _identity_descriptor(k: int) -> TwistedDescriptor:
    return TwistedDescriptor(k, (GroupDescriptor(k, ()),))


def _reindex(d: TwistedDescriptor, k: int, off: int) -> TwistedDescriptor:
    parts = tuple(
        GroupDescriptor(
            k,
            tuple(
                (tuple(i + off for i in lbar), bits)
                for lbar, bits in part.items
            ),
        )
        for part in d.parts
    )
    return TwistedDescriptor(k, parts)


def encode_pattern(S: Powis, u: str, z: MovePattern) -> ShiftPerm:
    """Re-express a pattern shift as a tuple-with-table shift at the same
    node, exact wherever the anchor tuple projects.

    A single move becomes a full-selection item on the types whose
    consecutive positions are strictly decreasing, the identity row
    elsewhere; a sequence becomes one flag part with an item per component
    on types where every segment decreases. The empty sequence anchors on
    an arbitrary element and uses a twice-repeated item, whose factors
    cancel to the unit coset flag.
    """
    if z.arity == 0:
        anchor = S.posets[u].elements[0]
        cat = _node_catalog(S, 1)
        d = TwistedDescriptor(
            1,
            (
                GroupDescriptor(1, ()),
                GroupDescriptor(1, (((0,), ()), ((0,), ()))),
            ),
        )
        return ShiftPerm(
            u, tbar=(anchor,), table=TypeMap(1, {p: d for p in cat.types})
        )
    k = z.arity
    cat = _node_catalog(S, k)
    rows = {}
    if z.variant == "single":
        chain, bits = z.moves[0]
        for p in cat.types:
            if all(p.code(i, i + 1) == GREATER for i in range(k - 1)):
                rows[p] = TwistedDescriptor(
                    k,
                    (GroupDescriptor(k, ((tuple(range(k)), bits),)),),
                )
            else:
                rows[p] = _identity_descriptor(k)
        return ShiftPerm(u, tbar=chain, table=TypeMap(k, rows))
    segments = []
    start = 0
    tbar = ()
    for chain, bits in z.moves:
        segments.append((tuple(range(start, start + len(chain))), bits))
        start += len(chain)
        tbar += chain
    for p in cat.types:
        good = all(
            p.code(seg[i], seg[i + 1]) == GREATER
            for seg, _ in segments
            for i in range(len(seg) - 1)
        )
        if good:
            rows[p] = TwistedDescriptor(
                k,
                (
                    GroupDescriptor(k, ()),
                    GroupDescriptor(k, tuple(segments)),
                ),
            )
        else:
            rows[p] = _identity_descriptor(k)
    return ShiftPerm(u, tbar=tbar, table=TypeMap(k, rows))


def compose_encoded(S: Powis, e1: ShiftPerm, e2: ShiftPerm) -> ShiftPerm:
    """Table shift realizing "apply e2, then e1" in one step.

    The combined multiplier is the product of the two; its flag cosets from
    the first factor get translated by the second factor's group part,
    which at descriptor level means prepending the second part0 to each of
    the first factor's flag parts.
    """
    assert e1.node == e2.node
    assert e1.pattern is None and e2.pattern is None
    k1, k2 = len(e1.tbar), len(e2.tbar)
    k = k1 + k2
    cat = _node_catalog(S, k)
    rows = {}
    for p in cat.types:
        p1 = _type_restrict(p, range(k1))
        p2 = _type_restrict(p, range(k1, k))
        d1 = e1.table.table.get(p1)
        d2 = e2.table.table.get(p2)
        assert d1 is not None and d2 is not None, (
            "restricted type escapes the node catalog"
        )
        d1 = _reindex(d1, k, 0)
        d2 = _reindex(d2, k, k1)
        part0 = GroupDescriptor(k, d1.parts[0].items + d2.parts[0].items)
        flags = [
            GroupDescriptor(k, d2.parts[0].items + f.items)
            for f in d1.parts[1:]
        ]
        flags += list(d2.parts[1:])
        rows[p] = TwistedDescriptor(k, (part0, *flags))
    return ShiftPerm(e1.node, tbar=e1.tbar + e2.tbar, table=TypeMap(k, rows))


def invert_encoded(S: Powis, e: ShiftPerm) -> ShiftPerm:
    """Table shift realizing the pointwise inverse of a table shift.

    Every item contributes an involution, so the group part inverts by
    reversing its items; the flags get translated by that inverse.
    """
    assert e.pattern is None
    rows = {}
    for p, d in e.table.table.items():
        part0 = tuple(reversed(d.parts[0].items))
        flags = [
            GroupDescriptor(d.k, part0 + f.items) for f in d.parts[1:]
        ]
        rows[p] = TwistedDescriptor(
            d.k, (GroupDescriptor(d.k, part0), *flags)
        )
    return ShiftPerm(e.node, tbar=e.tbar, table=TypeMap(e.table.k, rows))


@dataclass(frozen=True)
class ClosureCase:
    label: str
    checked: int
    ok: bool
    witness: tuple | None


@dataclass(frozen=True)
class ClosureReport:
    node: str
    cases: tuple
    exhausted: bool

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases) and not self.exhausted


def _closure_points(S: Powis, u: str, seed: int):
    rng = random.Random(f"closure:{seed}")
    for w in S.below(u):
        U = S.universe(w)
        n = len(U.gens)
        if n <= 6:
            masks = list(range(1 << n))
        else:
            masks = [rng.randrange(1 << min(n, 14)) for _ in range(64)]
        unit = coset_of(identity(U))
        extra = coset_of(GroupElement(U, rng.randrange(1 << min(n, 14))))
        for m in masks:
            g = GroupElement(U, m)
            for flags in ((), (unit,), (unit, extra) if extra != unit else (extra,)):
                yield DPoint(w, TwistedElement(g, frozenset(flags)))


def check_shift_closure(
    S: Powis, u: str, budget: int = 20_000, seed: int = 0
) -> ClosureReport:
    """Composition and inversion of shifts stay expressible as shifts.

    Builds table encodings for a family of generator patterns at the node,
    composes and inverts them constructively, then verifies every claim
    pointwise over enumerated (or sampled, for large slices) points. Budget
    counts point evaluations; running out marks the report exhausted
    rather than guessing.
    """
    U = S.universe(u)
    fam = []
    gens = U.gens
    picks = sorted({0, len(gens) // 2, len(gens) - 1}) if gens else []
    for i in picks:
        x = gens[i]
        fam.append(single_move(x.tbar, x.eta))
    top = S.posets[u].elements[-1]
    fam.append(single_move((top, top), (0,)))  # never decreasing: inert
    fam.append(sequence_move([]))
    if gens:
        fam.append(sequence_move([(gens[0].tbar, gens[0].eta)]))

    spent = 0
    exhausted = False
    cases = []

    def run(label, lhs, rhs):
        # lhs, rhs: callables DPoint -> value; compare over the point pool
        nonlocal spent, exhausted
        checked = 0
        witness = None
        for pt in _closure_points(S, u, seed):
            if spent >= budget:
                exhausted = True
                break
            spent += 1
            checked += 1
            a = lhs(pt)
            b = rhs(pt)
            if a != b:
                witness = (pt.node, pt.value.g.mask, label)
                break
        cases.append(ClosureCase(label, checked, witness is None, witness))

    encoded = []
    for z in fam:
        if z.arity > 2:
            continue
        e = encode_pattern(S, u, z)
        encoded.append((z, e))
        run(
            f"encode {z.render()}",
            lambda pt, e=e: apply_shift(S, e, pt).value,
            lambda pt, z=z: apply_shift(S, ShiftPerm(u, pattern=z), pt).value,
        )
        if exhausted:
            break

    pairs = []
    if len(encoded) >= 2:
        pairs = [(encoded[0], encoded[1]), (encoded[0], encoded[0])]
        if len(encoded) >= 3:
            pairs.append((encoded[2], encoded[0]))
    for (z1, e1), (z2, e2) in pairs:
        if exhausted or len(e1.tbar) + len(e2.tbar) > 4:
            continue
        ec = compose_encoded(S, e1, e2)
        run(
            f"compose {z1.render()} after {z2.render()}",
            lambda pt, ec=ec: apply_shift(S, ec, pt).value,
            lambda pt, z1=z1, z2=z2: apply_shift(
                S,
                ShiftPerm(u, pattern=z1),
                apply_shift(S, ShiftPerm(u, pattern=z2), pt),
            ).value,
        )
        if not exhausted:
            inv = invert_encoded(S, ec)
            run(
                f"invert compose {z1.render()}/{z2.render()}",
                lambda pt, ec=ec, inv=inv: apply_shift(
                    S, inv, apply_shift(S, ec, pt)
                ).value,
                lambda pt: pt.value,
            )
    return ClosureReport(u, tuple(cases), exhausted)


# limit node ----------------------------------------------------------------------


@dataclass(frozen=True)
class LimitReport:
    vstar: str
    maximum_ok: bool
    restriction_ok: bool
    restriction_witness: tuple | None
    capture_ok: bool
    capture: tuple  # (element, first capturing node or None)
    order_ok: bool
    order_failures: tuple
    threads_ok: bool
    thread_failures: tuple

    @property
    def ok(self) -> bool:
        return (
            self.maximum_ok
            and self.restriction_ok
            and self.capture_ok
            and self.order_ok
            and self.threads_ok
        )

    def clauses(self) -> dict:
        return {
            "maximum": self.maximum_ok,
            "restriction": self.restriction_ok,
            "capture": self.capture_ok,
            "order": self.order_ok,
            "threads": self.threads_ok,
        }


def _coherent_threads(S: Powis, up: tuple):
    """All coherent assignments over the given node set, by backtracking."""
    up = sorted(up)

    def extend(partial, rest):
        if not rest:
            yield dict(partial)
            return
        v = rest[0]
        for t in S.posets[v].elements:
            ok = True
            for w, x in partial.items():
                if S.nodes.lt(w, v):
                    pm = S.proj(w, v)
                    if pm.get(t) != x:
                        ok = False
                        break
                elif S.nodes.lt(v, w):
                    pm = S.proj(v, w)
                    if pm.get(x) != t:
                        ok = False
                        break
            if ok:
                yield from extend({**partial, v: t}, rest[1:])

    yield from extend({}, up)


def check_limit(S: Powis, vstar: str) -> LimitReport:
    """Exhaustively verify the five limit-node clauses at vstar.

    (maximum) vstar tops the index poset; (restriction) the system minus
    vstar is still directed and coherent; (capture) every element at vstar
    eventually enters every projection domain, in the monotone form: some
    node below which all projections see it; (order) for every element
    pair some node below which the projected comparison matches the
    comparison at vstar; (threads) every coherent family over a principal
    up-set has exactly one preimage at vstar.
    """
    names = S.nodes.elements
    below = [w for w in names if w != vstar]
    maximum_ok = all(S.nodes.leq(w, vstar) for w in names)

    restriction_witness = None
    for u, v in itertools.combinations(below, 2):
        if not any(
            S.nodes.leq(u, w) and S.nodes.leq(v, w) for w in below
        ):
            restriction_witness = ("directedness", u, v)
            break
    if restriction_witness is None:
        sub_maps = {
            key: pm
            for key, pm in S.maps.items()
            if vstar not in key
        }
        bad = _coherence_witness(S.nodes, sub_maps, node_set=set(below))
        if bad is not None:
            restriction_witness = ("coherence",) + bad
    restriction_ok = restriction_witness is None

    I_star = S.posets[vstar].elements
    capture = []
    capture_ok = True
    for t in I_star:
        found = None
        for u in below:
            seg = [v for v in below if S.nodes.leq(u, v)]
            if all(t in S.proj(v, vstar) for v in seg):
                found = u
                break
        capture.append((t, found))
        if found is None:
            capture_ok = False

    P_star = S.posets[vstar]
    order_failures = []
    for s in I_star:
        for t in I_star:
            if s == t:
                continue
            rel = P_star.lt(s, t)
            hit = False
            for u in below:
                seg = [v for v in below if S.nodes.leq(u, v)]
                good = True
                for v in seg:
                    pm = S.proj(v, vstar)
                    if s not in pm or t not in pm:
                        good = False
                        break
                    if S.posets[v].lt(pm[s], pm[t]) != rel:
                        good = False
                        break
                if good:
                    hit = True
                    break
            if not hit:
                order_failures.append((s, t))

    thread_failures = []
    for w in below:
        up = tuple(v for v in below if S.nodes.leq(w, v))
        for thread in _coherent_threads(S, up):
            pre = [
                t
                for t in I_star
                if all(
                    S.proj(v, vstar).get(t) == thread[v] for v in up
                )
            ]
            if len(pre) != 1:
                thread_failures.append(
                    (w, tuple(sorted(thread.items())), len(pre))
                )

    return LimitReport(
        vstar=vstar,
        maximum_ok=maximum_ok,
        restriction_ok=restriction_ok,
        restriction_witness=restriction_witness,
        capture_ok=capture_ok,
        capture=tuple(capture),
        order_ok=not order_failures,
        order_failures=tuple(order_failures),
        threads_ok=not thread_failures,
        thread_failures=tuple(thread_failures),
    )


# existential limit ----------------------------------------------------------------


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


@dataclass(frozen=True)
class ExLimitReport:
    verdict: str  # satisfied | counterexample-candidate | budget-exhausted
    instances: int
    example: tuple | None
    counterexample: tuple | None
    type_count: int
    budget_spent: int


def check_existential_limit(
    S: Powis, vstar: str, k1: int, k2: int, budget: int = 200_000
) -> ExLimitReport:
    """Bounded verifier for the extension law at the limit node.

    Assumption instances are: a partition of the realized types, a tuple
    at vstar, a base node, and a family of tuples at every node above the
    base (below vstar) whose induced type classes are consistent wherever
    defined. For each instance the checker searches for an extension tuple
    at vstar whose projected type eventually lands in the induced class.
    Every verdict is relative to the budget, which counts enumerated
    families and extension candidates.
    """
    k = k1 + k2
    if k > 4:
        raise ArityTooLarge(f"combined arity {k} over the supported bound 4")
    names = S.nodes.elements
    below = [w for w in names if w != vstar]
    I_star = S.posets[vstar].elements

    types = set()
    if k >= 1:
        for w in names:
            P = S.posets[w]
            for tb in itertools.product(P.elements, repeat=k):
                types.add(qf_type(tb, P))
    types = sorted(types, key=lambda p: p.render())
    if k == 0 or k2 < 0:
        return ExLimitReport("satisfied", 0, None, None, len(types), 0)

    spent = 0
    instances = 0
    example = None

    for blocks in _set_partitions(types):
        class_of = {}
        for idx, block in enumerate(blocks):
            for p in block:
                class_of[p] = idx
        for tbar in itertools.product(I_star, repeat=k1):
            for ustar in below:
                V = [v for v in below if S.nodes.leq(ustar, v)]
                pools = [
                    itertools.product(S.posets[v].elements, repeat=k2)
                    for v in V
                ]
                for family in itertools.product(*pools):
                    spent += 1
                    if spent > budget:
                        return ExLimitReport(
                            "budget-exhausted",
                            instances,
                            example,
                            None,
                            len(types),
                            spent,
                        )
                    fam = dict(zip(V, family))
                    e_u = {}
                    consistent = True
                    for u in below:
                        seen = set()
                        for v in V:
                            if not S.nodes.leq(u, v):
                                continue
                            pmt = S.proj(u, vstar)
                            pms = S.proj(u, v)
                            if not all(x in pmt for x in tbar):
                                continue
                            if not all(x in pms for x in fam[v]):
                                continue
                            tp = qf_type(
                                tuple(pmt[x] for x in tbar)
                                + tuple(pms[x] for x in fam[v]),
                                S.posets[u],
                            )
                            seen.add(class_of[tp])
                        if len(seen) > 1:
                            consistent = False
                            break
                        if seen:
                            e_u[u] = next(iter(seen))
                    if not consistent:
                        continue
                    instances += 1
                    witness = None
                    for sbar in itertools.product(I_star, repeat=k2):
                        spent += 1
                        if spent > budget:
                            return ExLimitReport(
                                "budget-exhausted",
                                instances,
                                example,
                                None,
                                len(types),
                                spent,
                            )
                        full = tbar + sbar
                        for u0 in below:
                            good = True
                            for u in below:
                                if not S.nodes.leq(u0, u):
                                    continue
                                target = e_u.get(u)
                                if target is None:
                                    continue
                                pmt = S.proj(u, vstar)
                                if not all(x in pmt for x in full):
                                    good = False
                                    break
                                tp = qf_type(
                                    tuple(pmt[x] for x in full),
                                    S.posets[u],
                                )
                                if class_of[tp] != target:
                                    good = False
                                    break
                            if good:
                                witness = (sbar, u0)
                                break
                        if witness:
                            break
                    if witness is None:
                        counter = (
                            tuple(
                                tuple(p.render() for p in block)
                                for block in blocks
                            ),
                            tbar,
                            ustar,
                            tuple(sorted(fam.items())),
                        )
                        return ExLimitReport(
                            "counterexample-candidate",
                            instances,
                            example,
                            counter,
                            len(types),
                            spent,
                        )
                    if example is None:
                        example = (tbar, witness[0], witness[1])
    return ExLimitReport(
        "satisfied", instances, example, None, len(types), spent
    )


# construction from function families -------------------------------------------


def _fname(t: tuple) -> str:
    return "-".join(str(v) for v in t)


def build_from_functions(funcs, theta: int, kappa: int, ideal):
    """System whose nodes carry initial-segment restrictions of functions.

    The family is padded with the zero function and closed under +1 while
    every shifted value stays under the bound; a raw value at or over the
    bound is refused rather than truncated. Node alpha holds restrictions
    to min(alpha+2, theta) coordinates, ordered by their last coordinate;
    the limit node holds the full functions ordered through the supplied
    ideal: f1 below f2 when the set of coordinates where f1 fails to be
    strictly smaller is negligible. The ideal must be given explicitly and
    proper.

    Returns the validated system together with its limit-clause report.
    """
    if theta < 2:
        raise ValueError(f"need at least two coordinates, got {theta}")
    vals = list(funcs.values()) if isinstance(funcs, dict) else list(funcs)
    if not vals:
        raise EmptyPoset("function family is empty")
    if kappa < 1:
        raise PaddingOverflow(f"range bound {kappa} admits no values")
    for f in vals:
        f = tuple(f)
        if len(f) != theta:
            raise ValueError(f"function {f} is not {theta} coordinates")
        for v in f:
            if not 0 <= v < kappa:
                raise PaddingOverflow(
                    f"value {v} outside range({kappa})"
                )

    if ideal is None or not list(ideal):
        raise NotAProperIdeal("ideal family required, none given")
    fam = frozenset(frozenset(A) for A in ideal)
    full = frozenset(range(theta))
    for A in fam:
        if not A <= full:
            raise NotAProperIdeal(
                f"member {sorted(A)} exceeds the index set"
            )
    if full in fam:
        raise NotAProperIdeal("contains the whole index set")
    for A in fam:
        for r in range(len(A)):
            for B in itertools.combinations(sorted(A), r):
                if frozenset(B) not in fam:
                    raise NotAProperIdeal(
                        f"not downward closed: missing {list(B)}"
                    )
    for A in fam:
        for B in fam:
            if A | B not in fam:
                raise NotAProperIdeal(
                    f"not union closed: missing {sorted(A | B)}"
                )

    F = {tuple(f) for f in vals}
    F.add((0,) * theta)
    grew = True
    while grew:
        grew = False
        for f in sorted(F):
            g = tuple(v + 1 for v in f)
            if max(g) < kappa and g not in F:
                F.add(g)
                grew = True
    F = sorted(F)

    node_names = [f"u{a}" for a in range(theta)] + ["lim"]
    J = Poset(
        node_names,
        [(node_names[i], node_names[i + 1]) for i in range(theta)],
        name="index",
    )

    posets = {}
    for a in range(theta):
        L = min(a + 2, theta)
        els = sorted({f[:L] for f in F})
        pairs = [
            (_fname(x), _fname(y))
            for x in els
            for y in els
            if x[L - 1] < y[L - 1]
        ]
        posets[f"u{a}"] = Poset(
            [_fname(x) for x in els], pairs, name=f"u{a}"
        )
    lim_pairs = [
        (_fname(f1), _fname(f2))
        for f1 in F
        for f2 in F
        if f1 != f2
        and frozenset(
            i for i in range(theta) if not f1[i] < f2[i]
        ) in fam
    ]
    posets["lim"] = Poset([_fname(f) for f in F], lim_pairs, name="lim")

    maps = {}
    for a in range(theta):
        La = min(a + 2, theta)
        for b in range(a + 1, theta):
            Lb = min(b + 2, theta)
            maps[(f"u{a}", f"u{b}")] = {
                _fname(y): _fname(y[:La])
                for y in sorted({f[:Lb] for f in F})
            }
        maps[(f"u{a}", "lim")] = {_fname(f): _fname(f[:La]) for f in F}

    S = validate_powis(J, posets, maps, limit="lim", require_nice=True)
    return S, check_limit(S, "lim")


# file formats ---------------------------------------------------------------------


def parse_powis_text(text: str) -> Powis:
    """Parse the system format: node/order/limit lines, per-node poset
    blocks, and map lines for the partial projections."""
    from .poset import parse_poset_text

    nodes = []
    orders = []
    limit = None
    posets = {}
    maps: dict = {}
    saw_header = False
    block_node = None
    block_lines: list = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not saw_header:
            if line != "powis":
                raise ValueError(f"expected 'powis' header, got {line!r}")
            saw_header = True
            continue
        fields = line.split()
        if block_node is not None:
            if line == "end":
                posets[block_node] = parse_poset_text(
                    "poset\n" + "\n".join(block_lines), name=block_node
                )
                block_node = None
                block_lines = []
            else:
                block_lines.append(line)
            continue
        if fields[0] == "node" and len(fields) == 2:
            nodes.append(fields[1])
        elif fields[0] == "order" and len(fields) == 3:
            orders.append((fields[1], fields[2]))
        elif fields[0] == "limit" and len(fields) == 2:
            limit = fields[1]
        elif fields[:2] == ["begin", "poset"] and len(fields) == 3:
            block_node = fields[2]
        elif fields[0] == "map" and len(fields) == 5:
            u, v, y, x = fields[1:]
            maps.setdefault((u, v), {})[y] = x
        else:
            raise ValueError(f"bad system line: {line!r}")
    if not saw_header:
        raise ValueError("missing 'powis' header")
    if block_node is not None:
        raise ValueError(f"unterminated poset block for {block_node}")
    J = Poset(nodes, [(u, v) for u, v in orders if u != v], name="index")
    return validate_powis(J, posets, maps, limit=limit)


def powis_to_text(S: Powis) -> str:
    lines = ["powis"]
    lines += [f"node {n}" for n in S.nodes.elements]
    lines += [f"order {u} {v}" for u, v in S.nodes.pairs()]
    if S.limit is not None:
        lines.append(f"limit {S.limit}")
    for n in S.nodes.elements:
        P = S.posets[n]
        lines.append(f"begin poset {n}")
        lines += [f"elem {e}" for e in P.elements]
        lines += [f"lt {a} {b}" for a, b in P.pairs()]
        lines.append("end")
    for (u, v) in sorted(S.maps):
        for y in sorted(S.maps[(u, v)]):
            lines.append(f"map {u} {v} {y} {S.maps[(u, v)][y]}")
    return "\n".join(lines) + "\n"


def load_powis(path) -> Powis:
    from pathlib import Path

    return parse_powis_text(Path(path).read_text(encoding="utf-8"))


def parse_funcs_text(text: str):
    """Parse a function-family file: header with theta and kappa, one line
    per function, and one line per ideal member (bare `ideal` is the empty
    set). Returns (functions dict, theta, kappa, ideal family list)."""
    theta = kappa = None
    funcs: dict = {}
    ideal: list = []
    saw_header = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if not saw_header:
            if fields[0] != "funcs":
                raise ValueError(f"expected 'funcs' header, got {line!r}")
            for kv in fields[1:]:
                key, _, val = kv.partition("=")
                if key == "theta":
                    theta = int(val)
                elif key == "kappa":
                    kappa = int(val)
                else:
                    raise ValueError(f"unknown header field {kv!r}")
            if theta is None or kappa is None:
                raise ValueError("funcs header needs theta= and kappa=")
            saw_header = True
            continue
        if fields[0] == "f" and len(fields) >= 2:
            name = fields[1]
            if name in funcs:
                raise ValueError(f"duplicate function name {name}")
            funcs[name] = tuple(int(v) for v in fields[2:])
        elif fields[0] == "ideal":
            rest = line[len("ideal"):].strip()
            if rest:
                ideal.append(
                    frozenset(int(v) for v in rest.split(","))
                )
            else:
                ideal.append(frozenset())
        else:
            raise ValueError(f"bad funcs line: {line!r}")
    if not saw_header:
        raise ValueError("missing 'funcs' header")
    return funcs, theta, kappa, ideal


def load_funcs(path):
    from pathlib import Path

    return parse_funcs_text(Path(path).read_text(encoding="utf-8"))
