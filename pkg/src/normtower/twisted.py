"""The twisted product: group elements paired with finite coset-flag sets.

An element is (g, h) where h is a finite set of cosets of the all-zero level
subgroup. Multiplication lets the right factor's group part act on the left
factor's flags before taking the symmetric difference, so the flag group is
never enumerated; everything stays finitely supported.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import GenUniverse
from .errors import NotEnumerable, UniverseMismatch
from .group import (
    Coset,
    GroupElement,
    coset_of,
    identity,
    in_level,
    inverse,
    multiply,
    render_element,
)


@dataclass(frozen=True)
class TwistedElement:
    g: GroupElement
    h: frozenset  # of Coset

    def __post_init__(self):
        for a in self.h:
            assert a.universe is self.g.universe

    @property
    def universe(self) -> GenUniverse:
        return self.g.universe

    def __repr__(self) -> str:
        return f"<{render_twisted(self)}>"


def render_twisted(p: TwistedElement) -> str:
    reps = sorted(render_element(a.rep) for a in p.h)
    return "({} | {{{}}})".format(render_element(p.g), ", ".join(reps))


def identity_twisted(U: GenUniverse) -> TwistedElement:
    return TwistedElement(identity(U), frozenset())


def base_flip(U: GenUniverse) -> TwistedElement:
    """The distinguished order-two element: identity paired with the unit coset."""
    return TwistedElement(identity(U), frozenset([coset_of(identity(U))]))


def act(g: GroupElement, h: frozenset) -> frozenset:
    """Translate every flag by g on the left. Injective, so Δ commutes with it."""
    return frozenset(coset_of(multiply(g, a.rep)) for a in h)


def t_multiply(p: TwistedElement, q: TwistedElement) -> TwistedElement:
    """Semidirect product: the left flag set crosses the right group part.

    Crossing translates by the inverse, so that conjugating a pure flag
    by a pure group element translates it the plain way:
    (g,0)(e,h)(g,0)^-1 = (e, act(g, h)). Translation by q.g itself fails
    associativity as soon as two group parts stop commuting.
    """
    if p.universe is not q.universe:
        raise UniverseMismatch("twisted elements over different universes")
    return TwistedElement(
        multiply(p.g, q.g),
        act(inverse(q.g), p.h) ^ q.h,
    )


def t_inverse(p: TwistedElement) -> TwistedElement:
    return TwistedElement(inverse(p.g), act(p.g, p.h))


def is_seed_member(p: TwistedElement) -> bool:
    """Membership in the two-element seed subgroup {identity, base flip}."""
    return p == identity_twisted(p.universe) or p == base_flip(p.universe)


def t_in_level(p: TwistedElement, alpha: int, strict: bool = True) -> bool:
    return in_level(p.g, alpha, strict)


def project(p: TwistedElement) -> GroupElement:
    return p.g


def commutes_with_base_flip(p: TwistedElement) -> bool:
    """Literal two-sided product comparison against the base flip."""
    f = base_flip(p.universe)
    return t_multiply(p, f) == t_multiply(f, p)


def all_cosets(U: GenUniverse) -> tuple[Coset, ...]:
    seen = {}
    for m in range(1 << len(U.gens)):
        c = coset_of(GroupElement(U, m))
        seen.setdefault(c.rep_mask, c)
    return tuple(seen[k] for k in sorted(seen))


def enumerate_twisted(U: GenUniverse, limit: int = 4096):
    """Every twisted element, for universes small enough to afford it."""
    cosets = all_cosets(U)
    total = (1 << len(U.gens)) * (1 << len(cosets))
    if total > limit:
        raise NotEnumerable(
            f"twisted product has {total} elements, over the {limit} limit"
        )
    for m in range(1 << len(U.gens)):
        g = GroupElement(U, m)
        for k in range(1 << len(cosets)):
            flags = frozenset(c for j, c in enumerate(cosets) if k >> j & 1)
            yield TwistedElement(g, flags)
