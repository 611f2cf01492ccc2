"""Exception types shared across the package.

Everything raised on bad input derives from NormtowerError so callers can
catch one type at the CLI boundary and map it to an exit code.
"""

from __future__ import annotations


class NormtowerError(Exception):
    """Base class for all package errors."""


class EmptyPoset(NormtowerError):
    pass


class CycleDetected(NormtowerError):
    """The order relation has a cycle; witness path is in args."""


class DuplicateElement(NormtowerError):
    pass


class UnknownElement(NormtowerError):
    pass


class UniverseTooLarge(NormtowerError):
    """Generator count exceeds the cap; carries (count, cap)."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"universe needs {count} generators, cap is {cap}")
        self.count = count
        self.cap = cap


class IndexOutOfRange(NormtowerError):
    pass


class UniverseMismatch(NormtowerError):
    """Operands built over different generator universes."""


class NotConjClosed(NormtowerError):
    """Generator pool is not closed under the crossing action.

    Carries the violating triple (x, y, image) as .witness.
    """

    def __init__(self, witness):
        super().__init__(f"pool not closed under crossing: {witness}")
        self.witness = witness


class NotEnumerable(NormtowerError):
    pass


class StepLimitExceeded(NormtowerError):
    pass


class ArityTooLarge(NormtowerError):
    pass


class ArityMismatch(NormtowerError):
    pass


class UnrealizableType(NormtowerError):
    """No probe poset realizes the requested quantifier-free type."""


class SearchBudgetExceeded(NormtowerError):
    """Reduction search ran out of budget; .best_so_far holds the smallest
    equivalent descriptor found before giving up."""

    def __init__(self, message, best_so_far=None):
        super().__init__(message)
        self.best_so_far = best_so_far


class TypeNotRealizedInTable(NormtowerError):
    pass


class NotDirected(NormtowerError):
    """Index order has a pair with no upper bound; pair is in args."""


class IncoherentProjection(NormtowerError):
    """Projection triple fails to commute.

    .witness = (u, v, w, element) with u <= v <= w and
    pi[u,w](element) != pi[u,v](pi[v,w](element)) (or mismatched domains).
    """

    def __init__(self, witness):
        super().__init__(f"projections do not commute at {witness}")
        self.witness = witness


class PartialOnNice(NormtowerError):
    """A total-map system was required but some projection is partial."""


class NodeNotBelow(NormtowerError):
    pass


class NotAProperIdeal(NormtowerError):
    pass


class PaddingOverflow(NormtowerError):
    """Function family cannot be padded inside the value bound."""
