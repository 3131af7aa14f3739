"""Exception types shared across the toolkit.

Every error that names a witness (a violating triple, an element index, a
text position) carries it as an attribute so callers can report precisely.
"""


class GroupEqError(Exception):
    """Base class for all toolkit errors."""


class NonAssociative(GroupEqError):
    """Associativity fails at a specific triple of element indices."""

    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"associativity fails at triple ({i}, {j}, {k})")
        self.triple = (i, j, k)


class NoIdentity(GroupEqError):
    """The table has no two-sided identity element."""


class NoInverse(GroupEqError):
    """Some element has no two-sided inverse."""

    def __init__(self, element: int):
        super().__init__(f"element {element} has no two-sided inverse")
        self.element = element


class IndexOutOfRange(GroupEqError):
    """Table entry or element reference outside 0..order-1, or non-square table."""


class UnsupportedSize(GroupEqError):
    """Constructor parameter outside the supported finite range."""


class OrderMismatch(GroupEqError):
    """Central product identification of elements with different orders."""


class NonCentralIdentification(GroupEqError):
    """Central product asked to identify a non-central element."""


class ActionNotAutomorphic(GroupEqError):
    """Semidirect action is not a homomorphism into automorphisms."""


class TrivialElement(GroupEqError):
    """An identity element was supplied where a nontrivial one is required."""


class ParseError(GroupEqError):
    """DSL text rejected; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownCoefficient(GroupEqError):
    """A coefficient name does not resolve in the group."""

    def __init__(self, name: str):
        super().__init__(f"unknown coefficient {name!r}")
        self.name = name


class CoefficientNotAllowed(GroupEqError):
    """Coefficients are forbidden in this context (quasi-identities)."""


class MissingAssignment(GroupEqError):
    """An unknown referenced by the word has no assigned value."""

    def __init__(self, unknown: str):
        super().__init__(f"no value assigned to unknown {unknown!r}")
        self.unknown = unknown


class MissingSubstitute(GroupEqError):
    """Strict substitution hit an unknown without an image."""

    def __init__(self, unknown: str):
        super().__init__(f"no substitute for unknown {unknown!r}")
        self.unknown = unknown


class ArityMismatch(GroupEqError):
    """Word has the wrong number or names of unknowns for this operation."""


class BadParameters(GroupEqError):
    """Named-equation or witness parameters violate a precondition."""


class VerificationFailed(GroupEqError):
    """An internally constructed object failed its own verification."""


class SearchSpaceTooLarge(GroupEqError):
    """Requested exhaustive scan exceeds the configured evaluation cap."""

    def __init__(self, space: int, cap: int):
        super().__init__(f"search space {space} exceeds cap {cap}")
        self.space = space
        self.cap = cap


class NotInNormalClosure(GroupEqError):
    """Target element lies outside the normal closure of the base."""


class WitnessInvalid(GroupEqError):
    """Supplied witness values do not satisfy the required equations."""


class GeneratorMismatch(GroupEqError):
    """Presentation target mentions a generator the relators do not declare."""


class RelatorTrivial(GroupEqError):
    """A relator normalizes to the empty word."""


class NotSymmetrized(GroupEqError):
    """Metric check requires a symmetrized relator set."""


class ZeroExponentWarning(UserWarning):
    """A literal exponent 0 was normalized to the identity."""
