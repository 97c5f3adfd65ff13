"""Exception hierarchy.

Three families, matching the CLI exit-code contract:

* ``DomainError`` (exit 2): invalid inputs or violated preconditions.
* ``ConvergenceError`` (exit 3): an iteration or search failed to settle.
* ``FormatError`` (exit 4): file parsing and serialization problems.
"""

from __future__ import annotations


class MetricWeightsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MetricWeightsError):
    """Invalid input data or a violated precondition."""


class ConvergenceError(MetricWeightsError):
    """An iterative procedure did not converge within its budget."""


class FormatError(MetricWeightsError):
    """A file could not be parsed or written in the expected format."""


# -- space construction and validation --------------------------------------

class SizeOverflow(DomainError):
    """Requested structure exceeds the configured size cap."""


class TriangleViolation(DomainError):
    def __init__(self, x: int, y: int, z: int) -> None:
        super().__init__(f"triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})")
        self.witness = (x, y, z)


class NonpositiveMass(DomainError):
    def __init__(self, x: int) -> None:
        super().__init__(f"mu({x}) <= 0")
        self.witness = (x,)


class AsymmetricDistance(DomainError):
    def __init__(self, x: int, y: int) -> None:
        super().__init__(f"d({x},{y}) != d({y},{x})")
        self.witness = (x, y)


class ZeroDistanceDistinct(DomainError):
    def __init__(self, x: int, y: int) -> None:
        super().__init__(f"d({x},{y}) = 0 for distinct points")
        self.witness = (x, y)


class NegativeDistance(DomainError):
    def __init__(self, x: int, y: int) -> None:
        super().__init__(f"d({x},{y}) < 0")
        self.witness = (x, y)


class EdgeTooShort(DomainError):
    def __init__(self, u: int, v: int) -> None:
        super().__init__(f"edge ({u},{v}) shorter than the distance of its endpoints")
        self.witness = (u, v)


class GraphDisconnected(DomainError):
    def __init__(self, detail: str = "edge graph is not connected") -> None:
        super().__init__(detail)


# -- subsets, functions, weights ---------------------------------------------

class EmptySubset(DomainError):
    """Subset has zero measure (no points)."""


class ZeroFunction(DomainError):
    """Function is identically zero where a nonzero one is required."""


class NonpositiveG(DomainError):
    """Multiplier g must be strictly positive."""


class NonpositiveWeight(DomainError):
    """Weights must be strictly positive."""


class ExponentRange(DomainError):
    """Exponent outside the admissible range for this operation."""


# -- iterations and searches ---------------------------------------------------

class NoConvergence(ConvergenceError):
    """Operator-bound doubling exhausted without a verified fixed point."""


class BudgetExceededAtZero(ConvergenceError):
    """No grid exponent, not even 0, meets the characteristic budget."""


# -- domains, covers, chains ---------------------------------------------------

class NotProper(DomainError):
    """Domain must be a nonempty proper subset of the space."""


class Unreachable(DomainError):
    """No chain of intersecting balls joins the two cover balls."""


class Disconnected(DomainError):
    """No admissible path joins the two points inside the domain."""


class PreconditionFail(DomainError):
    """Geometric precondition of the construction does not hold."""


class InclusionFail(DomainError):
    """Constructed ball failed its verified inclusion."""


# -- io -------------------------------------------------------------------------

class ParseError(FormatError):
    """Malformed file content."""


class VersionMismatch(FormatError):
    def __init__(self, found: object, expected: int) -> None:
        super().__init__(f"unsupported file version {found!r}, expected {expected}")
