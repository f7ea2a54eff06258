"""Error types shared across the toolkit.

Mathematical failures (a cocycle identity that does not hold, a descent
that finds the wrong dimension) are first-class errors carrying their
witnesses; they are distinct from usage errors such as malformed input.
"""


class GaldescError(Exception):
    """Base class for all toolkit errors."""


class Reducible(GaldescError):
    """A modulus polynomial has a proper factor (stored in .factor)."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class UnverifiableIrreducibility(GaldescError):
    """Irreducibility over the rationals could not be certified.

    The heuristic (rational-root test plus reduction modulo three good
    primes) is sound when it rejects; when it cannot decide, the caller
    must assert irreducibility explicitly.
    """


class HintNotRoot(GaldescError):
    """A candidate generator image is not a root of the modulus."""


class NotClosed(GaldescError):
    """The supplied automorphism hints are not closed under composition."""

    def __init__(self, message, missing_image=None):
        super().__init__(message)
        self.missing_image = missing_image


class NotFixed(GaldescError):
    """An element is moved by some automorphism (stored in .aut)."""

    def __init__(self, message, aut=None):
        super().__init__(message)
        self.aut = aut


class NotConstant(GaldescError):
    """A Galois-fixed element has a non-constant representative.

    This cannot happen for verified Galois groups; it signals an
    internal inconsistency rather than a user error.
    """


class DimensionMismatch(GaldescError):
    """Operands live in spaces of different dimensions."""


class NotSquare(GaldescError):
    """A square matrix was required."""


class NoSolution(GaldescError):
    """A linear system is inconsistent."""


class Singular(GaldescError):
    """A matrix that must be invertible is not (witness in .tag)."""

    def __init__(self, message, tag=None):
        super().__init__(message)
        self.tag = tag


class NotCocycle(GaldescError):
    """The cocycle identity fails for a pair of group elements."""

    def __init__(self, message, pair=None, point=None):
        super().__init__(message)
        self.pair = pair
        self.point = point


class DescentFailed(GaldescError):
    """The invariant space has the wrong dimension over the base field."""

    def __init__(self, message, found=None, expected=None, point=None):
        super().__init__(message)
        self.found = found
        self.expected = expected
        self.point = point


class NotEquivariant(GaldescError):
    """A morphism does not commute with the semilinear structures."""

    def __init__(self, message, aut=None, point=None, degree=None):
        super().__init__(message)
        self.aut = aut
        self.point = point
        self.degree = degree


class NotPartialOrder(GaldescError):
    """The given relation is not reflexive, transitive and antisymmetric."""


class NotMonotone(GaldescError):
    """A point map does not preserve the order."""


class NotUpSet(GaldescError):
    """A set of points is not closed under going up."""


class NotLocallyClosed(GaldescError):
    """A subset is not the intersection of an up-set and a down-set."""


class FieldMismatch(GaldescError):
    """Two objects live over different fields."""


class NotSheafMorphism(GaldescError):
    """A family of stalk maps does not commute with restrictions."""

    def __init__(self, message, pair=None, aut=None):
        super().__init__(message)
        self.pair = pair
        self.aut = aut


class NotFixedRestriction(GaldescError):
    """A descended restriction matrix has a non-fixed entry.

    Must not occur once the structure compatibility check has passed;
    kept separate to distinguish internal bugs from user errors.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotChainMap(GaldescError):
    """A degreewise family of maps does not commute with differentials."""


class RelationViolated(GaldescError):
    """The gluing relation v*u = id - t fails (difference in .difference)."""

    def __init__(self, message, difference=None):
        super().__init__(message)
        self.difference = difference


class SchemaError(GaldescError):
    """Input does not conform to its JSON schema (.pointer locates it)."""

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer
