"""Exception types raised by the library.

Every error corresponds to a violated domain precondition; plain shape or
argument plumbing mistakes raise the builtin ``ValueError``/``TypeError``.
"""


class SchurDilateError(Exception):
    """Base class for all domain errors in this package."""


class NotHermitian(SchurDilateError):
    """Input required to be Hermitian fails the symmetry check."""


class NotPSD(SchurDilateError):
    """Input has an eigenvalue below the negative tolerance."""


class NoConvergence(SchurDilateError):
    """An eigenvalue or singular value iteration failed to converge."""


class NotContraction(SchurDilateError):
    """Operator norm exceeds 1 beyond tolerance."""


class NotUnitary(SchurDilateError):
    """Matrix fails the unitarity check."""


class NoFactor(SchurDilateError):
    """The requested contractive factor does not exist for these inputs."""


class NotEquinormed(SchurDilateError):
    """X*X and Y*Y differ beyond tolerance, so no partial isometry links them."""


class DimensionMismatch(SchurDilateError):
    """Operand shapes are inconsistent with the requested block structure."""


class ShapeUnsupported(SchurDilateError):
    """The block shape is outside what the operation supports."""


class NotResolution(SchurDilateError):
    """POVM effects do not sum to the identity."""


class EffectsNotRankOne(SchurDilateError):
    """POVM effects lack stored vectors and are not rank one."""


class NotTracePreserving(SchurDilateError):
    """Kraus family does not sum to the identity in the trace sense."""


class PaddingTooSmall(SchurDilateError):
    """Requested ancilla dimension is below the minimal dilation size."""


class NotState(SchurDilateError):
    """Matrix is not a (sub-normalized) density matrix."""


class NotUnital(SchurDilateError):
    """Map is not unital but the operation requires it."""


class UnknownName(SchurDilateError):
    """Requested catalog entry does not exist."""


class UnsupportedCombination(SchurDilateError):
    """Family, dimension, or witness combination is not defined."""
