"""Exception hierarchy shared across the package.

Errors are grouped the way the CLI maps them to exit codes: input/schema
problems, numerical-domain failures, and resource caps.
"""


class ClickGBSError(Exception):
    """Base class for all package errors."""


# -- input / schema -----------------------------------------------------------

class InvalidMatrix(ClickGBSError):
    """Matrix fails a structural requirement (shape, symmetry, parity)."""


class InvalidState(ClickGBSError):
    """Gaussian state violates physicality or the serialization schema."""


class IndexOutOfRange(ClickGBSError):
    """Mode index outside [1, M] or mode set not strictly increasing."""


class OutOfRange(ClickGBSError):
    """Scalar parameter outside its documented range."""


class NegativeMeanPhotons(ClickGBSError):
    """Thermal occupation must be non-negative."""


class DimensionMismatch(ClickGBSError):
    """Operands have incompatible mode counts or vector lengths."""


class PatternOutOfRange(ClickGBSError):
    """Click pattern entry outside [0, N] or wrong length."""


# -- numerical domain ----------------------------------------------------------

class NotPositiveDefinite(ClickGBSError):
    """Cholesky pivot at or below threshold; input unphysical or degenerate."""


class SingularConstantTerm(ClickGBSError):
    """Power-series matrix has a singular order-zero part."""


class InvalidOrdering(ClickGBSError):
    """sigma - s_tilde is not positive definite for the requested ordering."""


class NotSwapSymmetric(ClickGBSError):
    """Matrix is not invariant under the half-swap conjugation."""


class NotClassical(ClickGBSError):
    """State has no non-negative P-function (sigma - I indefinite)."""


class ZeroConditional(ClickGBSError):
    """Chain-rule prefix probability underflowed and cannot be renormalized."""


class ProbabilityOutOfRange(ClickGBSError):
    """Computed probability below -1e-9 or above 1 + 1e-9; indicates a bug."""


class IdentityViolation(ClickGBSError):
    """An exact distributional identity failed beyond tolerance."""


class TailTooHeavy(ClickGBSError):
    """Photon-number distribution truncated with too much residual mass."""


# -- resource caps -------------------------------------------------------------

class TooLarge(ClickGBSError):
    """Requested computation exceeds a hard enumeration or size cap."""
