"""Exception types shared across the package.

Every error carries a stable ``code`` (its class name) so the CLI can emit
single-line machine-parsable messages of the form ``ERROR <code>: <message>``.
"""

from __future__ import annotations


class CkdrError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- composition / matrix validation ---------------------------------------

class NegativeEntry(CkdrError):
    """An entry is negative beyond the allowed tolerance."""


class NotNormalized(CkdrError):
    """Entries do not sum to one (or a column does not) within tolerance."""


class ZeroVector(CkdrError):
    """A vector that must have positive mass sums to zero or less."""


class NonFiniteInput(CkdrError):
    """Input contains NaN or infinite entries."""


class DimensionMismatch(CkdrError):
    """Operand shapes are incompatible."""


class EmptyInput(CkdrError):
    """An input collection is empty where at least one element is required."""


class InvalidPartition(CkdrError):
    """Blocks are empty, overlapping, or do not cover all indices."""


# --- subspace handling ------------------------------------------------------

class OneVectorNotInSpan(CkdrError):
    """The all-ones vector is not in the span of the given basis."""


class DegenerateBasis(CkdrError):
    """Basis vectors are not linearly independent."""


class ZeroDimensionalSubspace(CkdrError):
    """A subspace argument has rank zero."""


# --- kernels ----------------------------------------------------------------

class UnknownKernel(CkdrError):
    """Kernel kind is not one of the supported names."""


class NonPositiveBandwidth(CkdrError):
    """Gaussian bandwidth must be strictly positive."""


class AlreadyCentered(CkdrError):
    """Attempted to center a Gram matrix twice."""


class AllPointsIdentical(CkdrError):
    """All pairwise distances are zero; no bandwidth can be derived."""


# --- linear algebra / fitting -----------------------------------------------

class SolveFailure(CkdrError):
    """A positive-definite solve failed (matrix not numerically PD)."""


class TooFewSamples(CkdrError):
    """Not enough samples for the requested operation."""


# --- predictor ---------------------------------------------------------------

class WrongResponseKernel(CkdrError):
    """Operation requires real training responses under the linear kernel."""


# --- metrics ----------------------------------------------------------------

class KTooLarge(CkdrError):
    """Requested more clusters than available points."""


class LengthMismatch(CkdrError):
    """Paired label sequences have different lengths."""


# --- simulation -------------------------------------------------------------

class ConstantBeta(CkdrError):
    """All regression coefficients are equal; the shift map is undefined."""


class DimensionTooSmall(CkdrError):
    """The ambient dimension is too small for the requested construction."""


# --- plotting ---------------------------------------------------------------

class WrongTargetDimension(CkdrError):
    """Ternary rendering requires a three-dimensional reduced space."""


# --- data ingestion ----------------------------------------------------------

class MissingResponse(CkdrError):
    """The response column is absent from the input table."""


class NegativeCount(CkdrError):
    """A feature table entry is negative."""


class UnmappableLabel(CkdrError):
    """A response label has no entry in the binary label map."""


class RowSumZero(CkdrError):
    """A sample row sums to zero and cannot be normalized."""
