"""Exception types raised by cascadekit.

Every validation failure maps to a dedicated class so callers (and tests)
can catch the precise condition instead of matching message strings.
"""


class CascadeKitError(ValueError):
    """Base class for all cascadekit errors."""


# --- cascade construction -------------------------------------------------

class NoRootError(CascadeKitError):
    """No event without a parent_id was found."""


class MultipleRootsError(CascadeKitError):
    """More than one event without a parent_id was found."""


class DanglingParentError(CascadeKitError):
    """A parent_id does not reference any event in the cascade."""


class CycleDetectedError(CascadeKitError):
    """Parent pointers form a cycle (or disconnect nodes from the root)."""


class NegativeTimestampError(CascadeKitError):
    """An event would have a negative timestamp after re-basing to the root."""


class KTooLargeError(CascadeKitError):
    """Requested prefix length k exceeds the number of reshares."""


# --- virality ---------------------------------------------------------------

class TooSmallError(CascadeKitError):
    """Tree has fewer than two nodes; average pairwise distance is undefined."""


# --- stats ------------------------------------------------------------------

class AlphaOutOfRangeError(CascadeKitError):
    """Power-law exponent must be > 1."""


class InsufficientSamplesError(CascadeKitError):
    """Too few samples at or above the tail cutoff."""


class DegenerateSamplesError(CascadeKitError):
    """All retained samples equal the cutoff; the log-sum is zero."""


class EmptyInputError(CascadeKitError):
    """An operation received an empty sequence."""


class ZeroSumError(CascadeKitError):
    """Values sum to zero; the statistic is undefined."""


class LengthMismatchError(CascadeKitError):
    """Paired sequences have different lengths."""


class ZeroVarianceError(CascadeKitError):
    """A sequence has zero variance where nonzero variance is required."""


class SampleTooSmallError(CascadeKitError):
    """Sample size below the minimum the statistic requires."""


class DegenerateCorrelationError(CascadeKitError):
    """|r| = 1 cannot be Fisher-transformed."""


# --- features ---------------------------------------------------------------

class TimeNotNormalizedError(CascadeKitError):
    """Tree root timestamp is not zero."""


# --- tasks ------------------------------------------------------------------

class EmptyDatasetError(CascadeKitError):
    """No cascades satisfy the task's retention rule."""


class KExceedsRError(CascadeKitError):
    """Observation window k exceeds the minimum final size R."""


class NoQualifyingClustersError(CascadeKitError):
    """No cluster has enough usable members."""


class UnknownFieldError(CascadeKitError):
    """The grouping field is present on no cascade."""


# --- learner ----------------------------------------------------------------

class SingleClassError(CascadeKitError):
    """Labels contain only one class."""


class NonFiniteInputError(CascadeKitError):
    """Design matrix contains NaN or infinite entries."""


class MissingFeatureError(CascadeKitError):
    """An input vector lacks a feature the model requires."""


class TooFewExamplesError(CascadeKitError):
    """Not enough examples to populate the requested folds."""


# --- synth / cli ------------------------------------------------------------

class BadParamsError(CascadeKitError):
    """Generator parameters out of range."""


class ConfigInvalidError(CascadeKitError):
    """A config file is malformed or references missing inputs."""
