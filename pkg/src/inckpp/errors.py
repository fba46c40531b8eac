"""Exception hierarchy. CLI exit codes hang off these classes."""


class KMedoidsError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(KMedoidsError, ValueError):
    """Invalid parameters or inconsistent configuration."""

    exit_code = 2


class DataError(KMedoidsError, ValueError):
    """Input data is malformed or unusable for the requested operation."""

    exit_code = 3


class CandidateSetTooSmallError(DataError):
    """INCKM candidate set holds fewer points than the requested cluster count."""

    def __init__(self, size, k, lam):
        self.size = size
        self.k = k
        self.lam = lam
        super().__init__(
            f"candidate set too small: {size} candidate(s) for K={k} "
            f"at lambda={lam:g}; increase lambda or lower K"
        )


class DegenerateDistributionError(DataError):
    """Every point coincides with a current medoid, so D^2 weights are all zero."""


class CapacityError(KMedoidsError):
    """Problem size exceeds a configured hard limit."""

    exit_code = 4
