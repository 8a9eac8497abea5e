"""Exception hierarchy for nlft_lab."""


class NLFTError(Exception):
    """Base class for all library errors."""


class NonUnimodularIdentityViolation(NLFTError):
    pass


class TailNotConverged(NLFTError):
    pass


class PoleAtEvaluationPoint(NLFTError):
    pass


class ContourThroughZero(NLFTError):
    pass


class PhaseStepTooLarge(NLFTError):
    pass


class NewtonDiverged(NLFTError):
    """Raised when a zero-search cell could not be resolved by Newton.

    ``zeros`` carries whatever was resolved before the failure.
    """

    def __init__(self, message, zeros=None, unresolved=None):
        super().__init__(message)
        self.zeros = list(zeros or [])
        self.unresolved = list(unresolved or [])


class MultiplicityAboveOne(NLFTError):
    pass


class TrackingLost(NLFTError):
    pass


class ZeroEscaped(NLFTError):
    pass


class NoZeroInBox(NLFTError):
    pass


class ZeroInBox(NLFTError):
    pass


class NodeNotOnTrajectory(NLFTError):
    pass


class FitQualityTooLow(NLFTError):
    pass


class ConfigError(NLFTError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
