"""Exception types raised across the package."""


class LyapformError(Exception):
    """Base class for all package errors."""


class IntegrationDiverged(LyapformError):
    pass


class MapConstructionFailed(LyapformError):
    pass


class ChartCoverageError(LyapformError):
    pass


class GraphMismatch(LyapformError):
    pass


class NotCohomologous(LyapformError):
    pass


class NotClosed(LyapformError):
    pass


class NoCycle(LyapformError):
    pass


class NotApplicable(LyapformError):
    """A construction was asked for while its hypotheses fail."""


class EmptyInput(LyapformError):
    pass


class SynthesisContractViolated(LyapformError):
    pass


class NotASection(LyapformError):
    pass


class NotIntegral(LyapformError):
    pass


class SpecError(LyapformError):
    """Malformed run specification or input file."""
