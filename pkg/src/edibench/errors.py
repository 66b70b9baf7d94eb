"""Exception hierarchy shared across the package."""


class EdiBenchError(Exception):
    """Base class for all edibench errors."""


# -- data model / IO ---------------------------------------------------------

class DimensionMismatch(EdiBenchError):
    pass


class DomainViolation(EdiBenchError):
    pass


class NonFinite(EdiBenchError):
    pass


class ParseError(EdiBenchError):
    pass


class HeaderMismatch(EdiBenchError):
    pass


class MissingKinds(EdiBenchError):
    pass


# -- estimators --------------------------------------------------------------

class EmptyInput(EdiBenchError):
    pass


class LengthMismatch(EdiBenchError):
    pass


class TooFewSamples(EdiBenchError):
    pass


class TrainingDiverged(EdiBenchError):
    pass


class IncompatibleEstimator(EdiBenchError):
    pass


# -- metrics -----------------------------------------------------------------

class DegenerateFactor(EdiBenchError):
    pass


class DegenerateCode(EdiBenchError):
    pass


class ZeroEntropyFactor(EdiBenchError):
    pass


class ZeroEntropyCode(EdiBenchError):
    pass


class ZeroMaxMi(EdiBenchError):
    pass


class AllZeroImportance(EdiBenchError):
    pass


# -- synth / harness ---------------------------------------------------------

class InvalidCase(EdiBenchError):
    pass


class TooFewRequested(EdiBenchError):
    pass


class ZeroVariance(EdiBenchError):
    pass


class MissingMetric(EdiBenchError):
    pass
