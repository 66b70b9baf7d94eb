"""Error hierarchy for the figure-rendering package."""


class EdiPlotsError(Exception):
    """Base class for all rendering failures."""


class SchemaMismatch(EdiPlotsError):
    """Input CSV does not have the expected column layout."""


class EmptyInput(EdiPlotsError):
    """Input CSV parses but contains nothing to plot."""


class NotSquare(EdiPlotsError):
    """Agreement matrix is not square or not consistent with its labels."""


class UnknownKind(EdiPlotsError):
    """Requested figure kind is not supported."""
