"""Figure rendering for disentanglement-benchmark result CSVs."""
from .errors import (
    EdiPlotsError,
    EmptyInput,
    NotSquare,
    SchemaMismatch,
    UnknownKind,
)
from .figures import render_agreement, render_sweep
from .reader import (
    ResultRecord,
    SweepSeries,
    read_agreement,
    read_results,
    sweep_series,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
