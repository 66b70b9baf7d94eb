"""Disentanglement metric library and simulation benchmark.

Exposes the exclusivity-based metric (modularity / compactness /
explicitness), seven baseline metrics, mutual-information estimation
backends, synthetic experiment generators, and the experiment harness.
"""
from .core import (
    FactorKind,
    MetricReport,
    Representation,
    ResultRow,
    read_representation_csv,
    read_results_csv,
    validate_representation,
    write_representation_csv,
    write_results_csv,
)
from .errors import EdiBenchError
from .estimators import (
    DvConfig,
    EstimatorChoice,
    binned_mi,
    column_entropy,
    discrete_entropy,
    discrete_mi,
    ksg_mi,
    ksg_mi_discrete_target,
    mutual_information,
    neural_dv_mi,
    quantize,
)
from .harness import (
    AggregateCell,
    ExperimentConfig,
    agreement_matrix,
    aggregate,
    evaluate_metrics,
    resolve_metrics,
    rows_to_score_table,
    run_experiment,
    sample_efficiency,
    spearman_rho,
    time_complexity,
    write_agreement_csv,
)
from .metrics_classic import (
    DciConfig,
    InterventionConfig,
    dci,
    dcimig,
    mig,
    mig_sup,
    modularity_score,
    pairwise_mi_matrix,
    sap,
    zdiff,
    zminvar,
)
from .metrics_edi import (
    ImpactMatrix,
    edi_compactness,
    edi_explicitness,
    edi_modularity,
    edi_report,
    exclusivity,
    impact_intensity,
    joint_mutual_information,
)
from .synth import (
    BOUNDARY_CASES,
    BoundaryCase,
    SweepSpec,
    gen_boundary,
    gen_sweep,
    subsample,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
