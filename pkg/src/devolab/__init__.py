"""devolab: a differential-evolution variant laboratory.

Fourteen DE variants (seven mutation strategies x binomial/exponential
crossover), a 30-dimensional benchmark suite, run metrics (MOV, convergence
speed, Q-measure), bootstrap CR tuning, and a seeded, resumable experiment
harness with a CLI front end.
"""

from .benchmarks import (
    BenchmarkFn,
    FUNCTION_CLASSES,
    FUNCTION_IDS,
    PenaltyParams,
    by_id,
    catalog,
    penalty_u,
    y_transform,
)
from .core import (
    ControlParams,
    Individual,
    Population,
    RunRecord,
    VariantSpec,
    VARIANT_NAMES,
    all_variants,
    crossover_binomial,
    crossover_exponential,
    derive_seed,
    distinct_indices,
    init_population,
    mutate,
    run,
    sample_f,
    select,
)
from .errors import ConfigurationError, MissingCellsError
from .harness import ExperimentPlan, ResultStore, aggregate, execute, write_summary
from .metrics import (
    ConfidenceInterval,
    QmSummary,
    TUNED_CR,
    bootstrap_ci,
    convergence_speed,
    cr_lookup,
    mov,
    q_measure,
    select_cr,
    tune_cr,
    tune_cr_detail,
)

__version__ = "0.1.0"
