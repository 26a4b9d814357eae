"""Tail dimension reduction for heavy-tailed responses with incomplete
covariates: simulation of dependent heavy-tailed samples, response-driven
missingness, the masked tail-direction estimator with automatic threshold
selection, competitor baselines, a tail-covariance benchmarking harness,
and a daily climate-archive ingestion pipeline.
"""

from .errors import (
    ConfigError,
    DataError,
    DegenerateDirectionError,
    InsufficientTailError,
    UsageError,
)
from .generators import (
    ArmaParams,
    BurrParams,
    EstarParams,
    GarchParams,
    GeneratorConfig,
    SampleSet,
    assemble_sample,
    beta_sine,
    burr_sample,
    classic_burr_sample,
    gen_arma,
    gen_estar,
    gen_garch,
    gen_toeplitz_gaussian,
    toeplitz_correlation,
)
from .masking import MaskConfig, MaskMatrix, MaskedMatrix, apply_mask, gen_bar_mask, lambda_fn
from .estimator import (
    Direction,
    TailMoments,
    ThresholdSelection,
    compute_tail_moments,
    epls_direction,
    order_statistic_threshold,
    population_w,
    projection_covariance,
    select_threshold,
    tail_moment,
)
from .tailstats import (
    HillDiagnostics,
    LogMomentReport,
    Plateau,
    PlateauSettings,
    TailIndexReport,
    detect_plateau,
    garch_log_moment,
    garch_tail_index,
    hill_curve,
    hill_diagnostics,
    tail_covariance,
)
from .competitors import (
    elda_direction,
    epca_direction,
    erf_direction,
    esir_direction,
    random_directions,
    sir_direction,
)
from .montecarlo import (
    PanelResult,
    PanelSpec,
    RankTable,
    catalog_panels,
    empirical_quantile,
    rank_methods,
    replication_seeds,
    run_panel,
    tailcov_curve,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
