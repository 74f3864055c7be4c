"""factor-bench: CAPM / Fama-French estimation, diagnostics, and
model-comparison benchmarks over monthly equity return panels."""

from .dataset import (
    AlignedPanel,
    FactorSeries,
    Identity,
    RawRecord,
    assign_identities,
    build_panel,
    load_factor_file,
    load_panel_file,
    load_tbill_file,
    split_panel,
    with_risk_free,
)
from .diagnostics import (
    DescriptiveStats,
    Direction,
    NormalityResult,
    RankEntry,
    RankVector,
    describe,
    extreme_slice,
    f_statistic,
    rank_correlation,
    rank_values,
    shapiro_wilk,
)
from .errors import (
    ConfigError,
    DomainError,
    EstimationError,
    EvaluationError,
    FactorBenchError,
    IngestionError,
)
from .estimators import (
    DesignSystem,
    FitResult,
    GRule,
    Method,
    ModelSpec,
    PriorSpec,
    build_design,
    conjugate_bayes_fit,
    empirical_prior_mean,
    fit_design,
    fit_stock,
    intercept_only,
    mle_fit,
    ols_fit,
    robust_bayes_fit,
    select_g,
    slope_f_statistic,
)
from .evaluation import (
    ComparisonReport,
    Exclusion,
    MSESummary,
    Protocol,
    StockMSE,
    loocv,
    loocv_panel,
    out_of_sample,
)
from .returns import (
    ReturnKind,
    ReturnSeries,
    convert_series,
    geometric_average,
    holding_period_return,
    sample_std,
    to_continuous,
    to_discrete,
)
from .synth import CoefficientLaw, FactorLaw, GaussianNoise, StudentTNoise, SynthSpec, generate

__version__ = "0.1.0"
