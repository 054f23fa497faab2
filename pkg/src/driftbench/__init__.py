"""Benchmark harness comparing drift-handling strategies for batched sensor data."""

__version__ = "0.1.0"

from .data_io import (
    Batch,
    DataFormatError,
    Dataset,
    Sample,
    SyntheticConfig,
    format_sample_line,
    generate_synthetic,
    load_dataset,
    parse_sample_line,
)
from .preprocess import (
    CenteringOffset,
    NormalizationParams,
    apply_minmax,
    center,
    fit_minmax,
    normalize_dataset,
)
from .subspace import (
    DrcaConfig,
    LdspConfig,
    LinearProjection,
    covariance,
    drca_fit,
    lda_fit,
    ldsp_fit,
    pca_fit,
    project,
    scatter_matrices,
)
from .classifier import (
    ClassifierConfig,
    LogRegModel,
    predict,
    predict_proba,
    train,
)
from .metrics import accuracy, f1_score, macro_f1
from .adaptation import (
    LabelStore,
    MethodSpec,
    PredictionSet,
    SelfTrainConfig,
    TargetBatch,
    run_means_correction,
    run_method,
    run_no_adaptation,
    run_self_training,
    run_subspace_method,
    split_calibration,
    strip_labels,
)
from .config import ConfigError, RunConfig, load_run_config, resolve_config
from .harness import (
    Cell,
    EvalReport,
    export_projections,
    export_report,
    run_experiment,
)

__all__ = [
    "__version__",
    "Batch",
    "Cell",
    "CenteringOffset",
    "ClassifierConfig",
    "ConfigError",
    "DataFormatError",
    "Dataset",
    "DrcaConfig",
    "EvalReport",
    "LabelStore",
    "LdspConfig",
    "LinearProjection",
    "LogRegModel",
    "MethodSpec",
    "NormalizationParams",
    "PredictionSet",
    "RunConfig",
    "Sample",
    "SelfTrainConfig",
    "SyntheticConfig",
    "TargetBatch",
    "accuracy",
    "apply_minmax",
    "center",
    "covariance",
    "drca_fit",
    "export_projections",
    "export_report",
    "f1_score",
    "fit_minmax",
    "format_sample_line",
    "generate_synthetic",
    "lda_fit",
    "ldsp_fit",
    "load_dataset",
    "load_run_config",
    "macro_f1",
    "normalize_dataset",
    "parse_sample_line",
    "pca_fit",
    "predict",
    "predict_proba",
    "project",
    "resolve_config",
    "run_experiment",
    "run_means_correction",
    "run_method",
    "run_no_adaptation",
    "run_self_training",
    "run_subspace_method",
    "scatter_matrices",
    "split_calibration",
    "strip_labels",
    "train",
]
