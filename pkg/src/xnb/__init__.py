"""Class-specific naive Bayes with KDE densities and Hellinger selection.

The pipeline fits one kernel density estimate per (class, variable),
measures how well each variable separates every class pair with the
Hellinger distance, greedily selects a small variable subset per class,
and classifies with class-specific posterior scores. Gaussian naive Bayes
and the all-variables KDE variant are included as baselines, along with
dataset diagnostics and a stratified cross-validation harness.
"""

from .classifier import (
    GnbModel,
    Prediction,
    XnbConfig,
    XnbModel,
    fit_fnb,
    fit_gnb,
    fit_xnb,
    load_model,
    predict,
    predict_gnb,
    predict_xnb,
    save_model,
)
from .dataset import Dataset, FoldPlan, class_priors, load_csv, save_csv, stratified_kfold
from .diagnostics import (
    DiagnosticsReport,
    conditional_independence_scan,
    normality_scan,
    run_diagnostics,
    shapiro_wilk,
    within_class_residuals,
)
from .errors import DataError, ModelFormatError, XnbError
from .evaluation import EvaluationReport, accuracy, emit_report, evaluate_cv
from .hellinger import HellingerTable, hellinger, hellinger_table, normalize_to_distribution
from .kde import (
    KdeModel,
    bandwidth,
    fit_kde,
    kde_density_at,
    kde_on_grid,
    kernel_eval,
    make_grid,
    scott_bandwidth,
    silverman_adaptive_bandwidth,
    silverman_bandwidth,
)
from .selection import (
    ClassFeatureMap,
    SelectionConfig,
    discriminatory_power,
    explain_selection,
    select_class_specific,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FoldPlan",
    "load_csv",
    "save_csv",
    "class_priors",
    "stratified_kfold",
    "KdeModel",
    "kernel_eval",
    "bandwidth",
    "scott_bandwidth",
    "silverman_bandwidth",
    "silverman_adaptive_bandwidth",
    "fit_kde",
    "kde_density_at",
    "kde_on_grid",
    "make_grid",
    "HellingerTable",
    "hellinger",
    "hellinger_table",
    "normalize_to_distribution",
    "ClassFeatureMap",
    "SelectionConfig",
    "discriminatory_power",
    "select_class_specific",
    "explain_selection",
    "XnbConfig",
    "XnbModel",
    "GnbModel",
    "Prediction",
    "fit_xnb",
    "fit_fnb",
    "fit_gnb",
    "predict",
    "predict_xnb",
    "predict_gnb",
    "save_model",
    "load_model",
    "DiagnosticsReport",
    "shapiro_wilk",
    "normality_scan",
    "within_class_residuals",
    "conditional_independence_scan",
    "run_diagnostics",
    "EvaluationReport",
    "accuracy",
    "evaluate_cv",
    "emit_report",
    "XnbError",
    "DataError",
    "ModelFormatError",
    "__version__",
]
