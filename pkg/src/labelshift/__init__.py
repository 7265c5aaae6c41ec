"""Kernel plug-in classifiers under label shift, with a reproducible simulation harness.

The package covers both label-shift regimes over a shared kernel toolbox:
labeled target data (pooled plug-in classifier) and unlabeled target data
(distributional matching of a pilot classifier's confusion matrix, then a
reweighted plug-in). A truncated-normal generator with an analytic Bayes rule
provides exact excess-risk evaluation for the simulation grids.
"""

from .baselines import (
    InterpolationModel,
    NadarayaWatson,
    classical_classify,
    classical_fit,
    interpolation_classify,
    interpolation_estimate,
    interpolation_fit,
    oracle_classify,
    oracle_fit,
)
from .datagen import (
    Dataset,
    GeneratorConfig,
    LabeledSample,
    TruncNormSpec,
    bayes_classify,
    generate,
    sample_truncnorm,
    true_eta,
)
from .errors import (
    DomainError,
    EmptyClassError,
    EmptyDatasetError,
    LabelShiftError,
    SingularConfusionError,
)
from .experiments import (
    ExperimentConfig,
    ExperimentRecord,
    RiskEstimate,
    config_from_dict,
    estimate_excess_risk,
    evaluate_cell,
    preset_config,
    run_grid,
    summarize,
    write_csv,
)
from .kernel_density import (
    Bandwidth,
    KdeModel,
    KernelSpec,
    bandwidth_rule,
    density_at,
    fit_class_kde,
    kernel_value,
)
from .shift_weights import (
    ConfusionMatrix,
    PilotClassifier,
    ShiftWeights,
    confusion_estimate,
    fit_logistic_pilot,
    solve_weights,
    xi_estimate,
)
from .supervised_plugin import SupervisedModel, classify, estimate_pi, eta_hat, fit_supervised
from .unsupervised_plugin import (
    UnsupervisedModel,
    classify_unsup,
    eta_hat_unsup,
    fit_unsupervised,
    fit_with_weights,
)

__version__ = "0.1.0"

__all__ = [
    "Bandwidth",
    "ConfusionMatrix",
    "Dataset",
    "DomainError",
    "EmptyClassError",
    "EmptyDatasetError",
    "ExperimentConfig",
    "ExperimentRecord",
    "GeneratorConfig",
    "InterpolationModel",
    "KdeModel",
    "KernelSpec",
    "LabelShiftError",
    "LabeledSample",
    "NadarayaWatson",
    "PilotClassifier",
    "RiskEstimate",
    "ShiftWeights",
    "SingularConfusionError",
    "SupervisedModel",
    "TruncNormSpec",
    "UnsupervisedModel",
    "bandwidth_rule",
    "bayes_classify",
    "classical_classify",
    "classical_fit",
    "config_from_dict",
    "classify",
    "classify_unsup",
    "confusion_estimate",
    "density_at",
    "estimate_excess_risk",
    "estimate_pi",
    "eta_hat",
    "eta_hat_unsup",
    "evaluate_cell",
    "fit_class_kde",
    "fit_logistic_pilot",
    "fit_supervised",
    "fit_unsupervised",
    "fit_with_weights",
    "generate",
    "interpolation_classify",
    "interpolation_estimate",
    "interpolation_fit",
    "kernel_value",
    "oracle_classify",
    "oracle_fit",
    "preset_config",
    "run_grid",
    "sample_truncnorm",
    "solve_weights",
    "summarize",
    "true_eta",
    "write_csv",
    "xi_estimate",
]
