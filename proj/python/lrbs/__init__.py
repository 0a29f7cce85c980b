"""Low-rank bilinear similarity learning for cross-modal retrieval.

Feature matrices everywhere are dim x count: one sample per column
(transpose what :func:`numpy.loadtxt` gives you for the CSV layout).
"""

from ._core import (
    DatasetBundle,
    LabeledModality,
    MetricReport,
    PcaProjection,
    SimilarityModel,
    TraceRow,
    TrainResult,
    average_precision,
    build_supervision,
    evaluate,
    generate_synthetic,
    load_modality,
    load_model,
    nuclear_norm,
    numerical_rank,
    pair_gradient,
    pair_objective,
    pca_fit,
    save_modality,
    score,
    svd,
    svt,
    train,
)

__all__ = [
    "DatasetBundle",
    "LabeledModality",
    "MetricReport",
    "PcaProjection",
    "SimilarityModel",
    "TraceRow",
    "TrainResult",
    "average_precision",
    "build_supervision",
    "evaluate",
    "generate_synthetic",
    "load_modality",
    "load_model",
    "nuclear_norm",
    "numerical_rank",
    "pair_gradient",
    "pair_objective",
    "pca_fit",
    "save_modality",
    "score",
    "svd",
    "svt",
    "train",
]
