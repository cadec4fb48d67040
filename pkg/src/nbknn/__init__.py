"""Evidence-based nearest neighbor classification for imbalanced data.

The core idea: instead of voting among a fixed number of neighbors, walk
neighbors in distance order and measure, for each k, how many neighbors
it takes to collect k minority-class points.  Under exchangeable labels
that count is negative binomial, so each k yields a mid-p value; the
strongest evidence over k = 1..k_max decides the class.  No weights, no
synthetic points, and every result is exactly reproducible.
"""

from .baselines import KnnConfig, knn_classify, knn_classify_batch, knn_with_cv, select_k_cv
from .binary import (
    BinaryEvidenceClassifier,
    EvidencePair,
    classify_binary,
    classify_binary_batch,
    evidence_pair,
    fit_binary,
)
from .benchmark import run_csv_benchmark
from .data_io import (
    CsvDataset,
    CsvFormatError,
    SplitSpec,
    StandardizationParams,
    load_csv,
    balanced_split,
    split_indices,
    standardize,
)
from .dataset import LabeledDataset
from .metrics import (
    ConfusionMatrix,
    MetricSummary,
    PrfReport,
    TrialReport,
    aggregate_trials,
    confusion,
    efficiency_scores,
    prf,
)
from .multiclass import (
    classify_ovo_plus,
    classify_ovo_plus_batch,
    classify_ovr_plus,
    classify_ovr_plus_batch,
    resolve_by_max_evidence,
)
from .negbin import NegBinParams, adjusted_pvalue, adjusted_pvalue_many, cdf_below, log_pmf
from .neighbors import (
    MinorityCapacityError,
    MinorityCountStat,
    NeighborOrdering,
    count_to_kth_minority,
    neighbor_order,
)
from .rng import Stream, fold_seed, mix64, stream_id
from .simulation import (
    GaussianClassSpec,
    bayes_classify,
    bayes_classify_batch,
    location_specs,
    run_location_experiment,
    run_scale_experiment,
    sample_mixture,
    scale_specs,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryEvidenceClassifier",
    "ConfusionMatrix",
    "CsvDataset",
    "CsvFormatError",
    "EvidencePair",
    "GaussianClassSpec",
    "KnnConfig",
    "LabeledDataset",
    "MetricSummary",
    "MinorityCapacityError",
    "MinorityCountStat",
    "NegBinParams",
    "NeighborOrdering",
    "PrfReport",
    "SplitSpec",
    "StandardizationParams",
    "Stream",
    "TrialReport",
    "adjusted_pvalue",
    "adjusted_pvalue_many",
    "aggregate_trials",
    "bayes_classify",
    "bayes_classify_batch",
    "cdf_below",
    "classify_binary",
    "classify_binary_batch",
    "classify_ovo_plus",
    "classify_ovo_plus_batch",
    "classify_ovr_plus",
    "classify_ovr_plus_batch",
    "confusion",
    "count_to_kth_minority",
    "efficiency_scores",
    "evidence_pair",
    "fit_binary",
    "fold_seed",
    "knn_classify",
    "knn_classify_batch",
    "knn_with_cv",
    "load_csv",
    "location_specs",
    "log_pmf",
    "mix64",
    "neighbor_order",
    "balanced_split",
    "prf",
    "resolve_by_max_evidence",
    "run_csv_benchmark",
    "run_location_experiment",
    "run_scale_experiment",
    "sample_mixture",
    "scale_specs",
    "select_k_cv",
    "split_indices",
    "standardize",
    "stream_id",
]
