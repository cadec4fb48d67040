"""Method name dispatch shared by the simulation and benchmark drivers."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .baselines import KnnConfig, knn_with_cv
from .binary import classify_binary_batch, fit_binary
from .dataset import LabeledDataset
from .multiclass import classify_ovo_plus_batch, classify_ovr_plus_batch

PROPOSED = "proposed"
OVO_PLUS = "ovo_plus"
OVR_PLUS = "ovr_plus"
KNN = "knn"
WNN = "wnn"
BAYES = "bayes"

ALL_METHODS = (PROPOSED, OVO_PLUS, OVR_PLUS, KNN, WNN, BAYES)


def default_methods(n_classes: int) -> tuple[str, ...]:
    if n_classes == 2:
        return (PROPOSED, KNN, WNN)
    return (OVO_PLUS, OVR_PLUS, KNN, WNN)


def validate_methods(methods, n_classes: int | None = None, allow_bayes: bool = False) -> tuple[str, ...]:
    valid = set(ALL_METHODS) if allow_bayes else set(ALL_METHODS) - {BAYES}
    out = []
    for name in methods:
        if name not in valid:
            raise ValueError(
                f"unknown method {name!r}; valid methods: {', '.join(sorted(valid))}"
            )
        out.append(name)
    if not out:
        raise ValueError("at least one method is required")
    if n_classes is not None and n_classes != 2 and PROPOSED in out:
        raise ValueError("method 'proposed' requires exactly 2 classes; use ovo_plus/ovr_plus")
    return tuple(out)


def predict_with_method(
    name: str,
    train: LabeledDataset,
    queries: np.ndarray,
    k_max: int,
    cv_seed: int,
    bayes_oracle=None,
) -> np.ndarray:
    """Run one named method end to end for a single trial."""
    if name == PROPOSED:
        return classify_binary_batch(fit_binary(train, k_max), queries)
    if name == OVO_PLUS:
        return classify_ovo_plus_batch(train, queries, k_max)
    if name == OVR_PLUS:
        return classify_ovr_plus_batch(train, queries, k_max)
    if name == KNN:
        return knn_with_cv(train, queries, KnnConfig(weighting="uniform"), cv_seed)
    if name == WNN:
        return knn_with_cv(train, queries, KnnConfig(weighting="inverse-class-size"), cv_seed)
    if name == BAYES:
        if bayes_oracle is None:
            raise ValueError("method 'bayes' is only available in simulations")
        return bayes_oracle(queries)
    raise ValueError(f"unknown method {name!r}")


def map_trials(fn, args_list, jobs: int = 1) -> list:
    """Run ``fn`` over per-trial argument tuples, optionally in parallel.

    Results come back in submission order and each trial's randomness is
    derived from its own stream, so the output is identical for any job
    count.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(args_list) <= 1:
        return [fn(args) for args in args_list]
    chunk = max(1, len(args_list) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, args_list, chunksize=chunk))
