"""Plain and class-weighted k-NN comparators with cross-validated k.

The weighted variant gives each neighbor of class i vote mass 1/n_i,
where n_i is the class's training count; with balanced classes it
reduces to plain voting.  Cross-validation selects k on mean macro F1
over stratified folds, ties to the smaller k.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import LabeledDataset
from .metrics import confusion, prf
from .neighbors import _as_queries, order_rows
from .rng import Stream

WEIGHTINGS = ("uniform", "inverse-class-size")


@dataclass(frozen=True)
class KnnConfig:
    k: int = 5
    weighting: str = "uniform"
    cv_folds: int = 5
    k_grid: tuple[int, ...] = tuple(range(1, 32, 2))

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if self.cv_folds < 2:
            raise ValueError(f"cv_folds must be >= 2, got {self.cv_folds}")
        if len(self.k_grid) == 0 or min(self.k_grid) < 1:
            raise ValueError("k_grid must be a nonempty list of positive integers")


def _vote_weights(train: LabeledDataset, weighting: str) -> np.ndarray:
    if weighting == "uniform":
        return np.ones(train.n_classes, dtype=np.float64)
    counts = train.class_counts.astype(np.float64)
    weights = np.zeros(train.n_classes, dtype=np.float64)
    np.divide(1.0, counts, out=weights, where=counts > 0)
    return weights


def _votes_for_grid(
    ordered_labels: np.ndarray,
    ks: tuple[int, ...],
    n_classes: int,
    class_weight: np.ndarray,
) -> dict[int, np.ndarray]:
    """Predictions for every k in ``ks`` from one set of orderings.

    Vote mass accumulates column by column, so all grid values reuse a
    single sort.  Argmax tie-break is the smallest class id.
    """
    m = ordered_labels.shape[0]
    rows = np.arange(m)
    mass = np.zeros((m, n_classes), dtype=np.float64)
    preds: dict[int, np.ndarray] = {}
    done = 0
    for k in sorted(ks):
        for col in range(done, k):
            lab = ordered_labels[:, col] - 1
            mass[rows, lab] += class_weight[lab]
        done = k
        preds[k] = np.argmax(mass, axis=1).astype(np.int64) + 1
    return preds


def knn_classify_batch(train: LabeledDataset, queries, cfg: KnnConfig) -> np.ndarray:
    """k-NN vote for many queries at once."""
    if cfg.k > train.n:
        raise ValueError(f"k={cfg.k} exceeds the training size {train.n}")
    q = _as_queries(queries, train.dim)
    orders = order_rows(train.points, q)
    ordered_labels = train.labels[orders[:, : cfg.k]]
    weights = _vote_weights(train, cfg.weighting)
    return _votes_for_grid(ordered_labels, (cfg.k,), train.n_classes, weights)[cfg.k]


def knn_classify(train: LabeledDataset, query, cfg: KnnConfig) -> int:
    """k-NN vote for a single query."""
    return int(knn_classify_batch(train, np.asarray(query, dtype=np.float64)[None, :], cfg)[0])


def _stratified_folds(train: LabeledDataset, folds: int, stream: Stream) -> np.ndarray:
    """Fold id per row: each class is shuffled then dealt round-robin."""
    assignment = np.empty(train.n, dtype=np.int64)
    for cls in range(1, train.n_classes + 1):
        idx = np.flatnonzero(train.labels == cls)
        if idx.size < folds:
            raise ValueError(
                f"class {cls} has {idx.size} members, fewer than cv_folds={folds}"
            )
        perm = stream.permutation(idx.size)
        assignment[idx[perm]] = np.arange(idx.size) % folds
    return assignment


def select_k_cv(train: LabeledDataset, cfg: KnnConfig, seed: int) -> int:
    """Grid k with the best mean macro F1 over stratified folds.

    Deterministic given ``seed``; score ties resolve to the smaller k.
    """
    assignment = _stratified_folds(train, cfg.cv_folds, Stream(seed, 0))
    min_fit = min(
        int(np.sum(assignment != f)) for f in range(cfg.cv_folds)
    )
    ks = tuple(k for k in cfg.k_grid if k <= min_fit)
    if not ks:
        raise ValueError(
            f"no k_grid value fits the fold training size {min_fit}"
        )
    weights_name = cfg.weighting
    scores = {k: [] for k in ks}
    for f in range(cfg.cv_folds):
        fit_idx = np.flatnonzero(assignment != f)
        val_idx = np.flatnonzero(assignment == f)
        fold_train = train.subset(fit_idx)
        orders = order_rows(fold_train.points, train.points[val_idx])
        ordered_labels = fold_train.labels[orders[:, : max(ks)]]
        weights = _vote_weights(fold_train, weights_name)
        preds = _votes_for_grid(ordered_labels, ks, train.n_classes, weights)
        actual = train.labels[val_idx]
        for k in ks:
            cm = confusion(actual, preds[k], train.n_classes)
            scores[k].append(prf(cm).macro_f1)
    means = {k: float(np.mean(scores[k])) for k in ks}
    best = max(sorted(means), key=lambda k: (means[k], -k))
    return int(best)


def knn_with_cv(train: LabeledDataset, queries, cfg: KnnConfig, seed: int) -> np.ndarray:
    """Select k by cross-validation, then classify ``queries``."""
    k = select_k_cv(train, cfg, seed)
    return knn_classify_batch(train, queries, replace(cfg, k=k))
