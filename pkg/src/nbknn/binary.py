"""Binary evidence classifier.

For a query x the neighbors are walked in distance order and, for each
k = 1..k_max, the number of neighbors needed to collect k minority
points is converted to a mid-p value e_k under the null that labels
arrive with the training minority proportion p0.  Starting both running
extremes at 0.5, E1 = max(0.5, max_k e_k) is the strongest evidence for
the majority class and E2 = 1 - min(0.5, min_k e_k) for the minority
class; the query goes to the minority class exactly when E2 > E1, so
exact ties fall to the majority.

One neighbor sort serves the whole k sweep.  The sweep length is
min(k_max, minority training count): beyond the minority count the
counting statistic is undefined, so the cap is forced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .negbin import adjusted_pvalue_many
from .neighbors import _as_queries, order_rows


@dataclass(frozen=True)
class EvidencePair:
    """Strongest majority (e1) and minority (e2) evidence for one query."""

    e1: float
    e2: float
    per_k: tuple[tuple[int, int, float], ...] | None = None


@dataclass(frozen=True)
class BinaryEvidenceClassifier:
    """Immutable fitted state; all query methods are pure reads."""

    train: LabeledDataset
    majority_label: int
    minority_label: int
    p0: float
    k_max_config: int
    k_max_eff: int


def fit_binary(train: LabeledDataset, k_max: int = 45) -> BinaryEvidenceClassifier:
    """Assign majority/minority roles by count and precompute p0.

    With equal counts the class with the larger label is the minority.
    """
    if train.n_classes != 2:
        raise ValueError(f"binary classifier needs exactly 2 classes, got {train.n_classes}")
    counts = train.class_counts
    if counts.min() < 1:
        raise ValueError("both classes must be nonempty")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    majority = 1 if counts[0] >= counts[1] else 2
    minority = 3 - majority
    n_min = int(counts[minority - 1])
    return BinaryEvidenceClassifier(
        train=train,
        majority_label=majority,
        minority_label=minority,
        p0=n_min / train.n,
        k_max_config=int(k_max),
        k_max_eff=min(int(k_max), n_min),
    )


def _evidence_arrays(
    clf: BinaryEvidenceClassifier, queries: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized evidence sweep.

    Returns (e1, e2, e_matrix, n_obs_matrix) with one row per query and
    one column per k in 1..k_max_eff.  Every ordering contains all
    minority points, so the position extraction below is rectangular.
    """
    orders = order_rows(clf.train.points, queries)
    is_minority = clf.train.labels[orders] == clf.minority_label
    n_min = int(clf.train.class_counts[clf.minority_label - 1])
    positions = np.nonzero(is_minority)[1].reshape(queries.shape[0], n_min)
    n_obs = positions[:, : clf.k_max_eff].astype(np.int64) + 1
    ks = np.arange(1, clf.k_max_eff + 1, dtype=np.int64)
    e = adjusted_pvalue_many(ks[None, :], n_obs, clf.p0)
    e1 = np.maximum(0.5, e.max(axis=1))
    e2 = 1.0 - np.minimum(0.5, e.min(axis=1))
    return e1, e2, e, n_obs


def evidence_pair(
    clf: BinaryEvidenceClassifier, query, keep_trace: bool = False
) -> EvidencePair:
    """Evidence sweep for a single query.

    ``keep_trace`` additionally records (k, n_obs, e_k) triples; off by
    default to keep per-query memory constant.
    """
    q = _as_queries(query, clf.train.dim)
    e1, e2, e, n_obs = _evidence_arrays(clf, q)
    trace = None
    if keep_trace:
        trace = tuple(
            (k + 1, int(n_obs[0, k]), float(e[0, k])) for k in range(clf.k_max_eff)
        )
    return EvidencePair(e1=float(e1[0]), e2=float(e2[0]), per_k=trace)


def classify_binary(clf: BinaryEvidenceClassifier, query) -> int:
    """Predicted class label; ties go to the majority class."""
    pair = evidence_pair(clf, query)
    return clf.minority_label if pair.e2 > pair.e1 else clf.majority_label


def classify_binary_batch(clf: BinaryEvidenceClassifier, queries) -> np.ndarray:
    """Predicted labels for many queries; same arithmetic as the scalar path."""
    q = _as_queries(queries, clf.train.dim)
    e1, e2, _, _ = _evidence_arrays(clf, q)
    return np.where(e2 > e1, clf.minority_label, clf.majority_label).astype(np.int64)
