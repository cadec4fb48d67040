"""One-vs-one and one-vs-rest reductions with evidence tie resolution.

Both reductions play rounds of the binary evidence classifier and
recurse on the set of winners, which strictly shrinks, so they
terminate for every input.

OvO+: active classes are ordered by nonincreasing training count (ties
by ascending id) and each larger class plays the smallest one, which is
the designated minority of every pair.  An empty winner set elects the
smallest class; a singleton wins outright; otherwise the winners replay
among themselves with counts, p0, and k caps recomputed from the
restricted training data.

OvR+: every active class plays the pooled remainder of the active set;
the smaller-by-count side of each pairing is the minority (ties: the
group whose smallest class id is larger, which generalizes the binary
tie rule).  A singleton winner set wins; an empty winner set, or one
that fails to shrink, falls back to the maximum recorded evidence;
otherwise the winners replay.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .binary import _evidence_arrays, fit_binary
from .dataset import LabeledDataset
from .neighbors import _as_queries


def resolve_by_max_evidence(per_class_evidence: Mapping[int, float]) -> int:
    """Class with the largest recorded evidence; ties to the smaller id."""
    if not per_class_evidence:
        raise ValueError("per-class evidence map is empty")
    best_cls = None
    best_val = None
    for cls in sorted(per_class_evidence):
        val = float(per_class_evidence[cls])
        if best_cls is None or val > best_val:
            best_cls, best_val = cls, val
    return int(best_cls)


def _validate(train: LabeledDataset) -> None:
    if train.n_classes < 2:
        raise ValueError("multiclass reduction needs at least 2 classes")
    if train.class_counts.min() < 1:
        empty = int(np.argmin(train.class_counts)) + 1
        raise ValueError(f"class {empty} has no training points")


def _pair_dataset(
    train: LabeledDataset, label1: tuple[int, ...], label2: tuple[int, ...]
) -> LabeledDataset:
    """Rows of the listed classes relabeled to {1, 2} by group."""
    labels = train.labels
    in1 = np.isin(labels, label1)
    in2 = np.isin(labels, label2)
    idx = np.flatnonzero(in1 | in2)
    new_labels = np.where(in1[idx], 1, 2).astype(np.int64)
    return LabeledDataset(train.points[idx], new_labels, 2)


def _candidate_is_minority(counts: np.ndarray, cls: int, rest: tuple[int, ...]) -> bool:
    """Minority side of a one-vs-rest pairing: fewer training rows; on a
    tie, the group whose smallest class id is larger (which reduces to
    the binary larger-label rule when the rest is a single class)."""
    n_cls = int(counts[cls - 1])
    n_rest = int(sum(counts[c - 1] for c in rest))
    if n_cls != n_rest:
        return n_cls < n_rest
    return cls > min(rest)


def _ovo_round(
    train: LabeledDataset, active: tuple[int, ...], queries: np.ndarray,
    idx: np.ndarray, out: np.ndarray, k_max: int,
) -> None:
    if len(active) == 1:
        out[idx] = active[0]
        return
    counts = train.class_counts
    order = sorted(active, key=lambda c: (-int(counts[c - 1]), c))
    minority_cls = order[-1]
    others = order[:-1]

    wins = np.zeros((idx.size, len(others)), dtype=bool)
    for j, cls in enumerate(others):
        pair = _pair_dataset(train, (cls,), (minority_cls,))
        clf = fit_binary(pair, k_max)
        e1, e2, _, _ = _evidence_arrays(clf, queries[idx])
        wins[:, j] = e1 >= e2  # class 1 side = cls

    # Settle empty and singleton winner sets directly; recurse the rest.
    to_recurse: dict[tuple[int, ...], list[int]] = {}
    for pos in range(idx.size):
        s = tuple(cls for j, cls in enumerate(others) if wins[pos, j])
        if len(s) == 0:
            out[idx[pos]] = minority_cls
        elif len(s) == 1:
            out[idx[pos]] = s[0]
        else:
            to_recurse.setdefault(s, []).append(pos)
    for s, positions in sorted(to_recurse.items()):
        _ovo_round(train, s, queries, idx[np.asarray(positions)], out, k_max)


def classify_ovo_plus_batch(train: LabeledDataset, queries, k_max: int = 45) -> np.ndarray:
    """Ordered one-vs-one predictions for many queries."""
    _validate(train)
    q = _as_queries(queries, train.dim)
    out = np.zeros(q.shape[0], dtype=np.int64)
    _ovo_round(train, tuple(range(1, train.n_classes + 1)), q, np.arange(q.shape[0]), out, k_max)
    return out


def classify_ovo_plus(train: LabeledDataset, query, k_max: int = 45) -> int:
    """Ordered one-vs-one prediction for a single query."""
    return int(classify_ovo_plus_batch(train, np.asarray(query, dtype=np.float64)[None, :], k_max)[0])


def _ovr_round(
    train: LabeledDataset, active: tuple[int, ...], queries: np.ndarray,
    idx: np.ndarray, out: np.ndarray, k_max: int,
) -> None:
    if len(active) == 1:
        out[idx] = active[0]
        return
    counts = train.class_counts
    wins = np.zeros((idx.size, len(active)), dtype=bool)
    evidence = np.zeros((idx.size, len(active)), dtype=np.float64)
    for j, cls in enumerate(active):
        rest = tuple(c for c in active if c != cls)
        cand_is_minority = _candidate_is_minority(counts, cls, rest)
        if cand_is_minority:
            pair = _pair_dataset(train, rest, (cls,))
        else:
            pair = _pair_dataset(train, (cls,), rest)
        clf = fit_binary(pair, k_max)
        e1, e2, _, _ = _evidence_arrays(clf, queries[idx])
        if cand_is_minority:
            wins[:, j] = e2 > e1
            evidence[:, j] = e2
        else:
            wins[:, j] = e1 >= e2
            evidence[:, j] = e1

    to_recurse: dict[tuple[int, ...], list[int]] = {}
    for pos in range(idx.size):
        s = tuple(cls for j, cls in enumerate(active) if wins[pos, j])
        if len(s) == 1:
            out[idx[pos]] = s[0]
        elif len(s) == 0 or len(s) == len(active):
            out[idx[pos]] = resolve_by_max_evidence(
                {cls: evidence[pos, j] for j, cls in enumerate(active)}
            )
        else:
            to_recurse.setdefault(s, []).append(pos)
    for s, positions in sorted(to_recurse.items()):
        _ovr_round(train, s, queries, idx[np.asarray(positions)], out, k_max)


def classify_ovr_plus_batch(train: LabeledDataset, queries, k_max: int = 45) -> np.ndarray:
    """One-vs-rest predictions for many queries."""
    _validate(train)
    q = _as_queries(queries, train.dim)
    out = np.zeros(q.shape[0], dtype=np.int64)
    _ovr_round(train, tuple(range(1, train.n_classes + 1)), q, np.arange(q.shape[0]), out, k_max)
    return out


def classify_ovr_plus(train: LabeledDataset, query, k_max: int = 45) -> int:
    """One-vs-rest prediction for a single query."""
    return int(classify_ovr_plus_batch(train, np.asarray(query, dtype=np.float64)[None, :], k_max)[0])


def ovr_round_evidence(train: LabeledDataset, query, k_max: int = 45) -> dict[int, float]:
    """Per-class candidate-side evidence from the first one-vs-rest round.

    Diagnostic companion to :func:`classify_ovr_plus`; used by the CLI
    to emit per-class evidence columns.
    """
    _validate(train)
    q = _as_queries(query, train.dim)
    counts = train.class_counts
    active = tuple(range(1, train.n_classes + 1))
    result: dict[int, float] = {}
    for cls in active:
        rest = tuple(c for c in active if c != cls)
        cand_is_minority = _candidate_is_minority(counts, cls, rest)
        if cand_is_minority:
            pair = _pair_dataset(train, rest, (cls,))
        else:
            pair = _pair_dataset(train, (cls,), rest)
        clf = fit_binary(pair, k_max)
        e1, e2, _, _ = _evidence_arrays(clf, q)
        result[cls] = float(e2[0] if cand_is_minority else e1[0])
    return result
