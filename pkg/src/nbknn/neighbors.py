"""Exact neighbor ordering and the minority counting statistic.

Ordering is a full sort per query (the evidence sweep consumes a
prefix of unknown length, so fixed-k tree queries do not apply) with
distance ties broken by ascending training index.  The tie-break makes
the ordering a total order, which is what keeps repeated runs
bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset


class MinorityCapacityError(ValueError):
    """Fewer minority points are available than the requested k."""


@dataclass(frozen=True)
class NeighborOrdering:
    """Training indices sorted by distance to one query."""

    order: np.ndarray
    distances: np.ndarray


@dataclass(frozen=True)
class MinorityCountStat:
    """Realized count: position of the k-th minority neighbor."""

    k: int
    n_obs: int


def _as_queries(queries, dim: int) -> np.ndarray:
    q = np.asarray(queries, dtype=np.float64)
    if q.ndim == 1:
        q = q[None, :]
    if q.ndim != 2 or q.shape[1] != dim:
        raise ValueError(f"query dimension {q.shape} does not match training dimension {dim}")
    if not np.all(np.isfinite(q)):
        raise ValueError("query values must be finite")
    return q


def distance_rows(points: np.ndarray, queries: np.ndarray, chunk_elems: int = 1 << 24) -> np.ndarray:
    """Euclidean distance matrix (queries x points), chunked for memory.

    Chunking never changes values: rows are independent and each row is
    computed with the same elementwise operations as the scalar path.
    """
    m = queries.shape[0]
    n, p = points.shape
    out = np.empty((m, n), dtype=np.float64)
    step = max(1, chunk_elems // max(1, n * p))
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        diff = queries[lo:hi, None, :] - points[None, :, :]
        out[lo:hi] = np.sqrt(np.sum(diff * diff, axis=2))
    return out


def order_rows(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Per-query neighbor orderings; stable argsort breaks ties by index."""
    return np.argsort(distance_rows(points, queries), axis=1, kind="stable")


def neighbor_order(train: LabeledDataset, query) -> NeighborOrdering:
    """Sort all training points by distance to ``query``."""
    q = _as_queries(query, train.dim)
    if q.shape[0] != 1:
        raise ValueError("neighbor_order takes a single query vector")
    dist = distance_rows(train.points, q)[0]
    order = np.argsort(dist, kind="stable")
    ordering = NeighborOrdering(order=order, distances=dist[order])
    ordering.order.setflags(write=False)
    ordering.distances.setflags(write=False)
    return ordering


def count_to_kth_minority(
    ordering: NeighborOrdering, labels: np.ndarray, minority: int, k: int
) -> MinorityCountStat:
    """1-based position at which the k-th minority label appears."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    hits = np.flatnonzero(np.asarray(labels)[ordering.order] == minority)
    if hits.size < k:
        raise MinorityCapacityError(
            f"only {hits.size} minority points available, cannot reach k={k}"
        )
    return MinorityCountStat(k=int(k), n_obs=int(hits[k - 1]) + 1)
