"""Shared fixtures and oracle helpers."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from nbknn import LabeledDataset


def nb_pmf_exact(k: int, p0: float, n: int) -> Fraction:
    """Exact rational pmf C(n-1, k-1) p^k q^(n-k) at the float value of p0."""
    from math import comb

    p = Fraction(p0)
    q = 1 - p
    return comb(n - 1, k - 1) * p**k * q ** (n - k)


def nb_lower_tail_exact(k: int, p0: float, n: int) -> Fraction:
    """Exact rational P(N < n) by direct summation."""
    total = Fraction(0)
    for m in range(k, n):
        total += nb_pmf_exact(k, p0, m)
    return total


def nb_midp_exact(k: int, p0: float, n: int) -> Fraction:
    """Exact rational mid-p value."""
    return nb_lower_tail_exact(k, p0, n) + Fraction(1, 2) * nb_pmf_exact(k, p0, n)


def brute_force_evidence(train: LabeledDataset, query, k_max: int):
    """Independent evidence oracle: explicit sort plus exact rational mid-p.

    Mirrors the documented decision procedure with none of the library's
    numeric machinery; used to pin the classifier's evidence pairs.
    """
    counts = train.class_counts
    majority = 1 if counts[0] >= counts[1] else 2
    minority = 3 - majority
    n_min = int(counts[minority - 1])
    p0 = n_min / train.n
    k_eff = min(k_max, n_min)

    dist = np.sqrt(((train.points - np.asarray(query)) ** 2).sum(axis=1))
    order = sorted(range(train.n), key=lambda i: (dist[i], i))
    positions = [i + 1 for i, idx in enumerate(order) if train.labels[idx] == minority]

    e_min = e_max = Fraction(1, 2)
    for k in range(1, k_eff + 1):
        e_k = nb_midp_exact(k, p0, positions[k - 1])
        e_min = min(e_min, e_k)
        e_max = max(e_max, e_k)
    return float(e_max), float(1 - e_min)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


@pytest.fixture()
def two_class_fixture():
    """Ten hand-placed 2-D points, 7 majority / 3 minority."""
    points = np.array(
        [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [2.0, 1.0],
            [3.0, 0.5],
            [4.0, 4.0],
            [5.0, 3.0],
            [0.5, 4.0],
            [4.5, 0.5],
            [2.5, 3.0],
        ]
    )
    labels = np.array([1, 1, 1, 1, 1, 1, 1, 2, 2, 2])
    return LabeledDataset(points, labels)


def make_dataset(rng, n=40, dim=2, n_classes=2, weights=None) -> LabeledDataset:
    """Random dataset with every class present."""
    while True:
        labels = rng.choice(
            np.arange(1, n_classes + 1), size=n, p=weights
        ).astype(np.int64)
        if len(np.unique(labels)) == n_classes:
            break
    points = rng.normal(size=(n, dim))
    return LabeledDataset(points, labels, n_classes)
