"""CSV ingestion, standardization, and the balanced split protocol.

The split protocol: per trial, m = round(fraction * smallest-class
size) rows are drawn without replacement from every class to form the
test set (so the test set is class-balanced with m rows per class) and
the remainder trains.  Rounding is banker's rounding.  Randomness comes
from the stream addressed by (seed, split-purpose, trial), so each
trial is reproducible in isolation and trials can run in parallel.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .rng import Stream, stream_id

SPLIT_PURPOSE = 1


class CsvFormatError(ValueError):
    """The input file violates the expected CSV schema."""


@dataclass(frozen=True)
class SplitSpec:
    minority_test_fraction: float = 0.25
    seed: int = 0
    trials: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.minority_test_fraction < 1.0:
            raise ValueError(
                f"minority_test_fraction must lie in (0, 1), got {self.minority_test_fraction}"
            )
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class StandardizationParams:
    """Per-feature training mean/SD; constant features are dropped."""

    mean: np.ndarray
    std: np.ndarray
    kept: tuple[int, ...]
    dropped: tuple[int, ...]


@dataclass(frozen=True)
class CsvDataset:
    """A loaded CSV: data plus the name mappings needed to report back."""

    data: LabeledDataset
    label_column: str
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def class_name(self, label: int) -> str:
        return self.class_names[label - 1]


def load_csv(path, label_column: str) -> CsvDataset:
    """Read a headered CSV into a dataset.

    Class labels are re-encoded to 1..J by descending class count (ties
    by first appearance); every non-label column must parse as a finite
    float.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise CsvFormatError(
                f"{path}: label column {label_column!r} not found; "
                f"available columns: {', '.join(header)}"
            )
        label_pos = header.index(label_column)
        feature_names = tuple(h for i, h in enumerate(header) if i != label_pos)
        if not feature_names:
            raise CsvFormatError(f"{path}: no feature columns besides the label")

        rows: list[list[float]] = []
        raw_labels: list[str] = []
        bad_cells: list[str] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    f"{path}: row {line_no} has {len(row)} fields, expected {len(header)}"
                )
            values = []
            for i, cell in enumerate(row):
                if i == label_pos:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    bad_cells.append(
                        f"row {line_no}, column {header[i]!r}: non-numeric value {cell.strip()!r}"
                    )
                    continue
                if not math.isfinite(v):
                    bad_cells.append(
                        f"row {line_no}, column {header[i]!r}: non-finite value {cell.strip()!r}"
                    )
                    continue
                values.append(v)
            rows.append(values)
            raw_labels.append(row[label_pos].strip())

    if bad_cells:
        shown = "; ".join(bad_cells[:5])
        more = f" (and {len(bad_cells) - 5} more)" if len(bad_cells) > 5 else ""
        raise CsvFormatError(f"{path}: {shown}{more}")
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")

    # Encode by descending count, ties by first appearance.
    first_seen: dict[str, int] = {}
    counts: dict[str, int] = {}
    for pos, lab in enumerate(raw_labels):
        counts[lab] = counts.get(lab, 0) + 1
        first_seen.setdefault(lab, pos)
    ordered = sorted(counts, key=lambda lab: (-counts[lab], first_seen[lab]))
    encoding = {lab: i + 1 for i, lab in enumerate(ordered)}
    labels = np.array([encoding[lab] for lab in raw_labels], dtype=np.int64)

    data = LabeledDataset(np.array(rows, dtype=np.float64), labels)
    return CsvDataset(
        data=data,
        label_column=label_column,
        feature_names=feature_names,
        class_names=tuple(ordered),
    )


def standardize(
    train: LabeledDataset, others: list[LabeledDataset] | tuple[LabeledDataset, ...] = ()
) -> tuple[LabeledDataset, list[LabeledDataset], StandardizationParams]:
    """Z-score all datasets with the training mean/SD (denominator n-1).

    Constant training features carry no distance information and are
    dropped everywhere; dropping them all is an error.
    """
    mean = train.points.mean(axis=0)
    std = train.points.std(axis=0, ddof=1) if train.n > 1 else np.zeros(train.dim)
    keep = std > 0.0
    if not np.any(keep):
        raise ValueError("every feature is constant on the training data")
    kept = tuple(int(i) for i in np.flatnonzero(keep))
    dropped = tuple(int(i) for i in np.flatnonzero(~keep))
    params = StandardizationParams(
        mean=mean[keep], std=std[keep], kept=kept, dropped=dropped
    )

    def apply(ds: LabeledDataset) -> LabeledDataset:
        pts = (ds.points[:, keep] - params.mean) / params.std
        return LabeledDataset(pts, ds.labels, ds.n_classes)

    return apply(train), [apply(ds) for ds in others], params


def split_indices(
    data: LabeledDataset, spec: SplitSpec, trial: int
) -> tuple[np.ndarray, np.ndarray]:
    """Row indices (train, test) for one trial of the split protocol."""
    if trial < 0:
        raise ValueError(f"trial index must be nonnegative, got {trial}")
    counts = data.class_counts
    if counts.min() < 1:
        raise ValueError("every class needs at least one training row")
    smallest = int(counts.min())
    if smallest < 4:
        raise ValueError(f"smallest class has {smallest} rows; need at least 4 to split")
    m = round(spec.minority_test_fraction * smallest)
    if m == 0:
        raise ValueError(
            f"test allocation rounds to zero rows per class "
            f"(fraction {spec.minority_test_fraction} of {smallest})"
        )
    if m > smallest:
        raise ValueError(f"test allocation {m} exceeds the smallest class size {smallest}")

    stream = Stream(spec.seed, stream_id(SPLIT_PURPOSE, trial))
    test_parts = []
    for cls in range(1, data.n_classes + 1):
        idx = np.flatnonzero(data.labels == cls)
        perm = stream.permutation(idx.size)
        test_parts.append(idx[perm[:m]])
    test_idx = np.sort(np.concatenate(test_parts))
    mask = np.ones(data.n, dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx


def balanced_split(
    data: LabeledDataset, spec: SplitSpec, trial: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """One trial's (train, test) datasets; test is balanced per class."""
    train_idx, test_idx = split_indices(data, spec, trial)
    return data.subset(train_idx), data.subset(test_idx)
