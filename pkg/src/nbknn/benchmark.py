"""CSV benchmark protocol: repeated balanced splits, standardize, score."""

from __future__ import annotations

from .data_io import CsvDataset, SplitSpec, balanced_split, standardize
from .methods import map_trials, predict_with_method, validate_methods
from .metrics import PrfReport, TrialReport, aggregate_trials, confusion, prf
from .rng import fold_seed

BENCH_CV_PURPOSE = 5


def _benchmark_trial(args) -> dict[str, PrfReport]:
    data, spec, trial, methods, k_max = args
    train, test = balanced_split(data, spec, trial)
    train_std, (test_std,), _ = standardize(train, [test])
    out: dict[str, PrfReport] = {}
    for j, name in enumerate(methods):
        preds = predict_with_method(
            name,
            train_std,
            test_std.points,
            k_max,
            cv_seed=fold_seed(spec.seed, BENCH_CV_PURPOSE, trial, j),
        )
        out[name] = prf(confusion(test_std.labels, preds, data.n_classes))
    return out


def run_csv_benchmark(
    csv_data: CsvDataset,
    spec: SplitSpec,
    methods,
    k_max: int = 45,
    jobs: int = 1,
) -> list[TrialReport]:
    """Score the requested methods over ``spec.trials`` random splits.

    Each trial re-standardizes with its own training statistics; the
    test rows never influence the standardization.
    """
    data = csv_data.data
    methods = validate_methods(methods, n_classes=data.n_classes)
    args = [(data, spec, t, methods, int(k_max)) for t in range(spec.trials)]
    per_trial = map_trials(_benchmark_trial, args, jobs)
    return [aggregate_trials([res[name] for res in per_trial], name) for name in methods]
