"""Negative binomial tail evaluation for the evidence statistics.

The count statistic behind the classifiers is the number of neighbors
that must be examined before the k-th minority-class neighbor appears.
Under the null hypothesis that neighbor labels arrive independently
with a fixed minority proportion p0, that count N lives on
{k, k+1, ...} with

    f_k(n) = C(n-1, k-1) * p0**k * (1-p0)**(n-k).

This module evaluates log f_k, the lower tail P(N < n), and the mid-p
value P(N < n) + f_k(n)/2 in double precision, stably for k up to 1e4
and n up to 1e7.  Two tail strategies are used, switched on the number
of summands:

* n - k <= 64: direct summation of pmf terms in log space; exact to
  float rounding for the short sums that dominate near the support
  start;
* n - k > 64: the lower tail equals the regularized incomplete beta
  I_{p0}(k, n-k), with no explicit summation.

Everything here is a pure function of its arguments.  Scalar entry
points delegate to the array kernels, so scalar and vectorized callers
see bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln

# Switch point between direct log-space summation and incomplete beta.
_DIRECT_TERMS = 64

# Lower clamp for probabilities that feed comparisons; keeps evidence
# values strictly positive instead of propagating underflow zeros.
_TINY = 1e-300


@dataclass(frozen=True)
class NegBinParams:
    """Null model: k required minority successes at proportion p0."""

    k: int
    p0: float

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise ValueError(f"k must be an integer, got {self.k!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        p0 = float(self.p0)
        if not math.isfinite(p0) or not 0.0 < p0 < 1.0:
            raise ValueError(f"p0 must lie strictly inside (0, 1), got {self.p0!r}")


def _check_support(params: NegBinParams, n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < params.k:
        raise ValueError(f"n={n} is below the support start n=k={params.k}")
    return int(n)


def _log_pmf_grid(k: np.ndarray, n: np.ndarray, log_p0: float, log_q0: float) -> np.ndarray:
    """log f_k(n) elementwise for float64 arrays with n >= k >= 1."""
    return (
        gammaln(n)
        - gammaln(k)
        - gammaln(n - k + 1.0)
        + k * log_p0
        + (n - k) * log_q0
    )


def _lower_tail_many(k: np.ndarray, n: np.ndarray, p0: float) -> np.ndarray:
    """P(N < n) elementwise for int64 arrays of identical shape."""
    log_p0 = math.log(p0)
    log_q0 = math.log1p(-p0)
    span = n - k
    out = np.zeros(k.shape, dtype=np.float64)

    small = span <= _DIRECT_TERMS
    if np.any(small):
        ks = k[small].astype(np.float64)
        spans = span[small]
        offsets = np.arange(_DIRECT_TERMS, dtype=np.float64)
        terms = _log_pmf_grid(ks[:, None], ks[:, None] + offsets[None, :], log_p0, log_q0)
        # Pad past-the-end summands with -inf; logaddexp ignores them.
        terms = np.where(offsets[None, :] < spans[:, None], terms, -np.inf)
        out[small] = np.exp(np.logaddexp.reduce(terms, axis=1))

    big = ~small
    if np.any(big):
        out[big] = betainc(k[big].astype(np.float64), span[big].astype(np.float64), p0)
    return np.minimum(out, 1.0)


def _log_pmf_many(k: np.ndarray, n: np.ndarray, p0: float) -> np.ndarray:
    return _log_pmf_grid(
        k.astype(np.float64), n.astype(np.float64), math.log(p0), math.log1p(-p0)
    )


def adjusted_pvalue_many(k, n_obs, p0: float) -> np.ndarray:
    """Mid-p value P(N < n_obs) + f_k(n_obs)/2, elementwise.

    ``k`` and ``n_obs`` are broadcast together; the result is clamped
    to [1e-300, 1] so downstream comparisons never see zeros.
    """
    k = np.asarray(k, dtype=np.int64)
    n = np.asarray(n_obs, dtype=np.int64)
    shape = np.broadcast_shapes(k.shape, n.shape)
    kb = np.broadcast_to(k, shape).reshape(-1)
    nb = np.broadcast_to(n, shape).reshape(-1)
    if kb.size and kb.min() < 1:
        raise ValueError("k values must be >= 1")
    if np.any(nb < kb):
        raise ValueError("n values below the support start n = k")
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"p0 must lie strictly inside (0, 1), got {p0!r}")
    e = _lower_tail_many(kb, nb, p0) + 0.5 * np.exp(_log_pmf_many(kb, nb, p0))
    return np.clip(e, _TINY, 1.0).reshape(shape)


def log_pmf(params: NegBinParams, n: int) -> float:
    """Natural log of f_k(n); computed via log-gamma, never overflows."""
    n = _check_support(params, n)
    return float(_log_pmf_many(np.array([params.k]), np.array([n]), float(params.p0))[0])


def cdf_below(params: NegBinParams, n: int) -> float:
    """P(N < n), the lower tail excluding n itself; 0 at n = k."""
    n = _check_support(params, n)
    return float(
        _lower_tail_many(
            np.array([params.k], dtype=np.int64),
            np.array([n], dtype=np.int64),
            float(params.p0),
        )[0]
    )


def adjusted_pvalue(params: NegBinParams, n_obs: int) -> float:
    """Mid-p value P(N < n_obs) + f_k(n_obs)/2, in (0, 1].

    Strictly increasing in n_obs up to float resolution; the
    complementary evidence is 1 minus this value by construction.
    """
    n_obs = _check_support(params, n_obs)
    return float(
        adjusted_pvalue_many(
            np.array([params.k], dtype=np.int64),
            np.array([n_obs], dtype=np.int64),
            float(params.p0),
        )[0]
    )
