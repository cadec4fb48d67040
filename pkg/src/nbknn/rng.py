"""Deterministic random streams for reproducible experiments.

All randomness in this package flows through :class:`Stream`, a thin
wrapper over the Philox counter-based bit generator.  Philox is keyed
rather than seeded: every (seed, stream) pair selects an independent
random sequence by construction, so parallel trials draw from disjoint
streams without coordination and reported numbers never depend on
scheduling.  The raw bit stream of a named bit generator is frozen by
its definition, so the same (seed, stream) pair reproduces the same
numbers across platforms and library versions.

Key derivation uses the SplitMix64 finalizer, a bijection on 64-bit
integers, so distinct (seed, stream) pairs always map to distinct
Philox keys.

Transforms from raw 64-bit words are fixed here:

* ``uniform``:  ((raw >> 11) + 0.5) * 2**-53, a double in (0, 1);
* ``normal``:   inverse normal CDF of a uniform (one word per normal);
* ``permutation``: argsort of fresh uniforms with stable index
  tie-break, i.e. a uniformly random permutation.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer; bijective on 64-bit integers."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_key(seed: int, stream: int) -> int:
    """128-bit Philox key for the (seed, stream) pair.

    The low word depends only on the seed and the high word is a
    bijection of the stream id for any fixed seed, so no two pairs
    share a key.
    """
    k0 = mix64(seed)
    k1 = mix64(((stream ^ k0) + _GOLDEN) & _MASK64)
    return (k1 << 64) | k0


def stream_id(purpose: int, trial: int) -> int:
    """Compose a stream id from a small purpose tag and a trial index."""
    if not 0 <= purpose < 2**16:
        raise ValueError(f"purpose tag out of range: {purpose}")
    if trial < 0:
        raise ValueError(f"trial index must be nonnegative, got {trial}")
    return (purpose << 48) | (trial & ((1 << 48) - 1))


def fold_seed(seed: int, *parts: int) -> int:
    """Derive a child seed by folding integer parts into ``seed``.

    Used where a component takes a plain seed (e.g. cross-validation)
    but must stay decorrelated across trials and methods.
    """
    state = mix64(seed)
    for p in parts:
        state = mix64(state ^ mix64((p + _GOLDEN) & _MASK64))
    return state


class Stream:
    """Sequential random stream addressed by (seed, stream)."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self._bitgen = np.random.Philox(key=derive_key(self.seed, self.stream))

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words."""
        return self._bitgen.random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on the open interval (0, 1)."""
        return ((self.raw(n) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        """``n`` standard normal deviates via the inverse CDF."""
        return ndtri(self.uniform(n))

    def permutation(self, n: int) -> np.ndarray:
        """A uniformly random permutation of 0..n-1."""
        return np.argsort(self.uniform(n), kind="stable").astype(np.int64)
