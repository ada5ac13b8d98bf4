"""Counter-based random streams.

Every random quantity in the package is a pure function of a seed and an
integer index, so any slice of a stream can be regenerated independently and
paths can be produced in parallel without shared generator state.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

__all__ = [
    "MASK64",
    "derive_seed",
    "derive_generator",
    "stream_uniforms",
]

MASK64 = (1 << 64) - 1
_COUNTER_MOD = 1 << 256
_TWO_M53 = 2.0**-53


def _key(seed: int, component: int) -> int:
    words = SeedSequence([int(seed) & MASK64, int(component)]).generate_state(2, np.uint64)
    return int(words[0]) | (int(words[1]) << 64)


def derive_seed(*ids: int) -> int:
    """Derive a 64-bit seed from a tuple of non-negative integer ids.

    ``derive_seed(master, cell, rep)`` gives the replication stream used by the
    experiment harness; adding cells never perturbs existing streams.
    """
    entropy = [int(i) & MASK64 for i in ids]
    return int(SeedSequence(entropy).generate_state(1, np.uint64)[0])


def derive_generator(*ids: int) -> Generator:
    """A numpy ``Generator`` (Philox) seeded from :func:`derive_seed`."""
    return Generator(Philox(key=derive_seed(*ids)))


def stream_uniforms(seed: int, start: int, n: int, component: int = 0) -> np.ndarray:
    """Open-interval uniforms for stream indices ``start, ..., start + n - 1``.

    Returns an ``(n, 4)`` array; row ``j`` depends only on
    ``(seed, component, start + j)``. Negative indices are allowed.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return np.empty((0, 4))
    # Philox increments its counter before producing a block, hence the -1.
    bitgen = Philox(key=_key(seed, component), counter=(start - 1) % _COUNTER_MOD)
    raw = bitgen.random_raw(4 * n).reshape(n, 4)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
