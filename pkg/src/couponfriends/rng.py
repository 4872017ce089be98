"""Deterministic random streams.

Every trial draws from its own xoshiro256** stream whose state is expanded
with splitmix64 from a 64-bit key derived from ``(master_seed, trial_index)``.
The same key always yields the same draws, on any platform and with either
kernel backend, so parallel scheduling cannot change results.
"""
import numpy as np

from . import kernels
from ._pykernels import MASK, derive_key, seed_state

GENERATOR = "xoshiro256**/splitmix64; trial key = mix64(mix64(seed) ^ index)"


def check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed <= MASK:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return int(seed)


class RngStream:
    """A xoshiro256** stream keyed by ``(seed, index)``.

    ``RngStream(seed, i)`` is exactly the stream that trial ``i`` of an
    experiment with master seed ``seed`` uses.
    """

    generator = GENERATOR

    def __init__(self, seed, index=0):
        self.seed = check_seed(seed)
        self.index = int(index)
        self.state = np.array(seed_state(derive_key(self.seed, self.index)), dtype=np.uint64)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, index={self.index})"

    def next_u64(self):
        return int(kernels.next_u64(self.state))

    def randbelow(self, k):
        """Uniform integer in ``[0, k)``."""
        if k < 1:
            raise ValueError("k must be >= 1")
        return int(kernels.bounded(self.state, k))

    def spawn(self, *coords):
        """Child stream keyed by this stream's seed and extra coordinates."""
        return RngStream(derive_key(self.seed, self.index, *coords))


def derive_seed(master_seed, *coords):
    """64-bit seed for a sub-experiment (e.g. a sweep cell) at ``coords``."""
    return derive_key(check_seed(master_seed), *coords)
