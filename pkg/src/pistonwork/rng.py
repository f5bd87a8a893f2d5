"""Counter-based random streams.

All stochastic code in the package draws from Philox generators keyed by a
(seed, stream) pair.  Philox is counter-based, so streams with different keys
are statistically independent and any work schedule (serial, chunked,
parallel) that assigns stream s to task s reproduces the same numbers
bit-for-bit.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_generator(seed, stream):
    """Return an independent Generator for the given (seed, stream) key."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
