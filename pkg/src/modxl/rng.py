"""Named random streams.

Every stream is a Philox4x64-10 counter-based generator keyed by the pair
``(seed, stream_id)`` packed into the 128-bit key ``seed + stream_id * 2**64``.
Draws are consumed in documented order, so a stream can be reproduced from
its key alone and streams never overlap.

Stream ids:

* ``GREEDY_ORDER``: permutation of user indices visited by greedy grouping.
* ``RANDOM_GROUPING``: one integer RB draw per user for random grouping.
* ``user_stream(k)``: the position of user ``k``, then four
  draws per NLoS path (distance, angle, phase, RCS).
"""

from __future__ import annotations

import numpy as np

GREEDY_ORDER = 1
RANDOM_GROUPING = 2
_USER_BASE = 1 << 32

_MASK64 = (1 << 64) - 1


def user_stream(k: int) -> int:
    return _USER_BASE + int(k)


def stream(seed: int, stream_id: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    key = seed + (int(stream_id) << 64)
    return np.random.Generator(np.random.Philox(key=key))
