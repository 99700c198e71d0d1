"""Seeded random streams.

Every replication ``r`` of a simulation seeded with ``seed`` draws from
``PCG64(SeedSequence(seed, spawn_key=(r,)))``.  The stream depends only on
``(seed, r)``, so results do not change with the number of workers.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, replication: int | None = None) -> np.random.Generator:
    """Generator for ``seed``, or for replication ``replication`` of ``seed``."""
    if replication is None:
        ss = np.random.SeedSequence(int(seed))
    else:
        ss = np.random.SeedSequence(int(seed), spawn_key=(int(replication),))
    return np.random.Generator(np.random.PCG64(ss))
