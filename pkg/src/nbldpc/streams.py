"""Reproducible random streams.

Every trial draws from ``default_rng(SeedSequence(seed, spawn_key=index))``
where ``index`` is a tuple of non-negative ints (for example the trial number).
The stream of a trial depends only on the master seed and its index, so the
number of worker processes never changes results.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def master_seed(seed) -> int:
    """Normalize an int seed or a Generator into an int master seed."""
    if isinstance(seed, np.random.Generator):
        return int(seed.integers(0, 2**63 - 1))
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(seed)


def trial_rng(seed: int, *index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in index)))


def run_parallel(fn, items, workers: int = 1, chunksize: int = 8) -> list:
    """``[fn(x) for x in items]``, optionally spread over worker processes."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
