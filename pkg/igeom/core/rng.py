"""Seeded random streams.

Every stochastic operation takes a ``seed`` that may be an integer, a
``SeedSequence`` or an existing ``Generator``. Streams are Philox based so that
run ``i`` of a batch is addressed by counter and not by scheduling order.
"""

from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def run_seed(root_seed: int, index: int) -> np.random.SeedSequence:
    """Seed of run ``index`` under ``root_seed``; independent of worker layout."""

    return np.random.SeedSequence(int(root_seed), spawn_key=(int(index),))


def run_seeds(root_seed: int, start: int, count: int) -> list[np.random.SeedSequence]:
    return [run_seed(root_seed, start + offset) for offset in range(count)]
