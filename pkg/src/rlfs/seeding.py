"""Named random sub-streams derived from one root seed.

Every consumer of randomness asks for its own stream so that components can be
replayed independently: changing how many draws the agent makes never shifts
the fold assignment or the SVM's start positions.
"""

from __future__ import annotations

import numpy as np

STREAMS = {"agent": 0, "folds": 1, "svm": 2, "generator": 3}


def seed_sequence(root: int, stream: str, *key: int) -> np.random.SeedSequence:
    if stream not in STREAMS:
        raise KeyError(f"unknown random stream {stream!r}")
    return np.random.SeedSequence(int(root), spawn_key=(STREAMS[stream], *map(int, key)))


def rng_for(root: int, stream: str, *key: int) -> np.random.Generator:
    """Generator for ``stream`` under ``root``, optionally keyed further (e.g. by subset bitmask)."""
    return np.random.default_rng(seed_sequence(root, stream, *key))
