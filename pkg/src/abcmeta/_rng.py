from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_SEED = 1234


def substream(seed: int, arm: int, chunk: int) -> np.random.Generator:
    """Independent counter-based stream for one chunk of one arm.

    The stream depends only on (seed, arm, chunk), never on which thread runs
    the chunk or in what order chunks finish.
    """
    seq = np.random.SeedSequence(seed, spawn_key=(arm, chunk))
    return np.random.Generator(np.random.Philox(seq))


def study_seed(seed: int, study_id: str) -> int:
    """Per-study seed for batch runs, a pure function of (seed, study_id)."""
    digest = hashlib.blake2b(
        f"{seed}\x00{study_id}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")
