"""Seed derivation for independent, reproducible random streams.

Every random stream in the toolkit is a ``numpy.random.Generator`` (PCG64)
seeded from a 64-bit value. Per-item seeds are derived as::

    seed = int.from_bytes(sha256("<master>:<part1>:<part2>...").digest()[:8], "little")

so that any item can be regenerated in isolation, and parallel workers never
share state.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, *parts: object) -> int:
    key = ":".join(str(p) for p in (int(master_seed), *parts))
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "little")


def stream(master_seed: int, *parts: object) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *parts))
