"""
Seed derivation.

Every random stream is a PCG64 generator seeded through ``SeedSequence``
with entropy ``(H, *indices)`` where ``H`` is the first eight bytes
(big-endian) of ``SHA-256("<master_seed>/<label>")``. Labels name the
purpose of the stream: ``graph``, ``placement``, ``queries``.
"""

from __future__ import annotations

import hashlib

import numpy as np


def label_hash(master_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{int(master_seed)}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derive_seed(master_seed: int, label: str, *indices: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([label_hash(master_seed, label), *(int(i) for i in indices)])


def stream(master_seed: int, label: str, *indices: int) -> np.random.Generator:
    """Independent generator for ``label`` at the given scenario/replicate indices."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, label, *indices)))


def as_generator(seed) -> np.random.Generator:
    """Accept an int, a ``SeedSequence`` or a ``Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))
