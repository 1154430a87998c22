"""Deterministic epoch-shuffled batching over manifests."""

import zlib

import numpy as np

from gazekit.errors import DataError


def batch_iterator(manifest, batch_size: int, seed: int, epoch: int):
    """Yield lists of records: an epoch-seeded shuffle split into batches,
    final short batch kept. Every record appears exactly once per epoch."""
    if batch_size < 1:
        raise DataError(f"batch_iterator: batch_size must be >= 1, got {batch_size}")
    n = len(manifest.records)
    order = np.random.default_rng(np.random.SeedSequence([seed, epoch])).permutation(n)
    for start in range(0, n, batch_size):
        yield [manifest.records[i] for i in order[start : start + batch_size]]


def sample_rng(seed: int, epoch: int, record) -> np.random.Generator:
    """Per-sample generator derived from (run seed, epoch, record key), so
    augmentation draws are independent of iteration order."""
    key = "|".join(str(part) for part in record.key)
    return np.random.default_rng(np.random.SeedSequence([seed, epoch, zlib.crc32(key.encode())]))
