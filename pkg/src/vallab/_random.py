"""Reproducible random substreams and batched Monte-Carlo averaging.

A caller hands in one ``numpy.random.Generator``; we draw a single 63-bit
seed from it and spawn counter-indexed child streams.  Batch ``i`` always
uses child ``i``, so results for a fixed (seed, sample count) do not
depend on how many threads evaluate the batches.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BATCH_SIZE = 10_000


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("VALLAB_THREADS", "1")))
    except ValueError:
        return 1


def substreams(rng, count: int) -> list[np.random.Generator]:
    root = np.random.SeedSequence(int(as_generator(rng).integers(2 ** 63)))
    return [np.random.default_rng(s) for s in root.spawn(count)]


def ordered_map(fn, items, threads: int | None = None) -> list:
    """map() that may run concurrently but always returns results in input order."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def batched_mean(draw, samples: int, rng, batch_size: int = BATCH_SIZE):
    """Monte-Carlo mean of ``draw(gen, size)`` with batch-means standard error.

    ``draw`` returns an array whose leading axis has length ``size``; trailing
    axes are averaged independently.  Returns ``(mean, stderr)``.
    """
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)
    gens = substreams(rng, len(sizes))
    sums = ordered_map(lambda job: np.sum(draw(job[0], job[1]), axis=0), list(zip(gens, sizes)))
    sizes = np.asarray(sizes, dtype=float)
    sums = np.asarray(sums)
    mean = sums.sum(axis=0) / samples
    if len(sizes) < 2:
        return mean, np.full(np.shape(mean), np.nan)
    bmeans = sums / sizes.reshape((-1,) + (1,) * (sums.ndim - 1))
    dev = np.abs(bmeans - mean) ** 2
    var = np.tensordot(sizes, dev, axes=(0, 0)) / ((len(sizes) - 1) * samples)
    return mean, np.sqrt(var)
