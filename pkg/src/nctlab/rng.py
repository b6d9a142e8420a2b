"""Named, independently reproducible random streams.

Every stochastic component draws from its own stream.  A stream is a
Philox (counter-based) generator keyed by the master seed and a stable
hash of the stream name, so one integer reproduces a whole run and adding
a new consumer never shifts the draws of an existing one.
"""
import zlib

import numpy as np

STREAM_NAMES = (
    "data-shuffle",
    "corruption",
    "tv-model-1",
    "tv-model-2",
    "init-model-1",
    "init-model-2",
)


def stream_key(master_seed, name):
    """The documented split function: (master seed, CRC-32 of name) -> SeedSequence."""
    if int(master_seed) < 0:
        raise ValueError("master seed must be non-negative")
    return np.random.SeedSequence([int(master_seed), zlib.crc32(name.encode("utf-8"))])


def make_stream(master_seed, name):
    return np.random.Generator(np.random.Philox(stream_key(master_seed, name)))


def make_streams(master_seed, names=STREAM_NAMES):
    return {name: make_stream(master_seed, name) for name in names}
