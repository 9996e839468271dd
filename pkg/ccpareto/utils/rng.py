"""Seed mixing and random streams.

Every stream in the package is a numpy ``Generator`` over the Philox
counter-based bit generator. Keys are derived from a 64-bit master seed
and an integer label through the SplitMix64 finalizer, so streams for
different labels are independent and can be created in any order.
"""
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

GENERATOR_ID = "philox4x64-splitmix64"

# Stream labels for per-run substreams
MUTATION_STREAM = 0
SELECTION_STREAM = 1
# Label under which the shared sample matrix seed is derived from a master seed
SAMPLE_STREAM = 0x53414D50


def splitmix64(x: int) -> int:
    """SplitMix64 output finalizer on a 64-bit integer."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(seed: int, index: int) -> int:
    """Mix a master seed with a non-negative index into a new 64-bit key."""
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    return splitmix64((seed ^ splitmix64(index & MASK64)) & MASK64)


def make_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=mix64(seed, index)))


def run_seed(master_seed: int, run_index: int) -> int:
    """Seed of run ``run_index`` within an experiment seeded by ``master_seed``."""
    return mix64(master_seed, run_index)


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


@dataclass
class RunStreams:
    """Independent named substreams of one run."""
    mutation: np.random.Generator
    selection: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RunStreams":
        return cls(
            mutation=make_generator(seed, MUTATION_STREAM),
            selection=make_generator(seed, SELECTION_STREAM),
        )
