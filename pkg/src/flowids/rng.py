"""Pinned deterministic PRNG: a splitmix64 counter stream.

All randomness in the pipeline (train/test shuffle, bootstrap draws,
per-node feature subsampling) comes from this generator so that runs are
bit-reproducible across platforms. The generator is the splitmix64
finalizer applied to a Weyl sequence: output[i] = mix(seed + (i+1) * GAMMA).
Being counter-based it vectorizes cleanly with numpy uint64 arithmetic.
"""

from __future__ import annotations

import numpy as np

_GAMMA = 0x9E3779B97F4A7C15
_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64(z: int) -> int:
    """splitmix64 finalizer on a single 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Derive a child seed from (master seed, index); used for per-tree streams."""
    return splitmix64((master_seed + (index + 1) * _GAMMA) & _MASK)


class Stream:
    """Stateful view over the splitmix64 counter sequence for one seed."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self.counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        """Next n raw 64-bit outputs as a uint64 array."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        state = (np.uint64(self.seed) + idx * np.uint64(_GAMMA))
        z = state
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def uniform(self, n: int) -> np.ndarray:
        """n doubles in [0, 1) using the top 53 bits of each output."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def integers_below(self, bound: int, n: int) -> np.ndarray:
        """n integers in [0, bound); floor of scaled uniforms (bias < 2^-53, deterministic)."""
        return np.minimum(
            np.floor(self.uniform(n) * bound).astype(np.int64), bound - 1
        )

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n)."""
        perm = np.arange(n, dtype=np.int64)
        if n < 2:
            return perm
        draws = self.next_u64(n - 1)
        for step, i in enumerate(range(n - 1, 0, -1)):
            j = int(draws[step] % np.uint64(i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def sample_without_replacement(self, population: int, k: int) -> np.ndarray:
        """k distinct indices from range(population), ascending order."""
        if k > population:
            raise ValueError(f"cannot sample {k} from population of {population}")
        if k == population:
            return np.arange(population, dtype=np.int64)
        pool = np.arange(population, dtype=np.int64)
        draws = self.next_u64(k)
        for i in range(k):
            j = i + int(draws[i] % np.uint64(population - i))
            pool[i], pool[j] = pool[j], pool[i]
        return np.sort(pool[:k])
