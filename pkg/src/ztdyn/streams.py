"""Counter-based random streams.

Every random quantity in the package is a pure function of a 64-bit master
seed plus a path of small integers (trial index, replica index, purpose tag).
Streams are Philox generators keyed through ``numpy.random.SeedSequence``
spawn keys, so no stream depends on how many other streams were drawn before
it or on which thread draws it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# purpose tags (last element of a derivation path)
COUPLINGS = 0
INITIAL = 1
DYNAMICS = 2

# sites/coins are drawn in fixed-size blocks; changing this changes every trajectory
BLOCK = 4096


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def seed_sequence(seed: int, *path: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=check_seed(seed), spawn_key=tuple(int(p) for p in path))


def generator(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for ``(seed, *path)``."""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *path)))


def derive_seed(seed: int, *path: int) -> int:
    """A child 64-bit seed, stateless in ``(seed, *path)``."""
    state = seed_sequence(seed, *path).generate_state(1, dtype=np.uint64)
    return int(state[0])


def pair_uniforms(seed: int, n: int) -> np.ndarray:
    """Uniforms in ``[0, 1)`` for every unordered pair of ``n`` vertices.

    Pair ``{i, j}`` with ``i < j`` receives draw number ``j*(j-1)/2 + i`` of a
    Philox stream keyed by ``seed``. The index only depends on the pair, so the
    matrix for ``n`` is the leading block of the matrix for any larger ``n``,
    and any contiguous range of pairs can be produced independently with
    ``Philox.advance``.
    """
    npairs = n * (n - 1) // 2
    bitgen = np.random.Philox(key=check_seed(seed))
    return np.random.Generator(bitgen).random(npairs)


def pair_uniforms_range(seed: int, start: int, stop: int) -> np.ndarray:
    """Draws ``start..stop`` of the pair stream, without producing the prefix."""
    bitgen = np.random.Philox(key=check_seed(seed))
    # Philox yields four 64-bit words per counter increment
    bitgen.advance(start // 4)
    skip = start % 4
    out = np.random.Generator(bitgen).random(stop - start + skip)
    return out[skip:]


class UpdateStream:
    """Update sites and zero-field coins for one dynamical realization.

    Both the spin chain and the partition search consume this stream, so two
    processes built from the same seed see the same ``(Y_k, B_k)`` sequence.
    """

    def __init__(self, seed: int, n: int):
        self.n = int(n)
        self._rng = generator(seed, DYNAMICS)

    def next_block(self) -> tuple[np.ndarray, np.ndarray]:
        sites = self._rng.integers(0, self.n, size=BLOCK, dtype=np.int64)
        coins = (2 * self._rng.integers(0, 2, size=BLOCK, dtype=np.int8) - 1).astype(np.int8)
        return sites, coins

    def __iter__(self):
        while True:
            yield self.next_block()
