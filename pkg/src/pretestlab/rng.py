"""Keyed random substreams.

Every stream is a Philox (counter-based) generator seeded from
``SeedSequence(master_seed, spawn_key=keys)``. A child stream depends only on
the master seed and its key path, never on how much of the parent has been
consumed, so a replicate draws the same numbers whichever worker runs it.
"""

from __future__ import annotations

import hashlib

import numpy as np

Key = int | str


def key_to_int(key: Key) -> int:
    """Map a stream key to a non-negative integer (strings via BLAKE2b)."""
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"stream keys must be non-negative, got {key}")
        return int(key)
    digest = hashlib.blake2b(str(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """A named substream of a master seed.

    >>> a = RngStream(7, "scenario", 3).uniform(2)
    >>> b = RngStream(7).child("scenario", 3).uniform(2)
    >>> bool((a == b).all())
    True
    """

    __slots__ = ("master_seed", "keys", "_gen")

    def __init__(self, master_seed: int, *keys: Key):
        if master_seed < 0:
            raise ValueError(f"master seed must be non-negative, got {master_seed}")
        self.master_seed = int(master_seed)
        self.keys = tuple(keys)
        seq = np.random.SeedSequence(
            self.master_seed, spawn_key=tuple(key_to_int(k) for k in keys)
        )
        self._gen = np.random.Generator(np.random.Philox(seq))

    def child(self, *keys: Key) -> "RngStream":
        return RngStream(self.master_seed, *self.keys, *keys)

    def uniform(self, size: int | tuple[int, ...]) -> np.ndarray:
        """Uniform doubles on [0, 1)."""
        return self._gen.random(size)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def __repr__(self) -> str:
        return f"RngStream({self.master_seed}, {', '.join(map(repr, self.keys))})"
