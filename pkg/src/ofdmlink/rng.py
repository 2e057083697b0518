"""Seed derivation: one master seed fans out into independent random streams."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Streams", "derive_seed", "make_streams"]


def derive_seed(master, *keys: int) -> np.random.SeedSequence:
    """Child seed of ``master`` addressed by ``keys``.

    ``derive_seed(s, i)`` equals ``SeedSequence(s).spawn(n)[i]``, so sweeps can
    hand out per-point seeds without materialising the whole list.
    """
    if isinstance(master, np.random.SeedSequence):
        return np.random.SeedSequence(
            master.entropy, spawn_key=tuple(master.spawn_key) + tuple(keys)
        )
    return np.random.SeedSequence(int(master), spawn_key=tuple(keys))


@dataclass
class Streams:
    """Independent generators for data bits, receiver noise and fading paths."""

    bits: np.random.Generator
    noise: np.random.Generator
    fading: np.random.Generator


def make_streams(seed) -> Streams:
    if isinstance(seed, Streams):
        return seed
    # keyed children rather than SeedSequence.spawn, which mutates its parent
    bits, noise, fading = (np.random.default_rng(derive_seed(seed, i)) for i in range(3))
    return Streams(bits=bits, noise=noise, fading=fading)
