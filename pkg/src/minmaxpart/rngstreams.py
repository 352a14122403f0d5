"""Named random streams derived from a single 64-bit seed.

Every component that consumes randomness gets its own stream (``cover``,
``aggregate``, ``separator``, ...), so a component can be re-run in isolation
and reproduce exactly what it did inside a larger pipeline run.
"""

from __future__ import annotations

import numpy as np

_STREAMS = ("cover", "aggregate", "separator", "instance", "bench", "peel")


def stream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Deterministic generator for (seed, stream name, batch index)."""
    if name not in _STREAMS:
        raise ValueError(f"unknown stream {name!r}; known: {_STREAMS}")
    key = (int(seed) & 0xFFFFFFFFFFFFFFFF, _STREAMS.index(name), int(index))
    return np.random.default_rng(np.random.SeedSequence(key))


def streams(seed: int) -> dict[str, np.random.Generator]:
    return {name: stream(seed, name) for name in _STREAMS}
