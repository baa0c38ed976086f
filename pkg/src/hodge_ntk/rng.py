"""Deterministic, portable random streams.

Every stochastic routine in this package draws from a PCG64 generator.
Independent streams are derived from one master seed through SeedSequence
spawn keys, so results are bit-reproducible across platforms and runs.

Stream-splitting rule: ``substream(seed, *path)`` maps the master seed plus
a path of labels to one child stream. Integer labels are used verbatim;
string labels are hashed with CRC-32. Two paths that differ in any
component yield statistically independent generators.
"""

from __future__ import annotations

import zlib

import numpy as np

PathPart = int | str


def _key_part(part: PathPart) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"stream path components must be nonnegative, got {part}")
        return int(part)
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    raise TypeError(f"stream path components must be int or str, got {type(part)!r}")


def substream(seed: int, *path: PathPart) -> np.random.Generator:
    """Child generator for ``path`` under the given master seed."""
    key = tuple(_key_part(p) for p in path)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def as_rng(seed: int | np.random.Generator) -> np.random.Generator:
    """Accept either a seed or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
