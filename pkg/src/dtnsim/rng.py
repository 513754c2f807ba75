"""Reproducible random substreams.

Every consumer of randomness (each node's movement, the traffic generator)
gets its own generator derived from ``(master_seed, purpose, ...key)``.
Streams are independent of each other and of the order in which other
streams are consumed, so adding a new consumer can never perturb existing
draws. Derivation goes through SHA-256, which is stable across platforms
and Python versions (unlike ``hash()``).
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(master_seed: int, *key: object) -> np.random.Generator:
    """Return the PCG64 generator for ``(master_seed, *key)``.

    Key parts may be strings or integers; the same tuple always produces
    the same stream.
    """
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for part in key:
        h.update(b"\x1f")
        h.update(str(part).encode())
    words = np.frombuffer(h.digest(), dtype="<u4")
    seq = np.random.SeedSequence(entropy=[int(w) for w in words])
    return np.random.Generator(np.random.PCG64(seq))
