"""Deterministic seed derivation.

``derive_seed(root, *keys)`` feeds the root seed and the keys to numpy's
``SeedSequence`` (strings are reduced to their CRC-32 first) and returns a
63-bit integer.  Distinct key tuples give independent streams, so adding a
restart or a sweep level never changes the seeds of existing ones.
"""

import zlib

import numpy as np


def _word(key) -> int:
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFFFFFFFFFF
    return zlib.crc32(str(key).encode("utf-8"))


def derive_seed(root, *keys) -> int:
    words = [_word(root)] + [_word(k) for k in keys]
    state = np.random.SeedSequence(words).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1])) & 0x7FFFFFFFFFFFFFFF
