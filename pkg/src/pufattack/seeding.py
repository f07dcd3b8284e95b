"""Deterministic seed derivation.

Every random artifact (PUF instance, learning set, test set, optimizer run) is
keyed by a 64-bit seed derived from one master seed and a tuple of labels.
Derivation uses :class:`numpy.random.SeedSequence` with the labels as its
``spawn_key``; string labels are first mapped to integers through the first
8 bytes of their SHA-256 digest. Any single artifact can thus be regenerated
without generating its siblings.
"""
import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def _label_to_int(label):
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"negative seed label {label}")
        return int(label)
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_seed(master, *labels):
    """Return a 64-bit seed that is a pure function of ``master`` and ``labels``."""
    if not 0 <= master <= MASK64:
        raise ValueError(f"master seed must fit in 64 unsigned bits, got {master}")
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(_label_to_int(x) for x in labels))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed
