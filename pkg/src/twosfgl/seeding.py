"""Deterministic seed derivation.

Every random decision in the simulator draws from a generator whose seed is
derived from the single experiment seed plus a purpose label, so that arms of
an experiment share exactly the randomness they are meant to share (sampling,
splits) and nothing else.
"""

import hashlib

__all__ = ["derive_seed"]


def derive_seed(master_seed: int, *labels) -> int:
    """Derive a 64-bit seed from a master seed and a sequence of labels.

    The derivation is a stable hash (independent of interpreter state), so
    the same (master_seed, labels) always yields the same seed across runs
    and platforms.
    """
    h = hashlib.sha256()
    h.update(int(master_seed).to_bytes(16, "big", signed=True))
    for label in labels:
        part = str(label).encode("utf-8")
        h.update(len(part).to_bytes(4, "big"))
        h.update(part)
    return int.from_bytes(h.digest()[:8], "big")
