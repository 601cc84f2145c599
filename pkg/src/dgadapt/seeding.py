"""Deterministic seed derivation.

All randomness in the package flows from a single master seed. Each stage
(splitting, augmentation, parameter init, per-step dropout, shuffling)
derives its own seed from the master seed plus a stage label, so no stage
consumes another stage's random stream and runs are bit-reproducible.
"""

import hashlib


def derive_seed(master: int, *labels) -> int:
    """Derive a stage seed from a master seed and a sequence of labels.

    Labels may be strings or integers. Uses SHA-256 so the derivation is
    stable across processes and platforms (unlike Python's salted hash()).
    """
    key = repr((int(master),) + tuple(labels)).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "little")
