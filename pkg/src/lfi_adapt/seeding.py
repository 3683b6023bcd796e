"""Deterministic seed derivation for nested stochastic stages."""

import numpy as np


def derive_seed(*keys) -> int:
    """Derive a child seed from a master seed and a key path.

    Strings are folded into ints so call sites can use readable labels,
    e.g. derive_seed(master, "batch", i). The mapping is stable across
    processes and platforms (uses numpy's SeedSequence hashing).
    """
    ints = []
    for k in keys:
        if isinstance(k, str):
            ints.append(int.from_bytes(k.encode(), "little") % (2**32))
        else:
            ints.append(int(k) % (2**32))
    return int(np.random.SeedSequence(ints).generate_state(1, np.uint64)[0] % (2**63))
