"""Deterministic seed derivation shared by all experiment modules.

Every randomized quantity in this package is a pure function of a small
tuple of integers (master seed, grid value, trial index, ...).  Seeds are
derived through :class:`numpy.random.SeedSequence`, which hashes the whole
tuple, so changing any component gives an unrelated stream while rerunning
with the same tuple is bit-identical.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_seed"]


def derive_seed(*parts: int) -> int:
    """Map a tuple of nonnegative ints to a single 64-bit seed."""
    if not parts:
        raise ValueError("derive_seed needs at least one component")
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
