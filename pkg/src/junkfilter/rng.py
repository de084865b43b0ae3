"""Counter-based random streams keyed by ``(seed, *path)``.

Every random draw in a sweep flows from a key like
``(master_seed, circuit_index, PURPOSE)`` so results never depend on the
order in which work items are evaluated.
"""

from __future__ import annotations

import numpy as np

# purpose tags for derived streams
CIRCUIT = 0
TWIRL = 1
SHOTS = 2


def stream(seed: int, *path: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit child seed for ``path`` under ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
