"""Reproducible random streams.

Replication ``r`` of an experiment with master seed ``s`` draws from

    Generator(PCG64(SeedSequence(entropy=s, spawn_key=(r,))))

which is exactly the ``r``-th child that ``SeedSequence(s).spawn`` would
return.  Streams for different ``r`` are statistically independent, and
adding replications never changes the streams of earlier ones.  An
auxiliary batch (e.g. calibration runs) uses ``spawn_key=(r, batch)``.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "numpy-PCG64/SeedSequence(entropy=seed,spawn_key=(rep[,batch]))"

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    from .errors import InvalidInputError

    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise InvalidInputError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def replication_stream(seed: int, rep: int, batch: int | None = None) -> np.random.Generator:
    """Return the generator for replication ``rep`` under master ``seed``."""
    key = (int(rep),) if batch is None else (int(rep), int(batch))
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def stream_label(seed: int, rep: int, batch: int | None = None) -> str:
    if batch is None:
        return f"{seed}:{rep}"
    return f"{seed}:{rep}:{batch}"
