"""Reproducible counter-based random streams.

All randomness flows through numpy's Philox engine (counter based, 64-bit
seedable).  Work is split into fixed-size batches; batch ``i`` of a run keyed
by ``seed`` always draws from ``SeedSequence(seed, spawn_key=(stream, i))``,
so results are independent of thread count and identical across reruns.
"""

import os

import numpy as np

ENV_SEED = "WEYLSIM_SEED"


def default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_SEED} must be an integer, got {raw!r}") from exc


def stream(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for the sub-stream identified by ``key``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def batch_sizes(total: int, batch: int) -> list[int]:
    """Deterministic batch layout: fixed batch size, short tail last."""
    if total <= 0:
        return []
    full, rem = divmod(total, batch)
    out = [batch] * full
    if rem:
        out.append(rem)
    return out
