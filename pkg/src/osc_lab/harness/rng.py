"""Seeded, portable random inputs.

Per-sample seeds come from ``SeedSequence([master, index])`` and drive a
counter-based Philox stream, so a sample is the same whether it runs
serially or in a worker process.
"""

from __future__ import annotations

import zlib

import numpy as np

from ..steps import UNIT, StepFunction

_MASK64 = (1 << 64) - 1
MIN_LENGTH = 1e-9


def sample_seed(master: int, index: int) -> int:
    ss = np.random.SeedSequence([int(master) & _MASK64, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int, stream: str = "") -> np.random.Generator:
    """Philox generator for ``seed``; ``stream`` names an independent substream."""
    key = [int(seed) & _MASK64]
    if stream:
        key.append(zlib.crc32(stream.encode()))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def random_step(rng: np.random.Generator, k_max: int = 8,
                value_range=(-3.0, 3.0)) -> StepFunction:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    lo, hi = value_range
    k = int(rng.integers(1, k_max + 1))
    while True:
        lengths = rng.dirichlet(np.ones(k))
        if lengths.min() >= MIN_LENGTH:
            break
    lengths[-1] = 1.0 - lengths[:-1].sum()
    values = rng.uniform(lo, hi, k)
    return StepFunction(UNIT, lengths, values)


def gen_random_step(seed: int, k_max: int = 8, value_range=(-3.0, 3.0)) -> StepFunction:
    """Random step function on ``[0, 1]`` fully determined by ``seed``.

    ``k`` is uniform on ``1..k_max``, lengths are a flat Dirichlet draw
    (redrawn in the rare case a piece is shorter than ``1e-9``) and values are
    uniform on ``value_range``.
    """
    return random_step(make_rng(seed), k_max, value_range)
