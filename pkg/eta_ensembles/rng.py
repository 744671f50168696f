"""Counter-based random streams keyed on (seed, stream_id).

Every Monte Carlo draw gets its own Philox stream, so sample ``i`` of a run
depends only on the run seed and ``i``. This is what makes experiment output
independent of how samples are spread over worker processes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SEED_MASK = (1 << 64) - 1


@dataclass(slots=True, frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    counter: int = 0

    def __post_init__(self) -> None:
        if self.stream_id < 0 or self.counter < 0:
            raise DomainError("stream_id and counter must be non-negative")

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed & SEED_MASK, spawn_key=(self.stream_id,))
        bit_generator = np.random.Philox(sequence)
        if self.counter:
            bit_generator = bit_generator.advance(self.counter)
        return np.random.Generator(bit_generator)

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(seed=self.seed, stream_id=stream_id)

    def skip(self, steps: int) -> "RngStream":
        return RngStream(seed=self.seed, stream_id=self.stream_id, counter=self.counter + steps)
