"""Sampler output containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import BudgetCounter


class BudgetExceeded(RuntimeError):
    """A fixed-tolerance rejection loop hit its attempt cap."""


@dataclass
class ChainOutput:
    """Draws from a sampler.

    Attributes
    ----------
    samples : ndarray, shape (N, dim)
        One parameter vector per row.
    distances : ndarray, shape (N, n_blocks)
        Accepted distance of each block update (NaN for exact updates).
        Single-block samplers store one column.
    budget : BudgetCounter
    attempts : ndarray of int, shape (n_blocks,)
        Simulations spent per block.
    block_names : list of str
    block_slices : list of slice
    accepted : ndarray of bool or None
        Per-step acceptance flags for samplers with a retention branch.
    """

    samples: np.ndarray
    distances: np.ndarray
    budget: BudgetCounter
    attempts: np.ndarray
    block_names: list
    block_slices: list
    accepted: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def block(self, name: str) -> np.ndarray:
        sl = self.block_slices[self.block_names.index(name)]
        out = self.samples[:, sl]
        return out[:, 0] if out.shape[1] == 1 else out

    def drop(self, burn_in: int) -> ChainOutput:
        """Copy without the first ``burn_in`` rows (budget unchanged)."""
        return ChainOutput(
            self.samples[burn_in:],
            self.distances[burn_in:],
            self.budget,
            self.attempts,
            self.block_names,
            self.block_slices,
            None if self.accepted is None else self.accepted[burn_in:],
            dict(self.meta),
        )

    def __len__(self) -> int:
        return self.samples.shape[0]
