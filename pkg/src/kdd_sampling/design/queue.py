"""Candidate bookkeeping for the greedy designers: priority queue, ranks and blocking."""

from __future__ import annotations

import heapq

import numpy as np
from numpy.typing import NDArray

from ..const import TieBreak
from ..exceptions import KddValidationError
from ..grid import GridShape, SamplingPattern
from .models import DesignConfig


class CandidateQueue:
    """Min-heap over (ΔJ, tie-break rank) with lazy deletion.

    The queue reads the live ΔJ array. Increasing a candidate's cost pushes
    a fresh entry; entries whose recorded cost no longer matches the array,
    or whose candidate is blocked, are discarded when they reach the top.
    Ranks are unique, so the popped candidate is the global minimum of
    (ΔJ, rank) over unblocked candidates.
    """

    def __init__(self, values: NDArray[np.float64], ranks: NDArray[np.int64]) -> None:
        """Initialize the queue with every candidate.

        Args:
            values: Live ΔJ array of shape ``(T, N)``.
            ranks: Tie-break rank of every candidate, same shape.
        """
        self._values = values
        self._ranks = ranks
        frames, size = values.shape
        self._heap: list[tuple[float, int, int, int]] = [
            (float(values[t, k]), int(ranks[t, k]), t, k)
            for t in range(frames)
            for k in range(size)
        ]
        heapq.heapify(self._heap)

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, frame: int, index: int) -> None:
        """Record the current cost of candidate (index, frame)."""
        heapq.heappush(
            self._heap,
            (float(self._values[frame, index]), int(self._ranks[frame, index]), frame, index),
        )

    def push_many(self, frames: NDArray[np.int64], indices: NDArray[np.int64]) -> None:
        """Record the current costs of several candidates."""
        for frame, index in zip(frames.tolist(), indices.tolist(), strict=True):
            self.push(frame, index)

    def pop(self, blocked: NDArray[np.bool_]) -> tuple[int, int]:
        """Remove and return the cheapest unblocked candidate as (frame, index).

        Raises:
            KddValidationError: If no unblocked candidate remains.
        """
        while self._heap:
            value, _, frame, index = heapq.heappop(self._heap)
            if blocked[frame, index] or value != self._values[frame, index]:
                continue
            return frame, index
        raise KddValidationError("No eligible sample candidates remain")


def candidate_ranks(grid: GridShape, config: DesignConfig) -> NDArray[np.int64]:
    """Tie-break rank of every candidate, shape ``(T, N)``.

    Lexicographic ranks order candidates by (k, t) with k row-major.
    """
    count = grid.size * grid.frames
    if config.tie_break is TieBreak.RANDOM:
        order = np.random.default_rng(config.seed).permutation(count)
    else:
        order = np.arange(count)
    return order.reshape(grid.size, grid.frames).T.astype(np.int64)


def check_capacity(grid: GridShape, config: DesignConfig) -> None:
    """Reject configurations the grid cannot satisfy.

    Raises:
        KddValidationError: If the quota count does not match the frames, or
            the request needs more distinct candidates than exist.
    """
    if config.quotas is not None and len(config.quotas) != grid.frames:
        raise KddValidationError(f"Got {len(config.quotas)} quotas for {grid.frames} frame(s)")
    if config.allow_repeats:
        return
    if config.total > grid.size * grid.frames:
        raise KddValidationError(
            f"{config.total} samples exceed the {grid.size * grid.frames} candidates "
            "available without repeats"
        )
    if config.quotas is not None and max(config.quotas, default=0) > grid.size:
        raise KddValidationError("A frame quota exceeds the grid size without repeats")


def initial_blocked(grid: GridShape, config: DesignConfig) -> NDArray[np.bool_]:
    """Blocked-candidate mask before the first insertion; zero-quota frames are blocked."""
    blocked = np.zeros((grid.frames, grid.size), dtype=bool)
    if config.quotas is not None:
        for t, quota in enumerate(config.quotas):
            blocked[t] = quota == 0
    return blocked


def block_after_insert(
    blocked: NDArray[np.bool_],
    pattern: SamplingPattern,
    config: DesignConfig,
    frame: int,
    index: int,
) -> None:
    """Update ``blocked`` after a sample was inserted at (index, frame)."""
    if config.quotas is not None and pattern.totals[frame] >= config.quotas[frame]:
        blocked[frame] = True
    if not config.allow_repeats:
        blocked[frame, index] = True
