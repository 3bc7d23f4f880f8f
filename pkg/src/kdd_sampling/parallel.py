"""Worker-count resolution and an order-preserving thread-pool map."""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .const import THREADS_ENV
from .exceptions import KddValidationError

_LOGGER = logging.getLogger(__name__)

_T = TypeVar("_T")
_R = TypeVar("_R")


def resolve_workers(requested: int | None = None) -> int:
    """Return the number of worker threads to use.

    The ``KDD_THREADS`` environment variable caps the result; without it the
    CPU count is used.

    Args:
        requested: Explicit worker count, or None for the default.

    Returns:
        A positive worker count.

    Raises:
        KddValidationError: If the request or the environment value is not a
            positive integer.
    """
    if requested is not None and requested < 1:
        raise KddValidationError(f"Worker count must be positive, got {requested}")

    limit = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            cap = int(raw)
        except ValueError as err:
            raise KddValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from err
        if cap < 1:
            raise KddValidationError(f"{THREADS_ENV} must be positive, got {cap}")
        limit = cap

    workers = min(requested, limit) if requested is not None else limit
    _LOGGER.debug("Using %d worker thread(s)", workers)
    return workers


def ordered_map(
    func: Callable[[_T], _R],
    items: Iterable[_T],
    workers: int | None = None,
) -> list[_R]:
    """Apply ``func`` to every item, returning results in input order.

    Results come back in submission order whatever the worker count, so any
    reduction over them is deterministic.

    Args:
        func: Job to run.
        items: Job inputs.
        workers: Requested worker count (capped by ``KDD_THREADS``).

    Returns:
        The job results in input order.
    """
    jobs = list(items)
    count = min(resolve_workers(workers), max(len(jobs), 1))
    if count == 1:
        return [func(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, jobs))
