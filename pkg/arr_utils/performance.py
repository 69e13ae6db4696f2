"""Parallel fan-out and timing statistics for independent computations.

Requires Python 3.10+
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Generator, Sequence, TypeVar

from tqdm import tqdm

from .config import get_jobs, progress_enabled
from .exceptions import reraise_with_context

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class ProcessingStats:
    """Statistics for a batch of independent computations."""

    total_items: int = 0
    processed_items: int = 0
    failed_items: int = 0
    start_time: float = 0.0
    end_time: float = 0.0
    stages: dict[str, float] = field(default_factory=dict)

    @property
    def duration(self) -> float:
        """Total processing duration in seconds."""
        return self.end_time - self.start_time if self.end_time > 0 else 0.0

    @property
    def items_per_second(self) -> float:
        return self.processed_items / self.duration if self.duration > 0 else 0.0

    @property
    def success_rate(self) -> float:
        """Success rate as a percentage."""
        return (
            (self.processed_items / self.total_items * 100)
            if self.total_items > 0
            else 0.0
        )

    @contextmanager
    def stage(self, name: str) -> Generator[None, None, None]:
        """Accumulate wall time spent in a named stage."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = self.stages.get(name, 0.0) + time.perf_counter() - start

    def to_dict(self) -> dict[str, Any]:
        return {
            "total_items": self.total_items,
            "processed_items": self.processed_items,
            "failed_items": self.failed_items,
            "duration": round(self.duration, 4),
            "stages": {k: round(v, 4) for k, v in sorted(self.stages.items())},
        }


def run_parallel(
    items: Sequence[T],
    func: Callable[[T], R],
    max_workers: int | None = None,
    desc: str | None = None,
    show_progress: bool | None = None,
    stats: ProcessingStats | None = None,
) -> list[R]:
    """Apply ``func`` to every item, in a thread pool when more than one worker is allowed.

    Args:
        items: Independent work items
        func: Pure function of one item
        max_workers: Worker cap (defaults to the configured job count)
        desc: Progress bar label; no bar is shown without one
        show_progress: Override the configured progress setting
        stats: Optional statistics object updated in place

    Returns:
        Results in the order of ``items``

    Raises:
        ArrangementError: The first failure, with the failing item in its context
    """
    workers = max_workers or get_jobs()
    show = progress_enabled() if show_progress is None else show_progress
    stats = stats if stats is not None else ProcessingStats()
    stats.total_items += len(items)
    if not stats.start_time:
        stats.start_time = time.time()

    results: list[Any] = [None] * len(items)
    bar = tqdm(total=len(items), desc=desc, disable=not (show and desc), leave=False)
    try:
        if workers <= 1 or len(items) <= 1:
            for i, item in enumerate(items):
                results[i] = _call(func, item, stats)
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                future_to_item = {
                    executor.submit(func, item): i for i, item in enumerate(items)
                }
                for future in as_completed(future_to_item):
                    i = future_to_item[future]
                    try:
                        results[i] = future.result()
                        stats.processed_items += 1
                    except Exception as e:
                        stats.failed_items += 1
                        logger.error(f"Parallel task failed for item {i}: {e}")
                        _reraise(e, items[i])
                    bar.update(1)
    finally:
        bar.close()
        stats.end_time = time.time()

    logger.debug(
        f"Processed {stats.processed_items}/{stats.total_items} items "
        f"in {stats.duration:.2f}s with {workers} worker(s)"
    )
    return results


def _call(func: Callable[[T], R], item: T, stats: ProcessingStats) -> R:
    try:
        result = func(item)
    except Exception as e:
        stats.failed_items += 1
        logger.error(f"Task failed for item {item!r}: {e}")
        _reraise(e, item)
    stats.processed_items += 1
    return result


def _reraise(error: Exception, item: Any) -> None:
    reraise_with_context(error, {"item": repr(item)})
