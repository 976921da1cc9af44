"""Ordered parallel map over independent units of work."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable, Iterator, List, Optional

from logging_config import configure_worker_logging, get_log_language, register_log_translations

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Worker pool started with %d processes": {
            "ru": "Пул воркеров запущен: %d процессов",
        },
    }
)


class WorkerPool:
    """``map`` with results in submission order, so aggregation never depends on scheduling.

    With one job everything runs in-process through the builtin ``map``.
    """

    def __init__(self, jobs: int = 1, *, worker_log_level: str | int = logging.WARNING) -> None:
        self.jobs = max(int(jobs), 1)
        self._worker_log_level = worker_log_level
        self._executor: Optional[ProcessPoolExecutor] = None

    def __enter__(self) -> "WorkerPool":
        if self.jobs > 1:
            self._executor = ProcessPoolExecutor(
                max_workers=self.jobs,
                initializer=configure_worker_logging,
                initargs=(self._worker_log_level, get_log_language()),
            )
            logger.info("Worker pool started with %d processes", self.jobs)
        return self

    def __exit__(self, *exc_info: Any) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    def map(self, fn: Callable[..., Any], *iterables: Iterable[Any]) -> Iterator[Any]:
        if self._executor is None:
            return map(fn, *iterables)
        return self._executor.map(fn, *iterables)

    def run(self, fn: Callable[..., Any], items: Iterable[Any]) -> List[Any]:
        return list(self.map(fn, items))
