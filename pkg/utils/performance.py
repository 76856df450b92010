"""Timing of the numerical kernels and a small ordered worker pool for sweeps."""

from __future__ import annotations

import functools
import math
import threading
import time
from collections.abc import Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, TypeVar

from utils.logging_setup import get_logger

logger = get_logger('performance')

T = TypeVar('T')
R = TypeVar('R')


@dataclass
class TimingStats:
    """Running aggregate of the durations recorded under one name."""

    count: int = 0
    total: float = 0.0
    shortest: float = math.inf
    longest: float = 0.0

    def add(self, seconds: float) -> None:
        self.count += 1
        self.total += seconds
        self.shortest = min(self.shortest, seconds)
        self.longest = max(self.longest, seconds)

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    def as_dict(self) -> dict[str, float]:
        return {
            'count': self.count,
            'total': self.total,
            'avg': self.mean,
            'min': self.shortest,
            'max': self.longest,
        }


class PerformanceMonitor:
    """Timers and event counters shared by scans running on worker threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._timers: dict[str, TimingStats] = {}
        self._events: dict[str, int] = {}

    @contextmanager
    def timer(self, name: str) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - started
            with self._lock:
                self._timers.setdefault(name, TimingStats()).add(elapsed)
            logger.debug(f"{name} took {elapsed:.4f}s")

    def increment_counter(self, name: str, amount: int = 1) -> None:
        with self._lock:
            self._events[name] = self._events.get(name, 0) + amount

    def get_stats(self) -> dict[str, dict[str, Any]]:
        """Timer aggregates and counters keyed by name; counters only carry 'count'."""
        with self._lock:
            stats: dict[str, dict[str, Any]] = {k: v.as_dict() for k, v in self._timers.items()}
            stats.update({k: {'count': n} for k, n in self._events.items()})
        return stats

    def reset(self) -> None:
        with self._lock:
            self._timers.clear()
            self._events.clear()

    def log_stats(self) -> None:
        """One INFO line per timer, slowest first, then the counters."""
        with self._lock:
            timers = sorted(self._timers.items(), key=lambda kv: kv[1].total, reverse=True)
            events = sorted(self._events.items())
        if not timers and not events:
            logger.info("No timings recorded")
            return
        for name, t in timers:
            logger.info(f"{name}: {t.count} calls, {t.total:.4f}s total, {t.mean:.4f}s mean")
        for name, n in events:
            logger.info(f"{name}: {n}")


_performance_monitor = PerformanceMonitor()


def get_performance_monitor() -> PerformanceMonitor:
    return _performance_monitor


def monitor_performance(name: str):
    """Decorator recording every call of a function under ``name``."""

    def decorate(func: Callable[..., R]) -> Callable[..., R]:
        @functools.wraps(func)
        def timed(*args, **kwargs):
            with _performance_monitor.timer(name):
                return func(*args, **kwargs)

        return timed

    return decorate


def increment_counter(name: str, amount: int = 1) -> None:
    _performance_monitor.increment_counter(name, amount)


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``func`` to every item, returning results in input order.

    With workers <= 1 the items are processed serially. Otherwise a thread pool is used;
    numpy releases the GIL inside its kernels so sweeps over N do overlap. Each item must
    carry its own seed so the result does not depend on scheduling.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Running {len(items)} tasks on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
