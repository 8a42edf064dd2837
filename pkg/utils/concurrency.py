import asyncio
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Generic, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

P = TypeVar("P")
R = TypeVar("R")


@dataclass(frozen=True)
class SweepResult(Generic[P, R]):
    """One evaluated sweep point"""

    parameter: P
    value: R


class SweepScheduler:
    """Evaluates independent sweep points concurrently with a cap on points in flight"""

    def __init__(self, max_concurrent: int = 4):
        """
        Initialize scheduler

        Args:
            max_concurrent: Maximum number of points evaluated at once
        """
        if max_concurrent < 1:
            raise ValueError("max_concurrent must be at least 1")
        self.max_concurrent = max_concurrent

        self.in_flight = 0
        self.peak_in_flight = 0
        self.completed = 0
        self.concurrent_lock = asyncio.Lock()
        self._slots: Optional[asyncio.Semaphore] = None

    async def acquire(self):
        """Waits for a free slot and counts the point as in flight"""
        if self._slots is None:
            self._slots = asyncio.Semaphore(self.max_concurrent)
        await self._slots.acquire()
        async with self.concurrent_lock:
            self.in_flight += 1
            self.peak_in_flight = max(self.peak_in_flight, self.in_flight)

    async def release(self):
        """Releases a slot"""
        async with self.concurrent_lock:
            if self.in_flight > 0:
                self.in_flight -= 1
            self.completed += 1
        if self._slots is not None:
            self._slots.release()

    async def _evaluate(self, func: Callable[[P], R], parameter: P) -> SweepResult[P, R]:
        await self.acquire()
        try:
            value = await asyncio.get_running_loop().run_in_executor(None, func, parameter)
            return SweepResult(parameter, value)
        finally:
            await self.release()

    async def run(self, func: Callable[[P], R], parameters: Sequence[P]) -> List[SweepResult[P, R]]:
        """
        Evaluates func at every parameter

        Args:
            func: Pure function of one sweep parameter
            parameters: Parameter values in any order

        Returns:
            Results ordered by parameter value, whatever order they completed in

        Raises:
            The first exception raised by any point
        """
        tasks = [self._evaluate(func, p) for p in parameters]
        results = await asyncio.gather(*tasks)
        logger.debug("sweep of %d points done, peak concurrency %d", len(results), self.peak_in_flight)
        return sorted(results, key=lambda r: r.parameter)

    def get_stats(self) -> Dict[str, Any]:
        """
        Gets scheduler statistics

        Returns:
            Dict with the current load of the scheduler
        """
        return {
            'in_flight': self.in_flight,
            'peak_in_flight': self.peak_in_flight,
            'completed': self.completed,
            'max_concurrent': self.max_concurrent,
        }


def run_sweep(func: Callable[[P], R], parameters: Sequence[P], max_concurrent: int = 4) -> List[SweepResult[P, R]]:
    """Synchronous entry point for callers outside an event loop"""
    return asyncio.run(SweepScheduler(max_concurrent).run(func, parameters))
