import threading
import time

import pytest

from utils.concurrency import SweepResult, SweepScheduler, run_sweep


def slow_square(value):
    time.sleep(0.01 * (5 - value % 5))
    return value * value


class TestSweepScheduler:
    async def test_results_are_ordered_by_parameter(self):
        results = await SweepScheduler(max_concurrent=3).run(slow_square, [4, 1, 3, 0, 2])
        assert [r.parameter for r in results] == [0, 1, 2, 3, 4]
        assert [r.value for r in results] == [0, 1, 4, 9, 16]

    async def test_caps_points_in_flight(self):
        scheduler = SweepScheduler(max_concurrent=2)
        await scheduler.run(slow_square, list(range(8)))
        stats = scheduler.get_stats()
        assert 1 <= stats["peak_in_flight"] <= 2
        assert stats["in_flight"] == 0
        assert stats["completed"] == 8
        assert stats["max_concurrent"] == 2

    async def test_points_run_concurrently(self):
        barrier = threading.Barrier(2, timeout=5.0)

        def meet(value):
            barrier.wait()
            return value

        results = await SweepScheduler(max_concurrent=2).run(meet, [1, 2])
        assert [r.value for r in results] == [1, 2]

    async def test_first_error_propagates(self):
        def fail_on_three(value):
            if value == 3:
                raise ArithmeticError("bad point")
            return value

        scheduler = SweepScheduler(max_concurrent=2)
        with pytest.raises(ArithmeticError):
            await scheduler.run(fail_on_three, [1, 2, 3])

    async def test_empty_sweep(self):
        assert await SweepScheduler().run(slow_square, []) == []

    def test_rejects_zero_slots(self):
        with pytest.raises(ValueError):
            SweepScheduler(max_concurrent=0)


def test_run_sweep_outside_a_loop():
    assert run_sweep(lambda x: x + 0.5, [2.0, 1.0]) == [SweepResult(1.0, 1.5), SweepResult(2.0, 2.5)]
