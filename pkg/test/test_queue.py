import asyncio
import concurrent.futures
import functools
import time

import pytest

from setzer_sha.concurrent.queue import OrderedPipeline


def _slow_square(x: int) -> int:
    time.sleep(0.01 * (5 - x))
    return x * x


def _fail(x: int) -> int:
    if x == 2:
        raise RuntimeError("boom")
    return x


def _collect(fn, values, window):
    results = []

    async def consume(result):
        results.append(result)

    async def main():
        with concurrent.futures.ThreadPoolExecutor(4) as executor:
            pipeline = OrderedPipeline(executor, window)
            await pipeline.run([functools.partial(fn, x) for x in values], consume)

    asyncio.run(main())
    return results


def test_submission_order():
    assert _collect(_slow_square, range(5), 4) == [0, 1, 4, 9, 16]


def test_empty():
    assert _collect(_slow_square, [], 2) == []


def test_failure():
    with pytest.raises(RuntimeError, match="boom"):
        _collect(_fail, range(10), 2)


def test_invalid_window():
    with pytest.raises(ValueError):
        OrderedPipeline(concurrent.futures.ThreadPoolExecutor(1), 0)
