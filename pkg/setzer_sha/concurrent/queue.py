import asyncio
import concurrent.futures
import typing

T = typing.TypeVar("T")


class OrderedPipeline(typing.Generic[T]):
    """
    Runs jobs on an executor with at most window in flight, handing results
    to the consumer in submission order. The first failure cancels the rest
    and is raised from run().
    """

    def __init__(self, executor: concurrent.futures.Executor, window: int):
        if window < 1:
            raise ValueError(f"Window must be positive, got {window}")
        self._executor = executor
        self._window = window

    async def run(
        self,
        jobs: typing.Iterable[typing.Callable[[], T]],
        consume: typing.Callable[[T], typing.Awaitable[None]],
    ):
        loop = asyncio.get_running_loop()
        slots = asyncio.Semaphore(self._window)
        pending: asyncio.Queue = asyncio.Queue()

        async def produce():
            for job in jobs:
                await slots.acquire()
                await pending.put(loop.run_in_executor(self._executor, job))
            await pending.put(None)

        async def drain():
            while (future := await pending.get()) is not None:
                result = await future
                slots.release()
                await consume(result)

        tasks = [asyncio.ensure_future(produce()), asyncio.ensure_future(drain())]
        try:
            await asyncio.gather(*tasks)
        except BaseException:
            for task in tasks:
                task.cancel()
            while not pending.empty():
                future = pending.get_nowait()
                if future is not None:
                    future.cancel()
            raise
