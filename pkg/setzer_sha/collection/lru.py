import collections
import threading
import typing

K = typing.TypeVar("K")
V = typing.TypeVar("V")


class LruCache(typing.Generic[K, V]):
    """
    Least-recently-used cache bounded by an estimated byte budget. Safe for
    concurrent lookups; concurrent inserts of the same key are idempotent.
    """

    def __init__(self, budget: int):
        self._budget = budget
        self._entries: typing.OrderedDict[K, typing.Tuple[V, int]] = (
            collections.OrderedDict()
        )
        self._lock = threading.Lock()
        self._size = 0
        self.hits = 0
        self.misses = 0

    def get(self, key: K) -> typing.Optional[V]:
        with self._lock:
            try:
                value, _ = self._entries[key]
            except KeyError:
                self.misses += 1
                return None
            self._entries.move_to_end(key)
            self.hits += 1
            return value

    def put(self, key: K, value: V, size: int):
        """
        Insert value, evicting least recently used entries over budget
        """
        if size > self._budget:
            return
        with self._lock:
            previous = self._entries.pop(key, None)
            if previous is not None:
                self._size -= previous[1]
            self._entries[key] = (value, size)
            self._size += size
            while self._size > self._budget:
                _, (_, evicted) = self._entries.popitem(last=False)
                self._size -= evicted

    def get_or_create(self, key: K, fn: typing.Callable[[], V], size: int) -> V:
        value = self.get(key)
        if value is None:
            value = fn()
            self.put(key, value, size)
        return value

    @property
    def size(self) -> int:
        """
        Estimated bytes held
        """
        return self._size

    def __len__(self):
        return len(self._entries)
