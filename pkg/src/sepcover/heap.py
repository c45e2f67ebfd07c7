"""Binary min-heap over integer ids with arbitrary key reassignment."""

from __future__ import annotations


class IndexedMinHeap:
    """Entries are ordered by ``(key, id)`` so equal keys resolve to the smaller id."""

    __slots__ = ("_heap", "_pos", "_key", "ops")

    def __init__(self, items=()):
        self._key: dict[int, object] = dict(items)
        self._heap = sorted(self._key, key=lambda i: (self._key[i], i))
        self._pos = {i: p for p, i in enumerate(self._heap)}
        self.ops = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, item: int) -> bool:
        return item in self._pos

    def key(self, item: int):
        return self._key[item]

    def peek(self):
        """(key, id) of the minimum, or None when empty."""
        if not self._heap:
            return None
        i = self._heap[0]
        return self._key[i], i

    def push(self, item: int, key) -> None:
        if item in self._pos:
            raise KeyError(f"{item} already in heap")
        self._key[item] = key
        self._heap.append(item)
        self._pos[item] = len(self._heap) - 1
        self._up(len(self._heap) - 1)

    def update(self, item: int, key) -> None:
        old = self._key[item]
        self._key[item] = key
        p = self._pos[item]
        if (key, item) < (old, item):
            self._up(p)
        else:
            self._down(p)

    def pop(self):
        if not self._heap:
            raise IndexError("pop from empty heap")
        top = self.peek()
        last = self._heap.pop()
        del self._pos[top[1]]
        if self._heap:
            self._heap[0] = last
            self._pos[last] = 0
            self._down(0)
        del self._key[top[1]]
        return top

    def _less(self, a: int, b: int) -> bool:
        ka, kb = self._key[a], self._key[b]
        return ka < kb or (ka == kb and a < b)

    def _up(self, p: int) -> None:
        h, pos = self._heap, self._pos
        item = h[p]
        while p > 0:
            self.ops += 1
            q = (p - 1) >> 1
            if not self._less(item, h[q]):
                break
            h[p] = h[q]
            pos[h[p]] = p
            p = q
        h[p] = item
        pos[item] = p

    def _down(self, p: int) -> None:
        h, pos = self._heap, self._pos
        n = len(h)
        item = h[p]
        while True:
            c = 2 * p + 1
            if c >= n:
                break
            self.ops += 1
            if c + 1 < n and self._less(h[c + 1], h[c]):
                c += 1
            if not self._less(h[c], item):
                break
            h[p] = h[c]
            pos[h[p]] = p
            p = c
        h[p] = item
        pos[item] = p

    def check(self) -> bool:
        h = self._heap
        return all(not self._less(h[i], h[(i - 1) >> 1]) for i in range(1, len(h))) and all(
            self._pos[x] == i for i, x in enumerate(h)
        )
