"""Permutation policies, plus direct LRU and FIFO models."""
from __future__ import annotations

from .spec import PermutationSpec

# Ice Lake L1: three 4-way PLRU trees ordered by recency.
LRU3PLRU4_HITS = (
    (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11),
    (1, 0, 2, 4, 3, 5, 7, 6, 8, 10, 9, 11),
    (2, 0, 1, 5, 3, 4, 8, 6, 7, 11, 9, 10),
    (3, 1, 2, 0, 4, 5, 9, 7, 8, 6, 10, 11),
    (4, 0, 2, 1, 3, 5, 10, 6, 8, 7, 9, 11),
    (5, 0, 1, 2, 3, 4, 11, 6, 7, 8, 9, 10),
    (6, 1, 2, 3, 4, 5, 0, 7, 8, 9, 10, 11),
    (7, 0, 2, 4, 3, 5, 1, 6, 8, 10, 9, 11),
    (8, 0, 1, 5, 3, 4, 2, 6, 7, 11, 9, 10),
    (9, 1, 2, 0, 4, 5, 3, 7, 8, 6, 10, 11),
    (10, 0, 2, 1, 3, 5, 4, 6, 8, 7, 9, 11),
    (11, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10),
)

LRU3PLRU4 = PermutationSpec(hits=LRU3PLRU4_HITS, miss=LRU3PLRU4_HITS[11])


def lru_vectors(assoc: int) -> PermutationSpec:
    hits = tuple((i,) + tuple(j for j in range(assoc) if j != i) for i in range(assoc))
    return PermutationSpec(hits=hits, miss=hits[assoc - 1])


def fifo_vectors(assoc: int) -> PermutationSpec:
    identity = tuple(range(assoc))
    return PermutationSpec(hits=(identity,) * assoc, miss=lru_vectors(assoc).miss)


class PermutationSet:
    """Lines kept in policy order; ``order[A-1]`` is evicted next.

    A miss with empty lines present fills the empty line closest to the
    victim end. Filling position ``i < A-1`` is followed by the hit vector of
    that position, as if the new block had been accessed there.
    """

    __slots__ = ("spec", "assoc", "order")

    def __init__(self, spec: PermutationSpec):
        self.spec = spec
        self.assoc = spec.assoc
        self.reset()

    def reset(self):
        self.order = [None] * self.assoc

    def __contains__(self, tag):
        return tag in self.order

    def contents(self):
        return list(self.order)

    def flush(self, tag):
        if tag in self.order:
            self.order[self.order.index(tag)] = None

    def _apply(self, perm):
        old = self.order
        self.order = [old[k] for k in perm]

    def access(self, tag, rng=None) -> bool:
        order = self.order
        if tag in order:
            self._apply(self.spec.hits[order.index(tag)])
            return True
        last = self.assoc - 1
        pos = last
        if order[last] is not None and None in order:
            pos = last - order[::-1].index(None)
        order[pos] = tag
        self._apply(self.spec.miss if pos == last else self.spec.hits[pos])
        return False


class LruSet:
    """Most recently used first."""

    __slots__ = ("assoc", "stack")

    def __init__(self, assoc: int):
        self.assoc = assoc
        self.reset()

    def reset(self):
        self.stack = []

    def __contains__(self, tag):
        return tag in self.stack

    def contents(self):
        return self.stack + [None] * (self.assoc - len(self.stack))

    def flush(self, tag):
        if tag in self.stack:
            self.stack.remove(tag)

    def access(self, tag, rng=None) -> bool:
        stack = self.stack
        if tag in stack:
            stack.remove(tag)
            stack.insert(0, tag)
            return True
        stack.insert(0, tag)
        if len(stack) > self.assoc:
            stack.pop()
        return False


class FifoSet:
    """Oldest first; hits leave the queue untouched."""

    __slots__ = ("assoc", "queue")

    def __init__(self, assoc: int):
        self.assoc = assoc
        self.reset()

    def reset(self):
        self.queue = []

    def __contains__(self, tag):
        return tag in self.queue

    def contents(self):
        return self.queue + [None] * (self.assoc - len(self.queue))

    def flush(self, tag):
        if tag in self.queue:
            self.queue.remove(tag)

    def access(self, tag, rng=None) -> bool:
        if tag in self.queue:
            return True
        self.queue.append(tag)
        if len(self.queue) > self.assoc:
            self.queue.pop(0)
        return False
