"""Tree-based pseudo-LRU."""
from __future__ import annotations


class PlruSet:
    """Binary tree in heap layout: node 1 is the root, leaves follow at ``assoc``.

    A bit of 0 points to the left child, 1 to the right child. An empty way
    is filled before any line is evicted; among several empty ways the one
    the tree would evict first is chosen.
    """

    __slots__ = ("assoc", "tags", "bits")

    def __init__(self, assoc: int):
        if assoc < 1 or assoc & (assoc - 1):
            raise ValueError(f"PLRU needs a power-of-two associativity, got {assoc}")
        self.assoc = assoc
        self.reset()

    def reset(self):
        self.tags = [None] * self.assoc
        self.bits = [0] * self.assoc  # index 0 unused

    def __contains__(self, tag):
        return tag in self.tags

    def contents(self):
        return list(self.tags)

    def flush(self, tag):
        if tag in self.tags:
            self.tags[self.tags.index(tag)] = None

    def victim(self, bits=None) -> int:
        bits = self.bits if bits is None else bits
        node = 1
        while node < self.assoc:
            node = 2 * node + bits[node]
        return node - self.assoc

    def touch(self, way: int, bits=None):
        bits = self.bits if bits is None else bits
        node = way + self.assoc
        while node > 1:
            parent = node >> 1
            # point away from the child we came from
            bits[parent] = 0 if node & 1 else 1
            node = parent

    def eviction_order(self) -> list:
        """Ways in the order repeated misses would replace them."""
        bits = list(self.bits)
        order = []
        for _ in range(self.assoc):
            way = self.victim(bits)
            order.append(way)
            self.touch(way, bits)
        return order

    def access(self, tag, rng=None) -> bool:
        tags = self.tags
        if tag in tags:
            self.touch(tags.index(tag))
            return True
        if None in tags:
            way = next(w for w in self.eviction_order() if tags[w] is None)
        else:
            way = self.victim()
        tags[way] = tag
        self.touch(way)
        return False
