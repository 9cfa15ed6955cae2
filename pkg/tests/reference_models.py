"""Independent reference models used as test oracles."""


class ThreeTreePlru:
    """Twelve ways as three 4-way PLRU trees; the least recently used tree supplies the victim."""

    def __init__(self):
        self.tags = [None] * 12
        self.bits = [[0] * 4 for _ in range(3)]
        self.recency = [0, 1, 2]  # most recent tree first

    @staticmethod
    def _victim(tree, bits):
        node = 1
        while node < 4:
            node = 2 * node + bits[tree][node]
        return tree * 4 + node - 4

    @staticmethod
    def _touch(way, bits, recency):
        tree, node = divmod(way, 4)
        node += 4
        while node > 1:
            parent = node >> 1
            bits[tree][parent] = 0 if node & 1 else 1
            node = parent
        recency.remove(tree)
        recency.insert(0, tree)

    def _eviction_order(self):
        bits = [list(b) for b in self.bits]
        recency = list(self.recency)
        out = []
        for _ in range(12):
            way = self._victim(recency[-1], bits)
            out.append(way)
            self._touch(way, bits, recency)
        return out

    def access(self, tag):
        if tag in self.tags:
            self._touch(self.tags.index(tag), self.bits, self.recency)
            return True
        if None in self.tags:
            way = next(w for w in self._eviction_order() if self.tags[w] is None)
        else:
            way = self._victim(self.recency[-1], self.bits)
        self.tags[way] = tag
        self._touch(way, self.bits, self.recency)
        return False


class ListLru:
    """LRU as an ordered list of tags, most recent last."""

    def __init__(self, assoc):
        self.assoc = assoc
        self.lines = []

    def access(self, tag):
        if tag in self.lines:
            self.lines.remove(tag)
            self.lines.append(tag)
            return True
        if len(self.lines) == self.assoc:
            self.lines.pop(0)
        self.lines.append(tag)
        return False
