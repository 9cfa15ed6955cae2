"""One status bit per line: MRU (bit-PLRU), NRU and the MRU* fill variant."""
from __future__ import annotations


class MruSet:
    """Status bits live per way, so empty ways keep a bit too (1 after reset)."""

    __slots__ = ("variant", "assoc", "tags", "bits")

    MRU, MRU_STAR, NRU = "MRU", "MRU*", "NRU"

    def __init__(self, variant: str, assoc: int):
        if variant not in (self.MRU, self.MRU_STAR, self.NRU):
            raise ValueError(f"unknown bit policy {variant!r}")
        self.variant = variant
        self.assoc = assoc
        self.reset()

    def reset(self):
        self.tags = [None] * self.assoc
        self.bits = [1] * self.assoc

    def __contains__(self, tag):
        return tag in self.tags

    def contents(self):
        return list(self.tags)

    def flush(self, tag):
        if tag in self.tags:
            self.tags[self.tags.index(tag)] = None

    def access(self, tag, rng=None) -> bool:
        tags, bits = self.tags, self.bits
        full = None not in tags
        hit = tag in tags
        if hit:
            i = tags.index(tag)
        elif not full:
            i = tags.index(None)
        else:
            if self.variant == self.NRU and 1 not in bits:
                bits[:] = [1] * self.assoc
            i = bits.index(1)
        tags[i] = tag
        if self.variant == self.MRU_STAR and not full:
            # bits stay all ones until the set has been filled
            return hit
        bits[i] = 0
        if self.variant != self.NRU and 1 not in bits:
            bits[:] = [1] * self.assoc
            bits[i] = 0
        return hit
