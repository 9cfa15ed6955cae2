"""Quad-age LRU: two age bits per line, parameterized by H/M/R/U/UMO."""
from __future__ import annotations

from ..errors import PolicyStateError
from .spec import QlruConfig


def qlru_hit_age(cfg: QlruConfig, age: int) -> int:
    if age == 3:
        return cfg.hit_x
    if age == 2:
        return cfg.hit_y
    return 0


def qlru_insertion_age(cfg: QlruConfig, rng) -> int:
    if cfg.insert_p is None:
        return cfg.insert_age
    if rng is None:
        raise ValueError("probabilistic insertion needs a random generator")
    if rng.randrange(cfg.insert_p) == 0:
        return cfg.insert_age
    return 3


class QlruSet:
    """Ages and tags of one cache set; slot 0 is the leftmost location.

    ``access`` takes an optional config so that a follower set under set
    dueling can switch variants while keeping its ages.
    """

    __slots__ = ("cfg", "assoc", "tags", "ages")

    def __init__(self, cfg: QlruConfig, assoc: int):
        self.cfg = cfg
        self.assoc = assoc
        self.reset()

    def reset(self):
        self.tags = [None] * self.assoc
        self.ages = [3] * self.assoc

    def __contains__(self, tag):
        return tag in self.tags

    def contents(self):
        return list(self.tags)

    def flush(self, tag):
        try:
            i = self.tags.index(tag)
        except ValueError:
            return
        self.tags[i] = None
        self.ages[i] = 3

    def access(self, tag, rng=None, cfg: QlruConfig | None = None) -> bool:
        cfg = cfg or self.cfg
        tags, ages = self.tags, self.ages
        if tag in tags:
            i = tags.index(tag)
            ages[i] = qlru_hit_age(cfg, ages[i])
            if not cfg.umo:
                self._normalize(cfg, i)
            return True

        full = None not in tags
        if full:
            if cfg.umo:
                self._normalize(cfg, None)
            try:
                i = ages.index(3)
            except ValueError:
                if cfg.replace != 1:
                    raise PolicyStateError(
                        f"R{cfg.replace} miss on a full set without an age-3 line (ages {ages})"
                    ) from None
                i = 0
        elif cfg.replace == 2:
            i = self.assoc - 1 - tags[::-1].index(None)
        else:
            i = tags.index(None)
        tags[i] = tag
        ages[i] = qlru_insertion_age(cfg, rng)
        if not cfg.umo:
            self._normalize(cfg, i)
        return False

    def _normalize(self, cfg: QlruConfig, accessed):
        # Only full sets are normalized: partially filled sets keep their ages.
        ages = self.ages
        if 3 in ages or None in self.tags:
            return
        if cfg.update in (1, 3) and accessed is not None:
            others = [j for j in range(self.assoc) if j != accessed]
        else:
            others = range(self.assoc)
        if not others:
            return
        if cfg.update in (0, 1):
            delta = 3 - max(ages[j] for j in others)
            for j in others:
                ages[j] += delta
        else:
            for j in others:
                if ages[j] < 3:
                    ages[j] += 1
