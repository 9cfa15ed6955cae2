"""Cache geometry and the simulator shell that routes block accesses to sets."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .errors import ValidationError
from .policies import AdaptiveSpec, DuelingController, PolicySpec, QlruSet, make_set, validate_policy


class Outcome(enum.Enum):
    HIT = "hit"
    MISS = "miss"


@dataclass(frozen=True)
class CacheGeometry:
    num_sets: int
    assoc: int
    line_size: int = 64
    name: str = ""

    def __post_init__(self):
        if self.num_sets < 1:
            raise ValidationError(f"number of sets must be positive, got {self.num_sets}")
        if self.assoc < 1:
            raise ValidationError(f"associativity must be positive, got {self.assoc}")
        if self.line_size < 1 or self.line_size & (self.line_size - 1):
            raise ValidationError(f"line size must be a power of two, got {self.line_size}")


@dataclass(frozen=True)
class BlockId:
    tag: str
    set_index: int = 0


def set_rng(seed: int, set_index: int) -> random.Random:
    """Per-set generator derived from the simulator seed."""
    return random.Random(f"{seed}/{set_index}")


class CacheSimulator:
    """Single-level set-associative cache with one policy spec.

    Randomness is drawn from per-set generators derived from ``seed``, so a
    set's outcomes do not depend on how accesses to other sets are
    interleaved. Set state is created lazily on first use.
    """

    def __init__(self, geometry: CacheGeometry, policy: PolicySpec, seed: int = 0):
        self.geometry = geometry
        self.policy = policy
        self.seed = seed
        if isinstance(policy, AdaptiveSpec):
            validate_policy(policy)
            bad = [s for s in policy.leaders_a + policy.leaders_b if not 0 <= s < geometry.num_sets]
            if bad:
                raise ValidationError(f"leader sets outside the cache: {bad[:8]}")
            self.dueling = DuelingController(policy)
        else:
            validate_policy(policy, geometry.assoc)
            self.dueling = None
        self._sets = {}
        self._rngs = {}

    def _state(self, set_index: int):
        state = self._sets.get(set_index)
        if state is None:
            if not 0 <= set_index < self.geometry.num_sets:
                raise ValidationError(
                    f"set index {set_index} outside 0..{self.geometry.num_sets - 1}"
                )
            if self.dueling is not None:
                state = QlruSet(self.dueling.config_for(set_index), self.geometry.assoc)
            else:
                state = make_set(self.policy, self.geometry.assoc)
            self._sets[set_index] = state
            self._rngs[set_index] = set_rng(self.seed, set_index)
        return state

    def access(self, block: BlockId) -> Outcome:
        return Outcome.HIT if self.access_hit(block.tag, block.set_index) else Outcome.MISS

    def access_hit(self, tag, set_index: int = 0) -> bool:
        state = self._state(set_index)
        rng = self._rngs[set_index]
        if self.dueling is None:
            return state.access(tag, rng)
        hit = state.access(tag, rng, self.dueling.config_for(set_index))
        self.dueling.record(set_index, hit)
        return hit

    def flush_block(self, block: BlockId) -> None:
        self._state(block.set_index).flush(block.tag)

    def wbinvd(self) -> None:
        for state in self._sets.values():
            state.reset()

    def contains(self, block: BlockId) -> bool:
        """Inspect without touching policy state."""
        state = self._sets.get(block.set_index)
        return state is not None and block.tag in state

    def set_contents(self, set_index: int) -> list:
        return self._state(set_index).contents()
