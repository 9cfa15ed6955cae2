"""Set dueling between two QLRU variants."""
from __future__ import annotations

from .spec import AdaptiveSpec, QlruConfig


class DuelingController:
    """Shared selector state for one adaptive cache.

    With leaders for both policies, a miss in an A-leader counts up and a
    miss in a B-leader counts down. When no B-leaders exist the selector is
    driven by the A-leaders alone: misses count up, hits count down.
    The selector survives ``wbinvd``; it is not per-line metadata.
    """

    LEADER_A, LEADER_B, FOLLOWER = "A", "B", "F"

    def __init__(self, spec: AdaptiveSpec):
        self.spec = spec
        self.max_value = (1 << spec.psel_bits) - 1
        self.midpoint = 1 << (spec.psel_bits - 1)
        self.psel = 0
        self._roles = {s: self.LEADER_A for s in spec.leaders_a}
        self._roles.update({s: self.LEADER_B for s in spec.leaders_b})
        self._single_sided = not spec.leaders_b

    def role(self, set_index: int) -> str:
        return self._roles.get(set_index, self.FOLLOWER)

    def config_for(self, set_index: int) -> QlruConfig:
        role = self._roles.get(set_index, self.FOLLOWER)
        if role == self.LEADER_A:
            return self.spec.policy_a
        if role == self.LEADER_B:
            return self.spec.policy_b
        return self.follower_config()

    def follower_config(self) -> QlruConfig:
        return self.spec.policy_a if self.psel < self.midpoint else self.spec.policy_b

    def record(self, set_index: int, hit: bool) -> None:
        role = self._roles.get(set_index)
        if role == self.LEADER_A:
            if not hit:
                self.psel = min(self.psel + 1, self.max_value)
            elif self._single_sided:
                self.psel = max(self.psel - 1, 0)
        elif role == self.LEADER_B and not hit:
            self.psel = max(self.psel - 1, 0)
