"""Policy descriptions: plain immutable values, no simulation state."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from ..errors import ValidationError


class Basic(enum.Enum):
    """Policies that need no parameters beyond the associativity."""

    FIFO = "FIFO"
    LRU = "LRU"
    PLRU = "PLRU"
    MRU = "MRU"
    MRU_STAR = "MRU*"
    NRU = "NRU"
    LRU3PLRU4 = "LRU3PLRU4"


@dataclass(frozen=True)
class QlruConfig:
    """One QLRU variant.

    ``insert_p`` is ``None`` for a fixed insertion age; otherwise new blocks
    get ``insert_age`` with probability ``1/insert_p`` and age 3 otherwise.
    ``replace`` and ``update`` hold the digit of the R and U fields.
    """

    hit_x: int
    hit_y: int
    insert_age: int
    replace: int
    update: int
    umo: bool = False
    insert_p: Optional[int] = None

    @property
    def deterministic(self) -> bool:
        return self.insert_p is None or self.insert_p == 1


@dataclass(frozen=True)
class PermutationSpec:
    """Permutation policy given by one vector per hit position plus a miss vector.

    For a hit at position ``i`` the new order is ``new[j] = old[hits[i][j]]``.
    Position 0 is the most protected line, position ``A-1`` the next victim.
    """

    hits: Tuple[Tuple[int, ...], ...]
    miss: Tuple[int, ...]

    @property
    def assoc(self) -> int:
        return len(self.hits)


@dataclass(frozen=True)
class AdaptiveSpec:
    """Set dueling between two QLRU variants.

    Misses in sets dedicated to ``policy_a`` increment the selector, misses in
    sets dedicated to ``policy_b`` decrement it. Follower sets use
    ``policy_a`` while the selector is below its midpoint.
    """

    policy_a: QlruConfig
    policy_b: QlruConfig
    leaders_a: Tuple[int, ...]
    leaders_b: Tuple[int, ...]
    psel_bits: int = 10


PolicySpec = Union[Basic, QlruConfig, PermutationSpec, AdaptiveSpec]


def validate_qlru_config(cfg: QlruConfig) -> None:
    if cfg.hit_x not in (0, 1, 2):
        raise ValidationError(f"hit promotion x must be 0, 1 or 2, got {cfg.hit_x}")
    if cfg.hit_y not in (0, 1):
        raise ValidationError(f"hit promotion y must be 0 or 1, got {cfg.hit_y}")
    if cfg.insert_age not in (0, 1, 2, 3):
        raise ValidationError(f"insertion age must be in 0..3, got {cfg.insert_age}")
    if cfg.insert_p is not None and cfg.insert_p < 1:
        raise ValidationError(f"insertion probability divisor must be positive, got {cfg.insert_p}")
    if cfg.replace not in (0, 1, 2):
        raise ValidationError(f"unknown replacement variant R{cfg.replace}")
    if cfg.update not in (0, 1, 2, 3):
        raise ValidationError(f"unknown update variant U{cfg.update}")
    if cfg.replace == 0 and cfg.update in (2, 3):
        raise ValidationError(
            f"R0 cannot be combined with U{cfg.update}: R0 needs a line with age 3 on every miss"
        )


def validate_permutation(spec: PermutationSpec) -> None:
    assoc = spec.assoc
    if assoc < 1:
        raise ValidationError("permutation policy needs at least one position")
    expected = list(range(assoc))
    for i, vec in enumerate(spec.hits + (spec.miss,)):
        if sorted(vec) != expected:
            what = "miss vector" if i == assoc else f"hit vector {i}"
            raise ValidationError(f"{what} is not a permutation of 0..{assoc - 1}: {vec}")


def validate_adaptive(spec: AdaptiveSpec) -> None:
    validate_qlru_config(spec.policy_a)
    validate_qlru_config(spec.policy_b)
    overlap = set(spec.leaders_a) & set(spec.leaders_b)
    if overlap:
        raise ValidationError(f"leader set lists overlap: {sorted(overlap)[:8]}")
    if spec.psel_bits < 1:
        raise ValidationError("selector counter needs at least one bit")


def validate_policy(spec: PolicySpec, assoc: Optional[int] = None) -> None:
    """Check a spec on its own and, if given, against an associativity."""
    if isinstance(spec, QlruConfig):
        validate_qlru_config(spec)
    elif isinstance(spec, PermutationSpec):
        validate_permutation(spec)
        if assoc is not None and assoc != spec.assoc:
            raise ValidationError(f"permutation vectors are for {spec.assoc} ways, cache has {assoc}")
    elif isinstance(spec, AdaptiveSpec):
        validate_adaptive(spec)
    elif isinstance(spec, Basic):
        if assoc is None:
            return
        if spec is Basic.PLRU and assoc & (assoc - 1):
            raise ValidationError(f"PLRU needs a power-of-two associativity, got {assoc}")
        if spec is Basic.LRU3PLRU4 and assoc != 12:
            raise ValidationError(f"LRU3PLRU4 is defined for 12 ways, got {assoc}")
    else:
        raise TypeError(f"not a policy spec: {spec!r}")
    if assoc is not None and assoc < 1:
        raise ValidationError("associativity must be positive")


def is_deterministic(spec: PolicySpec) -> bool:
    if isinstance(spec, QlruConfig):
        return spec.deterministic
    if isinstance(spec, AdaptiveSpec):
        return spec.policy_a.deterministic and spec.policy_b.deterministic
    return True
