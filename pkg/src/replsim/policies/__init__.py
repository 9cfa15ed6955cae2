"""Replacement policies as per-set state machines."""
from __future__ import annotations

from .adaptive import DuelingController
from .mru import MruSet
from .naming import format_policy_name, format_set_list, parse_policy_name, parse_set_list
from .permutation import (
    LRU3PLRU4,
    FifoSet,
    LruSet,
    PermutationSet,
    fifo_vectors,
    lru_vectors,
)
from .plru import PlruSet
from .qlru import QlruSet, qlru_hit_age, qlru_insertion_age
from .spec import (
    AdaptiveSpec,
    Basic,
    PermutationSpec,
    PolicySpec,
    QlruConfig,
    is_deterministic,
    validate_policy,
    validate_qlru_config,
)


def make_set(spec: PolicySpec, assoc: int):
    """Fresh (empty) per-set state for a non-adaptive policy."""
    validate_policy(spec, assoc)
    if isinstance(spec, QlruConfig):
        return QlruSet(spec, assoc)
    if isinstance(spec, PermutationSpec):
        return PermutationSet(spec)
    if isinstance(spec, AdaptiveSpec):
        raise TypeError("adaptive policies span several sets; use CacheSimulator")
    if spec is Basic.LRU:
        return LruSet(assoc)
    if spec is Basic.FIFO:
        return FifoSet(assoc)
    if spec is Basic.PLRU:
        return PlruSet(assoc)
    if spec is Basic.LRU3PLRU4:
        return PermutationSet(LRU3PLRU4)
    return MruSet(spec.value, assoc)


def qlru_variants(assoc: int | None = None, umo: bool = True, fully_defined: bool = True):
    """All deterministic QLRU variants.

    With ``fully_defined`` the R2/U2 and R2/U3 combinations are left out:
    a single aging step does not always produce an age-3 line, and R2 has no
    fallback for that case.
    """
    out = []
    for hx in (0, 1, 2):
        for hy in (0, 1):
            for m in (0, 1, 2, 3):
                for r in (0, 1, 2):
                    for u in (0, 1, 2, 3):
                        if u >= 2 and r == 0:
                            continue
                        if fully_defined and u >= 2 and r == 2:
                            continue
                        for flag in ((False, True) if umo else (False,)):
                            out.append(QlruConfig(hx, hy, m, r, u, flag))
    return out


def zoo(assoc: int, fully_defined: bool = True):
    """Deterministic candidate policies that are valid for ``assoc`` ways."""
    out = []
    for b in Basic:
        try:
            validate_policy(b, assoc)
        except ValueError:
            continue
        out.append(b)
    return out + qlru_variants(assoc, fully_defined=fully_defined)


__all__ = [
    "AdaptiveSpec",
    "Basic",
    "DuelingController",
    "FifoSet",
    "LRU3PLRU4",
    "LruSet",
    "MruSet",
    "PermutationSet",
    "PermutationSpec",
    "PlruSet",
    "PolicySpec",
    "QlruConfig",
    "QlruSet",
    "fifo_vectors",
    "format_policy_name",
    "format_set_list",
    "is_deterministic",
    "lru_vectors",
    "make_set",
    "parse_policy_name",
    "parse_set_list",
    "qlru_hit_age",
    "qlru_insertion_age",
    "qlru_variants",
    "validate_policy",
    "validate_qlru_config",
    "zoo",
]
