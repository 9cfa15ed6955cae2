"""Inference of permutation vectors by eviction-order probing."""
from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence

from ..errors import InconsistentOracle, NotPermutation, ValidationError
from ..policies import PermutationSpec
from ..policies.spec import validate_permutation
from ..seqlang import WBINVD, Access, AccessSeq, count_hits, format_sequence
from .randseq import gen_random_sequence


class _Prober:
    def __init__(self, oracle, assoc: int, set_index: int, repetitions: int):
        self.oracle = oracle
        self.assoc = assoc
        self.set_index = set_index
        self.repetitions = repetitions
        self.base = [f"P{i}" for i in range(assoc)]
        self.fresh = [f"F{i}" for i in range(assoc)]

    def _hits(self, trigger: Sequence[str], k: int, block: str) -> bool:
        main = [WBINVD] + [Access(b) for b in self.base] + [Access(t) for t in trigger]
        main += [Access(f) for f in self.fresh[:k]] + [Access(block, measured=True)]
        seq = AccessSeq(main=tuple(main), target_sets=(self.set_index,))
        answers = {self.oracle.evaluate(seq).hits for _ in range(self.repetitions)}
        if len(answers) != 1:
            raise InconsistentOracle(
                f"repeated probe disagrees (trigger {list(trigger)}, {k} fresh, block {block})"
            )
        return answers.pop() == 1

    def eviction_times(self, trigger: Sequence[str], blocks: Sequence[str]) -> Dict[str, int]:
        """Number of fresh accesses after which each block first misses (0 = already gone)."""
        times = {}
        for b in blocks:
            pattern = [self._hits(trigger, k, b) for k in range(self.assoc + 1)]
            if True not in pattern[1:] and not pattern[0]:
                times[b] = 0
                continue
            first_miss = pattern.index(False) if False in pattern else None
            if first_miss is None:
                raise NotPermutation(f"block {b} survives {self.assoc} fresh accesses")
            if any(pattern[first_miss:]):
                raise NotPermutation(f"block {b} reappears after being evicted")
            times[b] = first_miss
        return times

    def order(self, trigger: Sequence[str], blocks: Sequence[str], evicted: Optional[str] = None) -> List[str]:
        """Blocks by policy position (index ``A-1`` = next victim)."""
        times = self.eviction_times(trigger, blocks)
        gone = [b for b, t in times.items() if t == 0]
        if gone != ([evicted] if evicted else []):
            raise NotPermutation(f"unexpected evictions {gone} (expected {evicted})")
        order: List[Optional[str]] = [None] * self.assoc
        for b, t in times.items():
            if t == 0:
                continue
            pos = self.assoc - t
            if order[pos] is not None:
                raise NotPermutation(f"blocks {order[pos]} and {b} share eviction rank {t}")
            order[pos] = b
        return order


def infer_permutation_policy(oracle, assoc: Optional[int] = None, set_index: Optional[int] = None,
                             repetitions: int = 2, verify: int = 100, seed: int = 0) -> PermutationSpec:
    """Recover the hit and miss permutation vectors of one cache set.

    Every probe is a fresh run: ``<wbinvd>``, A blocks to reach a full set,
    the triggering access, k fresh blocks and finally one measured block.
    Each probe is issued ``repetitions`` times; disagreement raises
    :class:`InconsistentOracle`. Results that no permutation policy can
    produce raise :class:`NotPermutation`, as does a mismatch between the
    oracle and the recovered vectors on ``verify`` random sequences.
    """
    assoc = assoc or oracle.assoc
    set_index = oracle.sets[0] if set_index is None else set_index
    prober = _Prober(oracle, assoc, set_index, repetitions)
    canonical = prober.order([], prober.base)
    position = {b: i for i, b in enumerate(canonical)}

    hits = []
    for i in range(assoc):
        new = prober.order([canonical[i]], prober.base)
        hits.append(tuple(position[b] for b in new))

    new = prober.order(["X"], prober.base + ["X"], evicted=canonical[-1])
    position["X"] = assoc - 1
    miss = tuple(position[b] for b in new)
    spec = PermutationSpec(hits=tuple(hits), miss=miss)
    try:
        validate_permutation(spec)
    except ValidationError as exc:
        raise NotPermutation(f"recovered vectors are not permutations: {exc}") from None
    rng = random.Random(seed)
    for _ in range(verify):
        tokens = gen_random_sequence(4 * assoc, 0.4, rng)
        observed = oracle.evaluate(AccessSeq(main=tokens, target_sets=(set_index,))).hits
        if observed != count_hits(spec, assoc, tokens):
            raise NotPermutation(f"recovered vectors mispredict {format_sequence(tokens)}")
    return spec
