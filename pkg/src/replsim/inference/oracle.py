"""Hit/miss oracles the characterization procedures run against."""
from __future__ import annotations

import random
from typing import Protocol, Sequence, runtime_checkable

from ..cache import CacheGeometry, CacheSimulator
from ..policies import AdaptiveSpec, PolicySpec, is_deterministic, make_set
from ..seqlang import Access, AccessSeq, Flush, MeasuredCounts, Token, run_on


@runtime_checkable
class SeqOracle(Protocol):
    """Anything that can run an access sequence and count measured hits.

    State carries over between calls, as it would on hardware; sequences
    that need a clean start begin with ``<wbinvd>``.
    """

    assoc: int
    sets: Sequence[int]

    def evaluate(self, seq: AccessSeq) -> MeasuredCounts: ...


class SimOracle:
    """Oracle backed by a persistent :class:`CacheSimulator`."""

    def __init__(self, policy: PolicySpec, geometry: CacheGeometry, seed: int = 0):
        self.policy = policy
        self.geometry = geometry
        self.assoc = geometry.assoc
        self.sets = range(geometry.num_sets)
        self.deterministic = is_deterministic(policy)
        self.sim = CacheSimulator(geometry, policy, seed)
        self._rng = random.Random(seed)
        self.queries = 0

    def evaluate(self, seq: AccessSeq) -> MeasuredCounts:
        self.queries += 1
        return run_on(self.sim, seq)

    def survival_curves(self, tokens: Sequence[Token], blocks: Sequence[str],
                        fresh: Sequence[str], trials: int):
        """Hit counts per block after the sequence plus 0..len(fresh) fresh blocks.

        Each trial replays the sequence once in an isolated set and checks,
        after every fresh access, which blocks are still cached. Checking a
        block's presence gives the same outcome as accessing it, so every
        cell has the same distribution as a separate measured run; only
        cells within one trial are correlated.

        Returns ``{block: [hits for n = 0..len(fresh)]}`` or ``None`` when
        the policy couples sets and isolated replay would be wrong.
        """
        if isinstance(self.policy, AdaptiveSpec):
            return None
        counts = {b: [0] * (len(fresh) + 1) for b in blocks}
        for _ in range(trials):
            state = make_set(self.policy, self.assoc)
            rng = random.Random(self._rng.getrandbits(64))
            for tok in tokens:
                if isinstance(tok, Access):
                    state.access(tok.name, rng)
                elif isinstance(tok, Flush):
                    state.flush(tok.name)
                else:
                    state.reset()
            for n in range(len(fresh) + 1):
                if n:
                    state.access(fresh[n - 1], rng)
                for b in blocks:
                    if b in state:
                        counts[b][n] += 1
        return counts
