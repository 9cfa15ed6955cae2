"""Policy identification by comparing hit counts on random sequences."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ..errors import PolicyStateError
from ..policies import PolicySpec, format_policy_name, is_deterministic
from ..seqlang import AccessSeq, Token, count_hits, format_sequence
from .randseq import gen_random_sequence


@dataclass
class Counterexample:
    sequence: str
    expected: Optional[float]
    observed: int


@dataclass
class CandidateResult:
    policy: PolicySpec
    counterexamples: int = 0
    first: Optional[Counterexample] = None

    @property
    def name(self) -> str:
        return format_policy_name(self.policy)


@dataclass
class IdentificationReport:
    n_sequences: int
    results: List[CandidateResult] = field(default_factory=list)

    @property
    def survivors(self) -> List[PolicySpec]:
        return [r.policy for r in self.results if r.counterexamples == 0]

    def by_name(self) -> Dict[str, CandidateResult]:
        return {r.name: r for r in self.results}

    def to_dict(self) -> dict:
        return {
            "n_sequences": self.n_sequences,
            "survivors": [format_policy_name(p) for p in self.survivors],
            "candidates": [
                {
                    "policy": r.name,
                    "counterexamples": r.counterexamples,
                    "first_counterexample": None if r.first is None else {
                        "sequence": r.first.sequence,
                        "expected": r.first.expected,
                        "observed": r.first.observed,
                    },
                }
                for r in self.results
            ],
        }

    def to_text(self) -> str:
        lines = [f"sequences: {self.n_sequences}"]
        width = max((len(r.name) for r in self.results), default=0)
        for r in sorted(self.results, key=lambda r: (r.counterexamples, r.name)):
            lines.append(f"{r.name:<{width}}  counterexamples: {r.counterexamples}")
        survivors = [format_policy_name(p) for p in self.survivors]
        lines.append("survivors: " + (", ".join(survivors) if survivors else "none"))
        return "\n".join(lines)


# (policy, assoc, sequence text) -> hits; the text key hashes once per string
_DETERMINISTIC_CACHE: Dict[tuple, Optional[int]] = {}


def _predict_deterministic(policy, assoc: int, tokens, key: Optional[str] = None) -> Optional[int]:
    cache_key = (policy, assoc, format_sequence(tokens) if key is None else key)
    if cache_key not in _DETERMINISTIC_CACHE:
        try:
            _DETERMINISTIC_CACHE[cache_key] = count_hits(policy, assoc, tokens)
        except PolicyStateError:
            _DETERMINISTIC_CACHE[cache_key] = None
    return _DETERMINISTIC_CACHE[cache_key]


def predict_hits(policy: PolicySpec, assoc: int, tokens: Sequence[Token],
                 trials: int = 64, seed: int = 0) -> Optional[float]:
    """Simulated hits of one sequence; mean over ``trials`` for random policies.

    ``None`` means the candidate reaches an undefined state on this sequence.
    Deterministic predictions are memoized.
    """
    tokens = tuple(tokens)
    if is_deterministic(policy):
        return _predict_deterministic(policy, assoc, tokens)
    rng = random.Random(seed)
    try:
        return sum(count_hits(policy, assoc, tokens, rng) for _ in range(trials)) / trials
    except PolicyStateError:
        return None


def make_sequences(n_seq: int, length: int, seed: int, p_fresh: float = 0.5):
    rng = random.Random(seed)
    return [gen_random_sequence(length, p_fresh, rng) for _ in range(n_seq)]


def identify_policy(oracle, candidates: Sequence[PolicySpec], n_seq: int = 250, length: int = 50,
                    trials_per_seq: int = 64, tolerance: float = 0.5, seed: int = 0,
                    p_fresh: float = 0.5, set_index: Optional[int] = None,
                    sequences=None) -> IdentificationReport:
    """Compare oracle hit counts with simulated counts of every candidate.

    Deterministic candidates must match exactly; probabilistic candidates
    must have a simulated mean within ``tolerance`` hits of the oracle.
    """
    if not candidates:
        raise ValueError("need at least one candidate policy")
    set_index = oracle.sets[0] if set_index is None else set_index
    if sequences is None:
        sequences = make_sequences(n_seq, length, seed, p_fresh)
    report = IdentificationReport(len(sequences), [CandidateResult(c) for c in candidates])
    deterministic = [is_deterministic(c) for c in candidates]
    assoc = oracle.assoc
    for k, tokens in enumerate(sequences):
        tokens = tuple(tokens)
        key = format_sequence(tokens)
        observed = oracle.evaluate(AccessSeq(main=tokens, target_sets=(set_index,))).hits
        for result, det in zip(report.results, deterministic):
            if det:
                expected = _predict_deterministic(result.policy, assoc, tokens, key)
                ok = expected == observed
            else:
                expected = predict_hits(result.policy, assoc, tokens, trials_per_seq, seed + k)
                ok = expected is not None and abs(expected - observed) <= tolerance
            if not ok:
                result.counterexamples += 1
                if result.first is None:
                    result.first = Counterexample(key, expected, observed)
    return report


def equivalence_classes(policies: Sequence[PolicySpec], assoc: int, n_seq: int = 200,
                        length: int = 50, seed: int = 1, trials: int = 64):
    """Group policies whose simulated hit counts agree on a fresh sequence batch."""
    sequences = make_sequences(n_seq, length, seed)
    groups: Dict[tuple, List[PolicySpec]] = {}
    for p in policies:
        if is_deterministic(p):
            sig = tuple(predict_hits(p, assoc, s) for s in sequences)
        else:
            # random candidates are never merged with anything else
            sig = ("random", format_policy_name(p))
        groups.setdefault(sig, []).append(p)
    return list(groups.values())
