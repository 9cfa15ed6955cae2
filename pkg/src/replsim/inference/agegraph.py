"""Age graphs: survival of each block as fresh blocks are accessed."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from ..seqlang import Access, AccessSeq, NameFactory, Token, Wbinvd, parse_sequence


@dataclass
class AgeGraph:
    blocks: List[str]
    n_max: int
    trials: int
    hits: Dict[str, List[int]]

    def rate(self, block: str, n: int) -> float:
        return self.hits[block][n] / self.trials

    def curve(self, block: str) -> List[float]:
        return [h / self.trials for h in self.hits[block]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n"] + self.blocks)
        for n in range(self.n_max + 1):
            writer.writerow([n] + [f"{self.rate(b, n):.4f}" for b in self.blocks])
        return buf.getvalue()


def _unmeasured(tokens: Sequence[Token]) -> List[Token]:
    return [Access(t.name) if isinstance(t, Access) else t for t in tokens]


def age_graph(oracle, seq, n_max: int, trials: int, set_indices: Sequence[int] | None = None,
              use_fast_path: bool = True) -> AgeGraph:
    """For every block B of ``seq``: run the sequence, access n fresh blocks,
    then count how often B still hits.

    ``set_indices`` are used side by side as independent trials. An oracle
    offering ``survival_curves`` answers the whole graph in one pass.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    tokens = parse_sequence(seq) if isinstance(seq, str) else list(seq)
    tokens = _unmeasured(tokens)
    blocks = AccessSeq(main=tuple(tokens)).names()
    fresh = NameFactory(reserved=blocks).fresh_names("N", n_max)

    if use_fast_path and hasattr(oracle, "survival_curves"):
        counts = oracle.survival_curves(tokens, blocks, fresh, trials)
        if counts is not None:
            return AgeGraph(blocks, n_max, trials, counts)

    sets = list(set_indices) if set_indices else [oracle.sets[0]]
    counts = {b: [0] * (n_max + 1) for b in blocks}
    for b in blocks:
        for n in range(n_max + 1):
            main = tuple(tokens) + tuple(Access(f) for f in fresh[:n]) + (Access(b, measured=True),)
            if not any(isinstance(t, Wbinvd) for t in tokens):
                main = (Wbinvd(),) + main
            done = 0
            while done < trials:
                batch = sets[: trials - done]
                counts[b][n] += oracle.evaluate(AccessSeq(main=main, target_sets=tuple(batch))).hits
                done += len(batch)
    return AgeGraph(blocks, n_max, trials, counts)


def curve_offset(left: Sequence[float], right: Sequence[float], max_lag: int | None = None) -> int:
    """Lag (in fresh blocks) that best aligns ``right`` with ``left`` shifted right.

    Chooses the lag minimizing mean squared difference between
    ``right[n]`` and ``left[n - lag]`` over the overlap.
    """
    size = min(len(left), len(right))
    max_lag = size // 2 if max_lag is None else max_lag
    best, best_err = 0, float("inf")
    for lag in range(0, max_lag + 1):
        diffs = [(right[n] - left[n - lag]) ** 2 for n in range(lag, size)]
        if not diffs:
            break
        err = sum(diffs) / len(diffs)
        if err < best_err:
            best, best_err = lag, err
    return best


def pooled_offset(graph: AgeGraph, pairs: Sequence[Tuple[str, str]], max_lag: int | None = None) -> int:
    """Single lag that best aligns every ``(left, right)`` curve pair at once.

    Pooling the squared differences of all pairs before minimizing is far
    less noisy than averaging per-pair lags when survival curves are sampled.
    """
    size = graph.n_max + 1
    max_lag = size // 2 if max_lag is None else max_lag
    curves = [(graph.curve(a), graph.curve(b)) for a, b in pairs]
    best, best_err = 0, float("inf")
    for lag in range(0, min(max_lag, size - 1) + 1):
        total = sum((right[n] - left[n - lag]) ** 2 for left, right in curves for n in range(lag, size))
        err = total / (len(curves) * (size - lag))
        if err < best_err:
            best, best_err = lag, err
    return best
