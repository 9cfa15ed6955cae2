"""Detection of the fixed-policy (leader) sets of a set-dueling cache."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from ..errors import ProbeUndistinguishing
from ..policies import PolicySpec, format_set_list, is_deterministic
from ..seqlang import WBINVD, Access, AccessSeq, Token, count_hits, format_sequence
from .randseq import gen_random_sequence

FIXED_A, FIXED_B, FOLLOWER, UNKNOWN = "FixedPolicyA", "FixedPolicyB", "Follower", "Unknown"


@dataclass
class DuelScanResult:
    classification: Dict[int, str]
    evidence: Dict[int, Tuple[int, int]]
    expected: Tuple[float, float]
    probe: str = ""
    notes: List[str] = field(default_factory=list)

    def sets_with(self, label: str) -> List[int]:
        return sorted(s for s, c in self.classification.items() if c == label)

    def summary(self) -> str:
        lines = [f"probe: {self.probe}",
                 f"expected hits: policy A {self.expected[0]:.2f}, policy B {self.expected[1]:.2f}"]
        for label in (FIXED_A, FIXED_B, FOLLOWER, UNKNOWN):
            sets = self.sets_with(label)
            lines.append(f"{label}: {len(sets)} sets" + (f" [{format_set_list(sets)}]" if sets else ""))
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["set,classification,hits_when_a_favored,hits_when_b_favored"]
        for s in sorted(self.classification):
            ha, hb = self.evidence[s]
            rows.append(f"{s},{self.classification[s]},{ha},{hb}")
        return "\n".join(rows) + "\n"


def _mean_hits(policy: PolicySpec, assoc: int, tokens, trials: int, rng) -> List[int]:
    n = 1 if is_deterministic(policy) else trials
    return [count_hits(policy, assoc, tokens, rng) for _ in range(n)]


def _steady_misses(policy: PolicySpec, assoc: int, body: Sequence[Token], loops: int, rng) -> float:
    """Misses per iteration of ``body`` once the set has warmed up."""
    warm = tuple(body) * 4
    measured = tuple(Access(t.name, measured=True) for t in body) * loops
    hits = count_hits(policy, assoc, (WBINVD,) + warm + measured, rng)
    return (len(body) * loops - hits) / loops


def _structured_probes(assoc: int):
    for k in range(assoc + 1, 2 * assoc + 1):
        for rounds in (2, 3):
            names = [f"B{i}" for i in range(k)]
            yield (WBINVD,) + tuple(Access(n, measured=True) for n in names * rounds)


def _misclassified(samples: Sequence[int], own: float, other: float) -> float:
    return sum(abs(h - own) >= abs(h - other) for h in samples) / len(samples)


def find_probe(policy_a: PolicySpec, policy_b: PolicySpec, assoc: int, rng, candidates: int = 200,
               trials: int = 32, confirm_trials: int = 1000, finalists: int = 8):
    """Probe sequence whose hit count best separates the two policies.

    Candidates are random sequences plus cyclic sweeps slightly larger than
    the set. Each is scored by the fraction of simulated runs whose hit
    count is not strictly closer to its own policy's mean; the best few are
    re-scored with ``confirm_trials`` runs. Returns ``(probe, mean_a, mean_b)``.
    """
    pool = list(_structured_probes(assoc))
    for _ in range(candidates):
        length = rng.randrange(assoc + 2, 3 * assoc + 1)
        pool.append(gen_random_sequence(length, rng.choice((0.3, 0.5, 0.7)), rng))

    def score(tokens, n):
        ha = _mean_hits(policy_a, assoc, tokens, n, rng)
        hb = _mean_hits(policy_b, assoc, tokens, n, rng)
        ea, eb = sum(ha) / len(ha), sum(hb) / len(hb)
        if ea == eb:
            return (1.0, 0.0, len(tokens)), ea, eb
        err = max(_misclassified(ha, ea, eb), _misclassified(hb, eb, ea))
        return (err, -abs(ea - eb), len(tokens)), ea, eb

    ranked = sorted(((score(t, trials), t) for t in pool), key=lambda item: item[0][0])
    best = min(((score(t, confirm_trials), t) for _, t in ranked[:finalists]), key=lambda item: item[0][0])
    (key, ea, eb), tokens = best
    if key[0] >= 0.5:
        raise ProbeUndistinguishing("no probe separates the two policies")
    return tokens, ea, eb


def _structured_workloads(assoc: int):
    for k in range(2, 2 * assoc + 2):
        yield tuple(Access(f"W{i}") for i in range(k))
    for k in range(assoc + 1, 3 * assoc):
        for repeats in (1, 2, 3):
            # every block is reused right after one other miss
            body = []
            for i in range(k):
                body.append(Access(f"W{i}"))
                if i:
                    body.extend([Access(f"W{i - 1}")] * repeats)
            yield tuple(body)


def find_workloads(policy_a: PolicySpec, policy_b: PolicySpec, assoc: int, rng, candidates: int = 100,
                   loops: int = 16):
    """Loop bodies that drive the selector toward A and toward B.

    The A-favoring body must make B miss more than A while A hits on most
    accesses; the B-favoring body must make A miss more than B while A
    misses on most accesses. Both conditions are required so that the
    selector moves the intended way whether or not B-leaders exist.
    Returns the two bodies.
    """
    pool = list(_structured_workloads(assoc))
    for _ in range(candidates):
        length = rng.randrange(assoc, 4 * assoc)
        seq = gen_random_sequence(length, rng.choice((0.2, 0.35, 0.5)), rng, prefix="W")
        pool.append(tuple(Access(t.name) for t in seq[1:]))
    best_a = best_b = None
    for body in pool:
        miss_a = _steady_misses(policy_a, assoc, body, loops, rng) / len(body)
        miss_b = _steady_misses(policy_b, assoc, body, loops, rng) / len(body)
        score_a = min(miss_b - miss_a, 1 - 2 * miss_a)
        score_b = min(miss_a - miss_b, 2 * miss_a - 1)
        if best_a is None or score_a > best_a[1]:
            best_a = (body, score_a)
        if best_b is None or score_b > best_b[1]:
            best_b = (body, score_b)
    if best_a[1] <= 0 or best_b[1] <= 0:
        raise ProbeUndistinguishing("no workload drives the selector toward both policies")
    return best_a[0], best_b[0]


def _closer_to_a(h: int, ea: float, eb: float):
    da, db = abs(h - ea), abs(h - eb)
    return None if da == db else da < db


def _classify(ha: int, hb: int, ea: float, eb: float) -> str:
    under_a, under_b = _closer_to_a(ha, ea, eb), _closer_to_a(hb, ea, eb)
    if under_a is True and under_b is True:
        return FIXED_A
    if under_a is False and under_b is False:
        return FIXED_B
    if under_a is True and under_b is False:
        return FOLLOWER
    return UNKNOWN


class _Scanner:
    """Drives the selector with loop workloads and probes sets under it."""

    def __init__(self, oracle, probe, ea, eb, warmup_loops, topup_loops, max_drive_loops):
        self.oracle = oracle
        self.probe = probe
        self.ea, self.eb = ea, eb
        self.warmup_loops = warmup_loops
        self.min_topup = topup_loops
        self.max_drive_loops = max_drive_loops
        self.topup = {}

    def run(self, body, loops, work):
        if loops > 0 and work:
            self.oracle.evaluate(AccessSeq(main=body, loop_count=loops, target_sets=work))

    def probe_hits(self, batch) -> Dict[int, int]:
        counts = self.oracle.evaluate(AccessSeq(main=self.probe, target_sets=tuple(batch)))
        return {s: counts.per_set[s][0] for s in batch}

    def responses(self, body, sets, work) -> Dict[int, object]:
        # one set per probe, each after a top-up: a leader among the witnesses
        # must not move the selector while another witness is measured
        out = {}
        for s in sets:
            self.run(body, self.topup.get(body, self.min_topup), work)
            out[s] = _closer_to_a(self.probe_hits((s,))[s], self.ea, self.eb)
        return out

    def drive(self, body, work, witnesses, reference) -> Tuple[int, List[int]]:
        """Run ``body`` until a witness response departs from ``reference``.

        The loops that were needed are then run once more as margin, and
        later top-ups are sized from the same count. Returns the loops
        needed to flip (0 if no witness flipped within the budget) and the
        witnesses that flipped.
        """
        total, chunk = 0, self.warmup_loops
        while total < self.max_drive_loops:
            self.run(body, chunk, work)
            total += chunk
            now = self.responses(body, witnesses, work) if witnesses else reference
            if now != reference:
                self.run(body, total, work)
                self.topup[body] = max(self.min_topup, total // 4)
                return total, [w for w in witnesses if now[w] != reference[w]]
            chunk = total
        self.topup[body] = self.min_topup
        return 0, []

    def ensure(self, body, work, witness, favors_a: bool) -> None:
        """Top up ``body`` until the follower ``witness`` shows the favored policy."""
        loops = self.topup.get(body, self.min_topup)
        spent = 0
        while spent <= self.max_drive_loops:
            if _closer_to_a(self.probe_hits((witness,))[witness], self.ea, self.eb) is favors_a:
                return
            self.run(body, loops, work)
            spent += loops
            loops *= 2

    def probe_sets(self, body, sets, work, batch_size) -> Dict[int, int]:
        hits = {}
        for start in range(0, len(sets), batch_size):
            batch = tuple(sets[start:start + batch_size])
            self.run(body, self.topup.get(body, self.min_topup), work)
            hits.update(self.probe_hits(batch))
        return hits

    def scan(self, favor_a, favor_b, sets, work, witnesses, batch_size):
        """Probe ``sets`` in batches with the selector driven to B, then back to A."""
        reference = self.responses(favor_a, witnesses, work)
        to_b, flipped_b = self.drive(favor_b, work, witnesses, reference)
        under_b = self.probe_sets(favor_b, sets, work, batch_size)
        reference = self.responses(favor_b, witnesses, work)
        to_a, flipped_a = self.drive(favor_a, work, witnesses, reference)
        under_a = self.probe_sets(favor_a, sets, work, batch_size)
        # a witness that flipped in both directions follows the selector
        flipped = sorted(set(flipped_a) & set(flipped_b))
        return {s: (under_a[s], under_b[s]) for s in sets}, (to_b, to_a), flipped

    def rescan(self, favor_a, favor_b, sets, work, witness):
        """Probe each set alone, checking the selector through ``witness`` first."""
        out = {}
        for body, favors_a in ((favor_b, False), (favor_a, True)):
            for s in sets:
                self.run(body, self.topup.get(body, self.min_topup), work)
                self.ensure(body, work, witness, favors_a)
                out.setdefault(s, {})[favors_a] = self.probe_hits((s,))[s]
        return {s: (v[True], v[False]) for s, v in out.items()}


def detect_dueling(oracle, policy_a: PolicySpec, policy_b: PolicySpec, sets: Sequence[int] | None = None,
                   seed: int = 0, batch_size: int = 16, warmup_loops: int = 4, topup_loops: int = 2,
                   max_drive_loops: int = 1024, witnesses: int = 8,
                   workload_sets: Sequence[int] | None = None) -> DuelScanResult:
    """Classify each set as fixed to A, fixed to B, or follower.

    The selector is driven toward B by a workload on which A misses more
    and back toward A by the opposite workload, both issued in
    ``workload_sets`` (default: all probed sets). Each drive doubles its
    length until a few witness sets change their probe response, so no
    selector width or leader count has to be known. Sets are probed in
    batches with a short top-up of the workload before each batch.

    Probe misses in leader sets of the same batch can move the selector
    and make a follower look fixed, but can never make a leader look like
    a follower. Every set not classified Follower in the batched pass is
    therefore probed again on its own, with the workload confined to these
    suspects (which include all leaders) and a known follower checked
    before each probe. Witnesses that flipped with both drives serve as
    that follower, so the re-probe works even if no batch was clean.
    """
    assoc = oracle.assoc
    sets = list(oracle.sets if sets is None else sets)
    workload_sets = tuple(sets if workload_sets is None else workload_sets)
    rng = random.Random(seed)
    probe, ea, eb = find_probe(policy_a, policy_b, assoc, rng)
    favor_a, favor_b = find_workloads(policy_a, policy_b, assoc, rng)
    scanner = _Scanner(oracle, probe, ea, eb, warmup_loops, topup_loops, max_drive_loops)

    sample = sorted(rng.sample(sets, min(witnesses, len(sets))))
    scanner.run(favor_a, warmup_loops, workload_sets)
    evidence, flips, flipped = scanner.scan(favor_a, favor_b, sets, workload_sets, sample, batch_size)
    classification = {s: _classify(*evidence[s], ea, eb) for s in sets}
    notes = [f"selector flipped after {flips[0]} and {flips[1]} loops" if all(flips)
             else "no witness set changed behavior; the cache may not be adaptive"]

    followers = [s for s in sets if classification[s] == FOLLOWER]
    suspects = [s for s in sets if classification[s] != FOLLOWER]
    if suspects and (flipped or followers):
        # a set seen to follow the selector watches it during the re-probe
        witness = flipped[0] if flipped else max(followers, key=lambda f: abs(evidence[f][0] - evidence[f][1]))
        extra = set(workload_sets) - set(sets)
        work = tuple(sorted(set(suspects) | extra))
        evidence.update(scanner.rescan(favor_a, favor_b, suspects, work, witness))
        for s in suspects:
            classification[s] = _classify(*evidence[s], ea, eb)
        notes.append(f"re-probed {len(suspects)} sets individually")
    return DuelScanResult(classification, evidence, (ea, eb), probe=format_sequence(probe), notes=notes)
