"""cacheSeq-style access sequences: parsing and evaluation on the simulator.

Grammar: whitespace-separated tokens. ``NAME`` is an unmeasured access,
``NAME?`` a measured access, ``NAME!`` a flush and ``<wbinvd>`` invalidates
the whole cache.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .cache import BlockId, CacheGeometry, CacheSimulator, set_rng
from .errors import ParseError, ValidationError
from .policies import PolicySpec, make_set

WBINVD_TEXT = "<wbinvd>"
_NAME_RE = re.compile(r"[^\s?!<>]+")


@dataclass(frozen=True)
class Access:
    name: str
    measured: bool = False

    def __str__(self):
        return self.name + ("?" if self.measured else "")


@dataclass(frozen=True)
class Flush:
    name: str

    def __str__(self):
        return self.name + "!"


@dataclass(frozen=True)
class Wbinvd:
    def __str__(self):
        return WBINVD_TEXT


Token = Union[Access, Flush, Wbinvd]
WBINVD = Wbinvd()


def parse_sequence(text: str) -> List[Token]:
    tokens = []
    for pos, word in enumerate(text.split()):
        if word.lower() in (WBINVD_TEXT, "⟨wbinvd⟩"):
            tokens.append(WBINVD)
            continue
        name, suffix = word, ""
        if word[-1] in "?!":
            name, suffix = word[:-1], word[-1]
        if not _NAME_RE.fullmatch(name):
            raise ParseError(f"invalid sequence element {word!r}", position=f"token {pos}")
        if suffix == "!":
            tokens.append(Flush(name))
        else:
            tokens.append(Access(name, measured=suffix == "?"))
    return tokens


def format_sequence(tokens: Iterable[Token]) -> str:
    return " ".join(str(t) for t in tokens)


def _as_tokens(seq) -> Tuple[Token, ...]:
    if isinstance(seq, str):
        return tuple(parse_sequence(seq))
    return tuple(seq)


@dataclass(frozen=True)
class AccessSeq:
    """A complete query: ``init`` once, then ``main`` ``loop_count`` times."""

    main: Tuple[Token, ...]
    init: Tuple[Token, ...] = ()
    loop_count: int = 1
    target_sets: Tuple[int, ...] = (0,)

    @classmethod
    def build(cls, main, init=(), loop_count=1, target_sets=(0,)):
        return cls(_as_tokens(main), _as_tokens(init), loop_count, tuple(target_sets))

    def names(self) -> List[str]:
        seen = {}
        for tok in self.init + self.main:
            if not isinstance(tok, Wbinvd):
                seen.setdefault(tok.name, None)
        return list(seen)


@dataclass
class MeasuredCounts:
    hits: int = 0
    misses: int = 0
    per_set: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def add(self, set_index: int, hit: bool) -> None:
        h, m = self.per_set.get(set_index, (0, 0))
        if hit:
            self.hits += 1
            self.per_set[set_index] = (h + 1, m)
        else:
            self.misses += 1
            self.per_set[set_index] = (h, m + 1)


class NameFactory:
    """Hands out names that were never returned before by this instance."""

    def __init__(self, reserved: Iterable[str] = ()):
        self._reserved = set(reserved)
        self._counters: Dict[str, int] = {}

    def fresh_names(self, prefix: str, count: int) -> List[str]:
        out = []
        n = self._counters.get(prefix, 0)
        while len(out) < count:
            name = f"{prefix}{n}"
            n += 1
            if name not in self._reserved:
                self._reserved.add(name)
                out.append(name)
        self._counters[prefix] = n
        return out


def fresh_names(factory: NameFactory, prefix: str, count: int) -> List[str]:
    return factory.fresh_names(prefix, count)


def run_on(sim: CacheSimulator, seq: AccessSeq, counts: MeasuredCounts | None = None) -> MeasuredCounts:
    """Execute ``seq`` on an existing simulator, continuing from its state.

    Tokens are issued in program order; each token touches every target set
    before the next token starts.
    """
    if seq.loop_count < 1:
        raise ValidationError(f"loop count must be at least 1 for evaluation, got {seq.loop_count}")
    counts = counts if counts is not None else MeasuredCounts()
    sets = seq.target_sets
    for s in sets:
        counts.per_set.setdefault(s, (0, 0))
    for tokens in (seq.init,) + (seq.main,) * seq.loop_count:
        for tok in tokens:
            if isinstance(tok, Access):
                for s in sets:
                    hit = sim.access_hit(tok.name, s)
                    if tok.measured:
                        counts.add(s, hit)
            elif isinstance(tok, Flush):
                for s in sets:
                    sim.flush_block(BlockId(tok.name, s))
            else:
                sim.wbinvd()
    return counts


def eval_sequence(seq: AccessSeq, policy: PolicySpec, geometry: CacheGeometry, seed: int = 0) -> MeasuredCounts:
    """Evaluate ``seq`` on a fresh simulator."""
    for s in seq.target_sets:
        if not 0 <= s < geometry.num_sets:
            raise ValidationError(f"target set {s} outside 0..{geometry.num_sets - 1}")
    return run_on(CacheSimulator(geometry, policy, seed), seq)


def count_hits(policy: PolicySpec, assoc: int, tokens: Sequence[Token], rng=None) -> int:
    """Measured hits of one pass over ``tokens`` in a single fresh set.

    Same semantics as :func:`eval_sequence` restricted to one non-adaptive
    set, without the simulator shell.
    """
    state = make_set(policy, assoc)
    rng = rng if rng is not None else set_rng(0, 0)
    hits = 0
    for tok in tokens:
        if type(tok) is Access:
            if state.access(tok.name, rng) and tok.measured:
                hits += 1
        elif type(tok) is Flush:
            state.flush(tok.name)
        else:
            state.reset()
    return hits
