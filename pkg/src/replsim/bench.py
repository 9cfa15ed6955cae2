"""Microbenchmark run and aggregation semantics over a pluggable counter backend.

A benchmark body is executed ``unroll`` times inside a loop of ``loop_count``
iterations. To cancel fixed overhead, each measurement runs the kernel twice
and reports the normalized difference.
"""
from __future__ import annotations

import enum
import random
import re
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

from .errors import BackendError, EmptyInput, ParseError, ValidationError


class Agg(enum.Enum):
    MIN = "Min"
    MEDIAN = "Median"
    TRIMMED_MEAN_20 = "TrimmedMean20"


class Mode(enum.Enum):
    TWO_UNROLL = "TwoUnroll"
    ZERO_UNROLL = "ZeroUnroll"


@dataclass(frozen=True)
class BenchConfig:
    warm_up_count: int = 0
    n_measurements: int = 10
    loop_count: int = 0
    unroll_count: int = 1
    agg: Agg = Agg.MEDIAN
    mode: Mode = Mode.TWO_UNROLL

    def __post_init__(self):
        if self.warm_up_count < 0:
            raise ValidationError(f"warm-up count must be non-negative, got {self.warm_up_count}")
        if self.n_measurements < 1:
            raise ValidationError(f"number of measurements must be at least 1, got {self.n_measurements}")
        if self.loop_count < 0:
            raise ValidationError(f"loop count must be non-negative, got {self.loop_count}")
        if self.unroll_count < 1:
            raise ValidationError(f"unroll count must be at least 1, got {self.unroll_count}")


@dataclass(frozen=True)
class Event:
    name: str
    encoding: Optional[str] = None


@dataclass(frozen=True)
class EventConfig:
    events: Tuple[Event, ...] = ()

    def __post_init__(self):
        seen = set()
        for ev in self.events:
            if ev.name in seen:
                raise ValidationError(f"duplicate event {ev.name!r}")
            seen.add(ev.name)

    @property
    def names(self) -> List[str]:
        return [ev.name for ev in self.events]

    @classmethod
    def of(cls, *names: str) -> "EventConfig":
        return cls(tuple(Event(n) for n in names))


_EVENT_NAME = re.compile(r"[A-Za-z_][\w.:\-]*")


def parse_event_config(text: str) -> EventConfig:
    """Parse one event per line: ``NAME [ENCODING]``; ``#`` starts a comment."""
    events: List[Event] = []
    seen: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        name = parts[0]
        if not _EVENT_NAME.fullmatch(name):
            raise ParseError(f"invalid event name {name!r}", position=f"line {lineno}")
        if name in seen:
            raise ParseError(f"event {name!r} already defined on line {seen[name]}", position=f"line {lineno}")
        encoding = parts[1].strip() if len(parts) > 1 else None
        if encoding is not None and len(encoding.split()) > 1:
            raise ParseError(f"expected at most one encoding after {name!r}", position=f"line {lineno}")
        seen[name] = lineno
        events.append(Event(name, encoding))
    return EventConfig(tuple(events))


class CounterBackend(Protocol):
    """Runs the generated kernel once and reads the requested counters."""

    capacity: int

    def execute(self, loop_count: int, local_unroll: int, events: Sequence[str]) -> Mapping[str, float]: ...


Number = Union[int, float]


class SyntheticBackend:
    """Deterministic linear cost model ``base + per_unit * u * max(1, loop)``.

    ``base`` and ``per_unit`` are numbers or per-event mappings. With
    ``noise_scale > 0`` each reading gets uniform noise in ``[0, noise_scale)``
    drawn from a per-event generator, so an event's readings do not depend on
    which other events share its pass.
    """

    def __init__(self, base: Union[Number, Mapping[str, Number]] = 0,
                 per_unit: Union[Number, Mapping[str, Number]] = 1,
                 noise_scale: float = 0.0, seed: int = 0, capacity: int = 4):
        if capacity < 1:
            raise ValidationError(f"backend capacity must be at least 1, got {capacity}")
        self.base = base
        self.per_unit = per_unit
        self.noise_scale = noise_scale
        self.seed = seed
        self.capacity = capacity
        self.calls: List[Tuple[int, int, Tuple[str, ...]]] = []
        self._rngs: Dict[str, random.Random] = {}

    @staticmethod
    def _lookup(value, event: str) -> Number:
        if isinstance(value, Mapping):
            if event not in value:
                raise BackendError(f"unknown event {event!r}")
            return value[event]
        return value

    def noiseless(self, loop_count: int, local_unroll: int, event: str) -> Number:
        return self._lookup(self.base, event) + self._lookup(self.per_unit, event) * local_unroll * max(1, loop_count)

    def execute(self, loop_count: int, local_unroll: int, events: Sequence[str]) -> Dict[str, float]:
        if len(events) > self.capacity:
            raise BackendError(f"{len(events)} events exceed capacity {self.capacity}")
        self.calls.append((loop_count, local_unroll, tuple(events)))
        out = {}
        for ev in events:
            value = self.noiseless(loop_count, local_unroll, ev)
            if self.noise_scale:
                rng = self._rngs.setdefault(ev, random.Random(f"{self.seed}/{ev}"))
                value += rng.random() * self.noise_scale
            out[ev] = value
        return out


def aggregate(values: Sequence[float], agg: Agg) -> float:
    """Min, median, or the mean after dropping ``floor(0.2 n)`` values per side."""
    if not values:
        raise EmptyInput("cannot aggregate an empty list of measurements")
    if agg is Agg.MIN:
        return min(values)
    if agg is Agg.MEDIAN:
        return statistics.median(values)
    ordered = sorted(values)
    k = len(ordered) // 5
    return statistics.fmean(ordered[k:len(ordered) - k])


@dataclass
class BenchResult:
    values: Dict[str, float]
    samples: Dict[str, List[float]] = field(default_factory=dict, repr=False)

    def to_text(self) -> str:
        return "".join(f"{name}: {value:.2f}\n" for name, value in self.values.items())


def _chunks(names: Sequence[str], size: int) -> List[Tuple[str, ...]]:
    return [tuple(names[i:i + size]) for i in range(0, len(names), size)]


def run_benchmark(backend: CounterBackend, cfg: BenchConfig, events: EventConfig) -> BenchResult:
    """Measure every event, one pass per chunk of ``backend.capacity`` events.

    Each measurement pairs a baseline run with a measured run and records
    ``(measured - baseline) / (max(1, loop_count) * unroll_count)``. Runs with
    negative indices are warm-up and are discarded.
    """
    if cfg.mode is Mode.TWO_UNROLL:
        baseline_unroll, measured_unroll = cfg.unroll_count, 2 * cfg.unroll_count
    else:
        baseline_unroll, measured_unroll = 0, cfg.unroll_count
    scale = max(1, cfg.loop_count) * cfg.unroll_count
    samples: Dict[str, List[float]] = {name: [] for name in events.names}
    for chunk in _chunks(events.names, backend.capacity):
        for i in range(-cfg.warm_up_count, cfg.n_measurements):
            try:
                m1 = backend.execute(cfg.loop_count, baseline_unroll, chunk)
                m2 = backend.execute(cfg.loop_count, measured_unroll, chunk)
            except BackendError as exc:
                raise BackendError(f"events {', '.join(chunk)}: {exc}") from exc
            except Exception as exc:
                raise BackendError(f"events {', '.join(chunk)}: {type(exc).__name__}: {exc}") from exc
            if i < 0:
                continue
            for name in chunk:
                try:
                    samples[name].append((m2[name] - m1[name]) / scale)
                except KeyError:
                    raise BackendError(f"events {', '.join(chunk)}: backend returned no value for {name!r}") from None
    values = {name: aggregate(vals, cfg.agg) for name, vals in samples.items()}
    return BenchResult(values, samples)
