"""Bundled microarchitecture presets."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..errors import ParseError
from .naming import parse_policy_name
from .spec import PolicySpec


@dataclass(frozen=True)
class Preset:
    name: str
    policy_text: str
    num_sets: int
    assoc: int

    @property
    def policy(self) -> PolicySpec:
        return parse_policy_name(self.policy_text)


# (sets, ways) per cache level, from the cache sizes with 64-byte lines.
# L3 adaptive caches are simulated as one 1024-set slice.
_GEOMETRY = {
    ("nehalem", "l1"): (64, 8), ("nehalem", "l2"): (512, 8), ("nehalem", "l3"): (8192, 16),
    ("westmere", "l1"): (64, 8), ("westmere", "l2"): (512, 8), ("westmere", "l3"): (4096, 16),
    ("sandybridge", "l1"): (64, 8), ("sandybridge", "l2"): (512, 8), ("sandybridge", "l3"): (8192, 16),
    ("ivybridge", "l1"): (64, 8), ("ivybridge", "l2"): (512, 8), ("ivybridge", "l3"): (1024, 12),
    ("haswell", "l1"): (64, 8), ("haswell", "l2"): (512, 8), ("haswell", "l3"): (1024, 16),
    ("broadwell", "l1"): (64, 8), ("broadwell", "l2"): (512, 8), ("broadwell", "l3"): (1024, 12),
    ("skylake", "l1"): (64, 8), ("skylake", "l2"): (1024, 4), ("skylake", "l3"): (1024, 16),
    ("kabylake", "l1"): (64, 8), ("kabylake", "l2"): (1024, 4), ("kabylake", "l3"): (1024, 16),
    ("coffeelake", "l1"): (64, 8), ("coffeelake", "l2"): (1024, 4), ("coffeelake", "l3"): (1024, 16),
    ("cannonlake", "l1"): (64, 8), ("cannonlake", "l2"): (1024, 4), ("cannonlake", "l3"): (1024, 16),
    ("icelake", "l1"): (64, 12), ("icelake", "l2"): (1024, 8), ("icelake", "l3"): (1024, 12),
}
_OTHER_GEOMETRY = {
    "srrip-hp": (1, 16),
    "ivybridge-sim": (1024, 12),
    "skylake-sim": (1024, 16),
}


def parse_preset_file(text: str) -> dict:
    """Parse ``name = policy`` lines into ``{name: policy text}``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'name = policy'", position=f"line {lineno}")
        name, policy = (part.strip() for part in line.split("=", 1))
        if not name or not policy:
            raise ParseError("expected 'name = policy'", position=f"line {lineno}")
        if name in out:
            raise ParseError(f"duplicate preset {name!r}", position=f"line {lineno}")
        parse_policy_name(policy)
        out[name] = policy
    return out


def _geometry(name: str):
    if name in _OTHER_GEOMETRY:
        return _OTHER_GEOMETRY[name]
    arch, _, level = name.partition(".")
    return _GEOMETRY.get((arch, level), (1, 8))


def load_presets() -> dict:
    text = resources.files(__package__).joinpath("presets.txt").read_text()
    return {
        name: Preset(name, policy, *_geometry(name))
        for name, policy in parse_preset_file(text).items()
    }
