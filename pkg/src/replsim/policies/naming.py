"""Policy-name grammar.

Canonical forms::

    FIFO | LRU | PLRU | MRU | MRU* | NRU | LRU3PLRU4
    QLRU_H<x><y>_(M<x>|MR<p>-<x>)_R<r>_U<u>[_UMO]
    PERM(<hit vector 0>;...;<hit vector A-1>|<miss vector>)
    DUEL(<qlru name>@<sets>;<qlru name>@<sets>[;PSEL<bits>])

Vectors and set lists are comma separated; set lists may contain ranges
such as ``512-575``.
"""
from __future__ import annotations

import re

from ..errors import ParseError, ValidationError
from .spec import (
    AdaptiveSpec,
    Basic,
    PermutationSpec,
    PolicySpec,
    QlruConfig,
    validate_adaptive,
    validate_permutation,
    validate_qlru_config,
)

_QLRU_RE = re.compile(
    r"QLRU_H(?P<x>\d)(?P<y>\d)_(?:M(?P<m>\d)|MR(?P<p>\d+)-(?P<mx>\d))_R(?P<r>\d)_U(?P<u>\d)(?P<umo>_UMO)?"
)
_BASIC = {b.value: b for b in Basic}


def parse_set_list(text: str) -> tuple:
    """``"0,3,8-11"`` -> ``(0, 3, 8, 9, 10, 11)``; order of first mention is kept."""
    out = []
    text = text.strip()
    if not text:
        return ()
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", part)
        if not m:
            raise ParseError(f"bad set list element {part!r}")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
        if hi < lo:
            raise ParseError(f"empty set range {part!r}")
        out.extend(range(lo, hi + 1))
    if len(set(out)) != len(out):
        raise ParseError(f"duplicate sets in {text!r}")
    return tuple(out)


def format_set_list(sets) -> str:
    sets = sorted(sets)
    parts = []
    i = 0
    while i < len(sets):
        j = i
        while j + 1 < len(sets) and sets[j + 1] == sets[j] + 1:
            j += 1
        if j - i >= 2:
            parts.append(f"{sets[i]}-{sets[j]}")
        else:
            parts.extend(str(s) for s in sets[i:j + 1])
        i = j + 1
    return ",".join(parts)


def _parse_qlru(text: str) -> QlruConfig:
    m = _QLRU_RE.fullmatch(text)
    if not m:
        raise ParseError(f"malformed QLRU name {text!r}")
    if m.group("m") is not None:
        insert_age, insert_p = int(m.group("m")), None
    else:
        insert_age, insert_p = int(m.group("mx")), int(m.group("p"))
        if m.group("p").startswith("0"):
            raise ParseError(f"probability divisor must be a positive integer in {text!r}")
    cfg = QlruConfig(
        hit_x=int(m.group("x")),
        hit_y=int(m.group("y")),
        insert_age=insert_age,
        insert_p=insert_p,
        replace=int(m.group("r")),
        update=int(m.group("u")),
        umo=m.group("umo") is not None,
    )
    validate_qlru_config(cfg)
    return cfg


def _parse_vector(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ParseError(f"bad permutation vector {text!r}") from None


def _parse_perm(body: str) -> PermutationSpec:
    if body.count("|") != 1:
        raise ParseError("PERM(...) needs exactly one '|' before the miss vector")
    hits_text, miss_text = body.split("|")
    spec = PermutationSpec(
        hits=tuple(_parse_vector(v) for v in hits_text.split(";")),
        miss=_parse_vector(miss_text),
    )
    validate_permutation(spec)
    return spec


def _parse_duel(body: str) -> AdaptiveSpec:
    parts = body.split(";")
    psel_bits = 10
    if len(parts) == 3:
        m = re.fullmatch(r"PSEL(\d+)", parts[2])
        if not m:
            raise ParseError(f"bad selector width {parts[2]!r}")
        psel_bits = int(m.group(1))
    elif len(parts) != 2:
        raise ParseError("DUEL(...) needs two '<policy>@<sets>' entries")
    sides = []
    for part in parts[:2]:
        if part.count("@") != 1:
            raise ParseError(f"missing '@<sets>' in {part!r}")
        name, sets = part.split("@")
        policy = parse_policy_name(name)
        if not isinstance(policy, QlruConfig):
            raise ValidationError(f"set dueling is supported between QLRU variants only, got {name!r}")
        sides.append((policy, tuple(sorted(parse_set_list(sets)))))
    spec = AdaptiveSpec(
        policy_a=sides[0][0],
        policy_b=sides[1][0],
        leaders_a=sides[0][1],
        leaders_b=sides[1][1],
        psel_bits=psel_bits,
    )
    validate_adaptive(spec)
    return spec


def parse_policy_name(text: str) -> PolicySpec:
    text = text.strip()
    upper = text.upper()
    if upper in _BASIC:
        return _BASIC[upper]
    if upper.startswith("QLRU"):
        return _parse_qlru(upper)
    for prefix, parser in (("PERM(", _parse_perm), ("DUEL(", _parse_duel)):
        if upper.startswith(prefix):
            if not upper.endswith(")"):
                raise ParseError(f"unbalanced parenthesis in {text!r}")
            return parser(upper[len(prefix):-1].replace(" ", ""))
    raise ParseError(f"unknown policy name {text!r}")


def format_policy_name(spec: PolicySpec) -> str:
    if isinstance(spec, Basic):
        return spec.value
    if isinstance(spec, QlruConfig):
        if spec.insert_p is None:
            ins = f"M{spec.insert_age}"
        else:
            ins = f"MR{spec.insert_p}-{spec.insert_age}"
        name = f"QLRU_H{spec.hit_x}{spec.hit_y}_{ins}_R{spec.replace}_U{spec.update}"
        return name + ("_UMO" if spec.umo else "")
    if isinstance(spec, PermutationSpec):
        vec = lambda v: ",".join(map(str, v))  # noqa: E731
        return f"PERM({';'.join(vec(v) for v in spec.hits)}|{vec(spec.miss)})"
    if isinstance(spec, AdaptiveSpec):
        psel = "" if spec.psel_bits == 10 else f";PSEL{spec.psel_bits}"
        return (
            f"DUEL({format_policy_name(spec.policy_a)}@{format_set_list(spec.leaders_a)};"
            f"{format_policy_name(spec.policy_b)}@{format_set_list(spec.leaders_b)}{psel})"
        )
    raise TypeError(f"not a policy spec: {spec!r}")
