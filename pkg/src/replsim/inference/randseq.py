"""Random access sequences for policy identification."""
from __future__ import annotations

from typing import Tuple

from ..seqlang import WBINVD, Access, Token


def gen_random_sequence(length: int, p_fresh: float, rng, prefix: str = "B") -> Tuple[Token, ...]:
    """``<wbinvd>`` followed by ``length`` measured accesses.

    The first element is fresh; each later one is fresh with probability
    ``p_fresh`` and otherwise drawn uniformly from the distinct elements
    used so far.
    """
    if length < 1:
        raise ValueError("sequence length must be at least 1")
    if not 0.0 <= p_fresh <= 1.0:
        raise ValueError("p_fresh must lie in [0, 1]")
    used = []
    out = [WBINVD]
    for i in range(length):
        if i == 0 or rng.random() < p_fresh:
            name = f"{prefix}{len(used)}"
            used.append(name)
        else:
            name = used[rng.randrange(len(used))]
        out.append(Access(name, measured=True))
    return tuple(out)
