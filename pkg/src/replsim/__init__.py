"""Cache replacement-policy simulation and black-box characterization."""
from .cache import BlockId, CacheGeometry, CacheSimulator, Outcome
from .errors import (
    BackendError,
    EmptyInput,
    InconsistentOracle,
    NotPermutation,
    OracleError,
    ParseError,
    PolicyStateError,
    ProbeUndistinguishing,
    ReplSimError,
    ValidationError,
)
from .policies import format_policy_name, parse_policy_name
from .seqlang import AccessSeq, eval_sequence, format_sequence, parse_sequence

__version__ = "0.1.0"

__all__ = [
    "AccessSeq", "BackendError", "BlockId", "CacheGeometry", "CacheSimulator", "EmptyInput",
    "InconsistentOracle", "NotPermutation", "OracleError", "Outcome", "ParseError",
    "PolicyStateError", "ProbeUndistinguishing", "ReplSimError", "ValidationError",
    "eval_sequence", "format_policy_name", "format_sequence", "parse_policy_name", "parse_sequence",
]
