"""Inference procedures that treat a cache as a black-box oracle."""
from .agegraph import AgeGraph, age_graph, curve_offset, pooled_offset
from .dueling import DuelScanResult, detect_dueling
from .identify import CandidateResult, Counterexample, IdentificationReport, identify_policy, predict_hits
from .oracle import SeqOracle, SimOracle
from .permutation import infer_permutation_policy
from .randseq import gen_random_sequence

__all__ = [
    "AgeGraph", "age_graph", "curve_offset", "pooled_offset",
    "DuelScanResult", "detect_dueling",
    "CandidateResult", "Counterexample", "IdentificationReport", "identify_policy", "predict_hits",
    "SeqOracle", "SimOracle", "infer_permutation_policy", "gen_random_sequence",
]
