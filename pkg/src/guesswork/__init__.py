"""Guessing a random symbol after one noisy yes/no question."""
from .core import (
    FLOAT,
    RATIONAL,
    Distribution,
    Partition,
    brute_force_opt_question,
    guess_time_after_question,
    guessing_time,
    make_distribution,
    posterior,
)
from .cutoff import b_values, cutoff_rate, ideal_guessing_curve, simulate_feedback_scheme
from .graph import cut_weight, greedy_maxcut, weight_matrix, zigzag_partition
from .search import ScanConfig, conjecture_scan
from .spectral import near_optimality_gap, psd_certificate

__version__ = "0.1.0"

__all__ = [
    "FLOAT",
    "RATIONAL",
    "Distribution",
    "Partition",
    "ScanConfig",
    "b_values",
    "brute_force_opt_question",
    "conjecture_scan",
    "cut_weight",
    "cutoff_rate",
    "greedy_maxcut",
    "guess_time_after_question",
    "guessing_time",
    "ideal_guessing_curve",
    "make_distribution",
    "near_optimality_gap",
    "posterior",
    "psd_certificate",
    "simulate_feedback_scheme",
    "weight_matrix",
    "zigzag_partition",
]
