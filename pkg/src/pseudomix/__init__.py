"""Desk-scale simulations distinguishing computable (pseudorandom) mixtures
of pure quantum states from correctly prepared maximally mixed states."""

__version__ = "0.1.0"

from .sequences import BitString, SymbolString, hamming_distance, split_even_odd  # noqa: F401
from .quantum import COMPUTATIONAL, DIAGONAL, PureState, DensityMatrix  # noqa: F401
from .povm import build_ic_povm, check_povm, reconstruct_state, sample_povm  # noqa: F401
from .programs import MT19937, build_search_list, mt19937_bits  # noqa: F401
from .distinguisher import (  # noqa: F401
    Tolerance,
    Verdict,
    VerdictKind,
    decay_threshold,
    dovetail_search,
    effective_tolerance,
    error_probability_bound,
    max_errors,
    restricted_search,
)
from .harness import ExperimentConfig, run_experiment, run_single, sweep_lmax  # noqa: F401
