"""Minimal non-Koszul relation degrees on powers of variables and their sum
over F_p, with the derived socle degrees, diagonal F-thresholds, and weak
Lefschetz verdicts.  Closed formulas and an independent rank oracle live in
separate modules so each can check the other."""

from .formulas import (ApplicabilityReport, FThresholdResult,
                       NotApplicableError, applicability, condition_char0,
                       e0_formula, ep_base, ep_dispatch, ep_han, ep_main,
                       fthreshold_formula, frac_str, min_function,
                       tsd_formula, wlp_classify_n3, wlp_classify_n4,
                       wlp_criterion, wlp_feasibility_filter)
from .linalg import MatrixFp, kernel_witness, matrix_from_rows, nullity, rank
from .modp import (PrimeModulus, PrimePowerContext, QSplit, binomial_mod,
                   check_prime, is_prime, largest_power_leq, multinomial_mod,
                   q_split)
from .monomials import (GradedSlice, graded_slice, hilbert_function,
                        monomial_ideal_member, slice_array, top_degree)
from .oracle import (EResult, IndependenceError, KernelWitness,
                     WlpRecord, WlpReport, e_degree_oracle, mult_map,
                     nu_value, socle_degree_oracle, wlp_rank_profile)
from .verify import (GridSpec, canonical_json, default_suite,
                     fthreshold_convergence, run_grid, run_suite,
                     verify_e_grid, verify_tsd_grid, verify_wlp_grid)

__version__ = "0.1.0"

__all__ = [
    "ApplicabilityReport", "EResult", "FThresholdResult", "GradedSlice",
    "GridSpec", "IndependenceError", "KernelWitness", "MatrixFp",
    "NotApplicableError", "PrimeModulus", "PrimePowerContext", "QSplit",
    "WlpRecord", "WlpReport", "applicability", "binomial_mod",
    "canonical_json", "check_prime", "condition_char0", "default_suite",
    "e0_formula", "e_degree_oracle", "ep_base", "ep_dispatch", "ep_han",
    "ep_main", "frac_str", "fthreshold_convergence", "fthreshold_formula",
    "graded_slice", "hilbert_function", "is_prime", "kernel_witness",
    "largest_power_leq", "matrix_from_rows", "min_function",
    "monomial_ideal_member", "mult_map", "multinomial_mod", "nu_value",
    "nullity", "q_split", "rank", "run_grid", "run_suite", "slice_array",
    "socle_degree_oracle", "top_degree", "tsd_formula", "verify_e_grid",
    "verify_tsd_grid", "verify_wlp_grid", "wlp_classify_n3",
    "wlp_classify_n4", "wlp_criterion", "wlp_feasibility_filter",
    "wlp_rank_profile",
]
