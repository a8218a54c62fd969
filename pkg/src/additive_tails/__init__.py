"""Large-deviation tails of strongly additive arithmetic functions.

The package computes both sides of the correspondence between the
distribution of a strongly additive function on the integers and its
distribution on the primes: exact integer-side tail counts, prime-side
measures and their moments, saddle-point and series-form tail
asymptotics, compound-Poisson (Levy) limit laws with Monte Carlo
estimation, and the forward/converse pipelines tying them together.
"""

__version__ = "0.1.0"

from .additive import (
    AdditiveFunctionSpec,
    IntegerStats,
    congruence_spec,
    constant_spec,
    empirical_tail,
    evaluate_all,
    omega_spec,
    prime_mean,
    prime_variance,
    sampler_spec,
    two_value_limit_target,
    two_value_spec,
)
from .converse import (
    ConvergenceReport,
    ConverseReport,
    TailReport,
    coefficient_convergence,
    converse_check,
    default_atom_grid,
    forward_check,
    moments_from_coeffs,
    reconstruct_from_moments,
)
from .distributions import StepDistribution
from .levy import LevySampleBatch, char_function, char_function_check, mc_tail, sample
from .prime_side import PrimeMeasure, kolmogorov_distance, prime_measure
from .saddle import GapTable, SaddleSolution, solve_tilt, tilt_gap
from .series import (
    TruncatedSeries,
    coeffs_from_moments,
    geometric_bound_check,
    series_inverse,
    shift_series,
    tilt_coeffs,
)
from .sieve import FactorTable, PrimeTable, sieve_primes, spf_table
from .tails import TailValue, mills_tail, poisson_tail, saddle_tail, series_tail

__all__ = [
    "AdditiveFunctionSpec",
    "ConvergenceReport",
    "ConverseReport",
    "FactorTable",
    "GapTable",
    "IntegerStats",
    "LevySampleBatch",
    "PrimeMeasure",
    "PrimeTable",
    "SaddleSolution",
    "StepDistribution",
    "TailReport",
    "TailValue",
    "TruncatedSeries",
    "char_function",
    "char_function_check",
    "coefficient_convergence",
    "coeffs_from_moments",
    "congruence_spec",
    "constant_spec",
    "converse_check",
    "default_atom_grid",
    "empirical_tail",
    "evaluate_all",
    "forward_check",
    "geometric_bound_check",
    "kolmogorov_distance",
    "mc_tail",
    "mills_tail",
    "moments_from_coeffs",
    "omega_spec",
    "poisson_tail",
    "prime_mean",
    "prime_measure",
    "prime_variance",
    "reconstruct_from_moments",
    "sample",
    "sampler_spec",
    "saddle_tail",
    "series_inverse",
    "series_tail",
    "shift_series",
    "sieve_primes",
    "solve_tilt",
    "spf_table",
    "tilt_coeffs",
    "tilt_gap",
    "two_value_limit_target",
    "two_value_spec",
    "__version__",
]
