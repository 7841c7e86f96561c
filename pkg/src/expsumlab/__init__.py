"""Verification and exploration laboratory for exponential sums over
multiplicative subgroups of prime fields.

Computes S_a over a subgroup (exactly coset-deduplicated or via an
arbitrary-length DFT), interval-weighted double sums, exact additive
energies and product-collision counts, every closed-form bound with exact
rational exponents, and the dyadic pigeonhole cascade with its deterministic
inequality chain.
"""

from . import bounds
from .energy import (
    EnergyProfile,
    IntervalProductProfile,
    brute_force_T,
    difference_counts,
    energy_via_moments,
    j_count,
    representation_counts,
)
from .errors import InputError, ResourceError
from .expsum import (
    Interval,
    SumTable,
    all_sums,
    dft,
    interval_subgroup_sum,
    max_sum,
    phase_table,
    single_sum,
)
from .field import PrimeModulus, divisors, factorize, is_prime, mod_pow, primitive_root
from .prooftrace import (
    Cascade,
    CheckResult,
    EmptyTraceError,
    StageResult,
    TraceResult,
    TraceSets,
    build_trace,
    check_energy_cardinality,
    dyadic_stage,
    moment_inequality_check,
    trilinear_eval,
)
from .subgroup import Subgroup, coset_representatives, subgroup_of_order

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "EnergyProfile",
    "IntervalProductProfile",
    "brute_force_T",
    "difference_counts",
    "energy_via_moments",
    "j_count",
    "representation_counts",
    "InputError",
    "ResourceError",
    "Interval",
    "SumTable",
    "all_sums",
    "dft",
    "interval_subgroup_sum",
    "max_sum",
    "phase_table",
    "single_sum",
    "PrimeModulus",
    "divisors",
    "factorize",
    "is_prime",
    "mod_pow",
    "primitive_root",
    "Cascade",
    "CheckResult",
    "EmptyTraceError",
    "StageResult",
    "TraceResult",
    "TraceSets",
    "build_trace",
    "check_energy_cardinality",
    "dyadic_stage",
    "moment_inequality_check",
    "trilinear_eval",
    "Subgroup",
    "coset_representatives",
    "subgroup_of_order",
]
