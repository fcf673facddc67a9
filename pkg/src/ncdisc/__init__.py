"""Exact symbolic and numeric toolkit for free semigroup convolution algebras.

Word combinatorics of finitely generated free semigroups, finitely
supported convolution series, truncated matrix compressions of the induced
operators, derivations determined on generators with an exact
inner-symbol solver, and the Hochschild cochain complex with scalar
coefficients together with its explicit contracting homotopy.
"""

from .words import (
    Alphabet,
    Word,
    enumerate_words,
    min_word,
    power_shift_check,
    transport,
)
from .series import (
    PRUNE_EPS,
    ZERO_DEGREE,
    Series,
    adjoint_shift,
    cesaro,
    conditional_expectation,
    conjugate_by,
    convolve,
    degree_part,
    first_letter_part,
    max_coeff_diff,
    right_apply,
)
from .operators import (
    PowerIterationError,
    TruncatedOperator,
    TruncationBasis,
    cesaro_op,
    commutant_check,
    conjugation_check,
    degree_band,
    isometry_relations,
    left_matrix,
    max_column_deviation,
    mobius_coefficients,
    mobius_witness_ratio,
    norm_estimate,
    q_projection,
    right_matrix,
    write_csv,
)
from .derivations import (
    GeneratorDerivation,
    InconsistentDerivationError,
    commuting_support_vanishes,
    conjugate_vanishing_index,
    inner_derivation,
    normal_approx_check,
    short_support_vanishes,
    solve_inner_symbol,
    solve_local_inner,
    stabilized_conjugate_sum,
)
from .cohomology import (
    Cochain,
    CutPair,
    NonCocycleError,
    coboundary,
    cut,
    first_cocycle_violation,
    generator_cocycles,
    homotopy,
    homotopy_on_series,
    is_cocycle,
    module_left,
    module_right,
    one_cocycle_dimension,
)

__all__ = [
    "Alphabet",
    "Cochain",
    "CutPair",
    "GeneratorDerivation",
    "InconsistentDerivationError",
    "NonCocycleError",
    "PRUNE_EPS",
    "PowerIterationError",
    "Series",
    "TruncatedOperator",
    "TruncationBasis",
    "Word",
    "ZERO_DEGREE",
    "adjoint_shift",
    "cesaro",
    "cesaro_op",
    "coboundary",
    "commutant_check",
    "commuting_support_vanishes",
    "conditional_expectation",
    "conjugate_by",
    "conjugate_vanishing_index",
    "conjugation_check",
    "convolve",
    "cut",
    "degree_band",
    "degree_part",
    "enumerate_words",
    "first_cocycle_violation",
    "first_letter_part",
    "generator_cocycles",
    "homotopy",
    "homotopy_on_series",
    "inner_derivation",
    "is_cocycle",
    "isometry_relations",
    "left_matrix",
    "max_coeff_diff",
    "max_column_deviation",
    "min_word",
    "mobius_coefficients",
    "mobius_witness_ratio",
    "module_left",
    "module_right",
    "norm_estimate",
    "normal_approx_check",
    "one_cocycle_dimension",
    "power_shift_check",
    "q_projection",
    "right_apply",
    "right_matrix",
    "short_support_vanishes",
    "solve_inner_symbol",
    "solve_local_inner",
    "stabilized_conjugate_sum",
    "transport",
    "write_csv",
]

__version__ = "0.1.0"
