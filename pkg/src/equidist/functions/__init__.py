from .lpnorm import (
    LpNormSpec,
    lp_directional_derivative,
    lp_eval,
    lp_norm_values,
    lp_partial,
    lp_second_partial,
)
from .polynomial import (
    MonomialEvaluationVector,
    MultiIndex,
    Polynomial,
    directional_derivative,
    evaluate_mod1,
    exact_determinant,
    exact_rank,
    exponents_of_degree,
    find_irrational_direction,
    iter_directions,
    leading_directional_value,
    monomial_basis_search,
    monomial_vector,
    reduce_mod1,
    residue_decompose,
    shell,
    top_denominator_lcm,
    total_degree,
)
from .reduction import (
    ConstantLeaf,
    DirectionCertificate,
    ResidueSplit,
    reduction_trace,
    split_by_residue,
)
