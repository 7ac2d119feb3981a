"""Exact arithmetic and experiments for modules over F_p[T]/(T^n)."""

__version__ = "0.1.0"

from .errors import ResourceBoundError
from .series import (
    MAX_LEVEL,
    MAX_PRIME,
    TruncatedSeries,
    check_level,
    check_prime,
    from_group_basis,
    is_power_of,
)
from .submodules import (
    CyclicSubmodule,
    Intersection,
    ModuleVector,
    QuotientStructure,
    SubmoduleTower,
    canonical_form,
    census_maximal_generators,
    count_maximal,
    count_maximal_generators,
    enumerate_maximal,
    intersect,
    intersection_exponent_linalg,
    is_maximal,
    iter_module_vectors,
    lifts,
    project,
    sum_and_quotient,
)
from .pairing import (
    FpSubspace,
    MaximalIsotropic,
    SpaceElement,
    SpaceShape,
    enumerate_maximal_isotropic,
    gram_matrix,
    isotropic_diagnostics,
    t_action_matrix,
)
from .probability import (
    MonteCarloResult,
    PairSample,
    ProbabilityModel,
    PushforwardReport,
    RngSpec,
    TowerReport,
    chi_square_uniformity,
    collision_probability_census,
    collision_probability_exact,
    intersection_bound,
    monte_carlo,
    pushforward_consistency,
    sample_maximal,
    sample_pair,
    tower_experiment,
)

__all__ = [
    "__version__",
    "ResourceBoundError",
    "MAX_LEVEL",
    "MAX_PRIME",
    "TruncatedSeries",
    "check_level",
    "check_prime",
    "from_group_basis",
    "is_power_of",
    "CyclicSubmodule",
    "Intersection",
    "ModuleVector",
    "QuotientStructure",
    "SubmoduleTower",
    "canonical_form",
    "census_maximal_generators",
    "count_maximal",
    "count_maximal_generators",
    "enumerate_maximal",
    "intersect",
    "intersection_exponent_linalg",
    "is_maximal",
    "iter_module_vectors",
    "lifts",
    "project",
    "sum_and_quotient",
    "FpSubspace",
    "MaximalIsotropic",
    "SpaceElement",
    "SpaceShape",
    "enumerate_maximal_isotropic",
    "gram_matrix",
    "isotropic_diagnostics",
    "t_action_matrix",
    "MonteCarloResult",
    "PairSample",
    "ProbabilityModel",
    "PushforwardReport",
    "RngSpec",
    "TowerReport",
    "chi_square_uniformity",
    "collision_probability_census",
    "collision_probability_exact",
    "intersection_bound",
    "monte_carlo",
    "pushforward_consistency",
    "sample_maximal",
    "sample_pair",
    "tower_experiment",
]
