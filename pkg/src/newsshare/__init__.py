"""Logistic model of political-news sharing and the propagation-maximization,
fitting and sensitivity analyses built on it."""

__version__ = "0.1.0"

from .errors import DataError, FitError, ValidationError
from .model import (
    BASE_PARAMS,
    BELIEF_CENTERS,
    DISTRIBUTION_NAMES,
    GROUPS,
    Article,
    BeliefDistribution,
    ModelParams,
    ReaderBelief,
    builtin_distribution,
    distribution_moments,
    population_sharing_probability,
    sharing_probability,
)
from .optimizer import (
    OptimizationResult,
    optimize_fixed_truth,
    optimize_population,
    optimize_population_fixed_truth,
    optimize_single_reader_closed_form,
    sweep_moment_space,
)
from .fitting import (
    FitReport,
    Observation,
    fit_extreme_user_model,
    fit_parameters,
    validate_assumptions,
)
from .data import (
    DomainRecord,
    belief_center,
    build_observations,
    truthfulness_category,
    truthfulness_score,
)
