"""Generative coupon-collector model of technology-aided discovery.

An explorer knows a subset of a finite universe of elements. Each step a
supporting technology examines an element drawn from a prior and reports a
noisy estimate of its identity; the estimate joins the known set if it is
new. The package provides closed-form expected size and quality curves, a
seeded Monte Carlo simulator of the same process, and growth-curve fitting
that links the model to logistic discovery curves.
"""
from .analytic import (
    ExpectationCurve,
    asymptotic_rate,
    expected_fraction_uniform,
    expected_quality,
    expected_quality_alternating,
    expected_remaining,
    expected_size,
    expected_size_alternating,
    quality_prevalence,
    remaining_fraction_uniform,
)
from .channels import (
    EstimateChannel,
    ObservationModel,
    effective_pmf,
    explicit_channel,
    map_induced_channel,
    symmetric_channel,
)
from .errors import (
    DegenerateSeriesError,
    DiscoveryError,
    DomainError,
    InsufficientDataError,
    ParameterDomainError,
    UnsupportedModelError,
    UnsupportedRangeError,
    ValidationError,
)
from .fit import GrowthFit, ImpliedParameters, fit_growth, implied_model_parameters, log_linear_rate_estimate
from .model import (
    KnownSet,
    Pmf,
    QualityVector,
    Universe,
    known_set_quality,
    make_binomial_prior,
    make_explicit_prior,
    make_uniform_prior,
)
from .simulate import (
    SimulationConfig,
    Trajectory,
    TrajectoryStats,
    sample_categorical,
    simulate_ensemble,
    simulate_run,
)

__version__ = "0.1.0"
