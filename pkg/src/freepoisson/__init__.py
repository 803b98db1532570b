"""Computational free probability around the free Poisson family.

The package covers: non-crossing set partitions and their Mobius
function; moment/free-cumulant transforms (exact rational or float);
free Poisson and compound free Poisson laws with a cumulant-based
classifier; triangular-array convergence tables; free Poisson process
increments, covariance kernels, and the Karhunen-Loeve eigensystem;
cumulants of stochastic integrals of step functions with mesh-refinement
evaluation for piecewise-polynomial integrands; and Wishart-based
random-matrix simulations that reproduce the analytic predictions.
"""
from .cumulants import (
    CumulantSequence,
    MomentSequence,
    WordMomentOracle,
    cumulants_to_moments,
    free_convolve,
    max_mixed_cumulant,
    moments_to_cumulants,
    multivariate_cumulant,
)
from .distributions import (
    AtomicMeasure,
    CompoundFreePoisson,
    FreeBernoulli,
    FreePoisson,
    NotFreePoisson,
    PointMass,
    Semicircle,
    classify_free_poisson,
    cumulant_sequence,
    distribution_from_jsonable,
    distribution_to_jsonable,
    moment_sequence,
)
from .errors import RefinementError, ResourceLimitError, SchemaError
from .integration import (
    Interval,
    PiecewisePoly,
    StepFunction,
    approximate,
    centered_integrate_step,
    centered_l1_bound,
    centered_l2_norm,
    centered_l2_norm_squared,
    integral_cumulants,
    integrate_step,
    l2_moment_bound,
    truncation_tail,
)
from .limits import (
    TriangularArraySpec,
    convergence_table,
    joint_mixed_cumulant,
    row_cell_moments,
    row_sum_cumulants,
)
from .ncpart import SetPartition, catalan, enumerate_noncrossing, is_noncrossing, mobius
from .processes import (
    KLEigenSystem,
    ProcessSpec,
    covariance_kernel,
    eigenfunction_inner_product,
    eigenrelation_residual,
    increment_cumulants,
    kl_coefficient_covariance,
    kl_eigensystem,
    mercer_table,
    mercer_truncation_error,
    process_from_jsonable,
    process_to_jsonable,
    sum_processes,
)
from .rmt import (
    EnsembleConfig,
    MatrixSample,
    averaged_step_moments,
    check_l1_contraction,
    check_positivity_order,
    empirical_moments,
    haar_conjugate,
    sample_free_poisson,
    simulate_step_integral,
    step_integral_report,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "CompoundFreePoisson",
    "CumulantSequence",
    "EnsembleConfig",
    "FreeBernoulli",
    "FreePoisson",
    "Interval",
    "KLEigenSystem",
    "MatrixSample",
    "MomentSequence",
    "NotFreePoisson",
    "PiecewisePoly",
    "PointMass",
    "ProcessSpec",
    "RefinementError",
    "ResourceLimitError",
    "SchemaError",
    "Semicircle",
    "SetPartition",
    "StepFunction",
    "TriangularArraySpec",
    "WordMomentOracle",
    "approximate",
    "averaged_step_moments",
    "catalan",
    "centered_integrate_step",
    "centered_l1_bound",
    "centered_l2_norm",
    "centered_l2_norm_squared",
    "check_l1_contraction",
    "check_positivity_order",
    "classify_free_poisson",
    "convergence_table",
    "covariance_kernel",
    "cumulant_sequence",
    "cumulants_to_moments",
    "distribution_from_jsonable",
    "distribution_to_jsonable",
    "eigenfunction_inner_product",
    "eigenrelation_residual",
    "empirical_moments",
    "enumerate_noncrossing",
    "free_convolve",
    "haar_conjugate",
    "increment_cumulants",
    "integral_cumulants",
    "integrate_step",
    "is_noncrossing",
    "joint_mixed_cumulant",
    "kl_coefficient_covariance",
    "kl_eigensystem",
    "l2_moment_bound",
    "max_mixed_cumulant",
    "mercer_table",
    "mercer_truncation_error",
    "mobius",
    "moment_sequence",
    "moments_to_cumulants",
    "multivariate_cumulant",
    "process_from_jsonable",
    "process_to_jsonable",
    "row_cell_moments",
    "row_sum_cumulants",
    "sample_free_poisson",
    "simulate_step_integral",
    "step_integral_report",
    "sum_processes",
    "truncation_tail",
]
