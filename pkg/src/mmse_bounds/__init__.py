"""Provable MMSE lower bounds for binary attributes behind a Gaussian noise
mechanism: empirical two-layer-network / step-function estimators combined
with closed-form Barron-constant bounds and finite-sample concentration."""

from .barron import (
    BarronBoundReport,
    a_d,
    bound_1d,
    bound_1d_log_form,
    bound_1d_sqrt_form,
    bound_1d_three_term,
    bound_dd,
    bound_numeric_route,
    bound_randomization,
    bound_truncation,
    exact_benchmark,
    moment_bounds_overlapping,
    moment_bounds_separated,
)
from .bounds import (
    LowerBoundCertificate,
    ValidityError,
    certify,
    epsilon_identity,
    epsilon_tanh,
    exact_mmse,
)
from .estimator import (
    NetworkParams,
    StepFunction,
    TrainingProtocol,
    brute_force_stepfunctions,
    dp_minimize,
    empirical_loss,
    forward,
    gradient,
    mmse_star_estimate,
    step_loss,
    train_gd,
)
from .mechanism import (
    MechanismConfig,
    PostProcessedLaw,
    apply_mechanism,
    derivative_l1_norms,
    eta_derivative,
    eta_sigma,
    lambdas,
    out_of_range_prob,
    post_processed_law,
    smoothed_density_derivative,
    theta_derivative,
    theta_sigma,
)
from .scenario import (
    ConditionalLaw,
    SampleSet,
    Scenario,
    SupportGeometry,
    make_law,
    margin_mass,
    sample_raw,
    support_geometry,
    triangular_law,
    uniform_law,
)
from .special_math import (
    DEFAULT_QUADRATURE,
    DomainError,
    GaussianKernel,
    QuadratureError,
    QuadratureSpec,
    gamma_function,
    integrate,
    kernel_derivative,
    kernel_derivative_norms,
    q_function,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # special_math
    "DEFAULT_QUADRATURE",
    "DomainError",
    "GaussianKernel",
    "QuadratureError",
    "QuadratureSpec",
    "gamma_function",
    "integrate",
    "kernel_derivative",
    "kernel_derivative_norms",
    "q_function",
    # scenario
    "ConditionalLaw",
    "SampleSet",
    "Scenario",
    "SupportGeometry",
    "make_law",
    "margin_mass",
    "sample_raw",
    "support_geometry",
    "triangular_law",
    "uniform_law",
    # mechanism
    "MechanismConfig",
    "PostProcessedLaw",
    "apply_mechanism",
    "derivative_l1_norms",
    "eta_derivative",
    "eta_sigma",
    "lambdas",
    "out_of_range_prob",
    "post_processed_law",
    "smoothed_density_derivative",
    "theta_derivative",
    "theta_sigma",
    # barron
    "BarronBoundReport",
    "a_d",
    "bound_1d",
    "bound_1d_log_form",
    "bound_1d_sqrt_form",
    "bound_1d_three_term",
    "bound_dd",
    "bound_numeric_route",
    "bound_randomization",
    "bound_truncation",
    "exact_benchmark",
    "moment_bounds_overlapping",
    "moment_bounds_separated",
    # estimator
    "NetworkParams",
    "StepFunction",
    "TrainingProtocol",
    "brute_force_stepfunctions",
    "dp_minimize",
    "empirical_loss",
    "forward",
    "gradient",
    "mmse_star_estimate",
    "step_loss",
    "train_gd",
    # bounds
    "LowerBoundCertificate",
    "ValidityError",
    "certify",
    "epsilon_identity",
    "epsilon_tanh",
    "exact_mmse",
]
