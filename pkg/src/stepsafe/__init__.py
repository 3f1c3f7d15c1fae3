"""stepsafe: concavifier estimation and safe fixed step sizes for gradient descent."""

from .descent import DescentConfig, DescentTrace, gd_step, load_trace, run_descent, save_trace
from .eigenbounds import (
    EigenResult,
    SymMatrix,
    brauer_cassini_upper,
    gershgorin_upper,
    kron_allones_structure_lambda,
    power_iteration,
    sym_matrix,
)
from .errors import (
    DegeneratePairError,
    InvalidInputError,
    NumericalFailureError,
    UnsupportedOperationError,
)
from .objectives import (
    BoxDomain,
    ConcavifierEstimate,
    ObjectiveFunction,
    QuadraticCheck,
    central_difference_gradient,
    estimate_concavifier_hessian,
    estimate_concavifier_midpoint,
    linear_objective,
    midpoint_acceleration,
    quadratic_objective,
    upper_quadratic_check,
)
from .relu import (
    BoundReport,
    NetConfig,
    ReluDataset,
    Weights,
    a_vector,
    abar_vector,
    allactive_gram_matrix,
    alpha_oracle,
    alpha_single_point,
    bound_alpha1,
    bound_alpha2,
    bound_alpha3,
    bound_alpha4,
    compute_bound_report,
    forward,
    forward_all,
    generate_dataset,
    gradient,
    initial_weights,
    load_dataset,
    loss,
    loss_hessian_matrix,
    loss_objective,
    near_kink,
    save_dataset,
    second_moment_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
