"""Weighted Hardy-Littlewood-type kappa inequality toolkit.

Compute ``kappa(w, f) = (int w f'^2)^2 / (int w f^2 * int w f''^2)``, check
the bound ``kappa <= 1`` for concave weights, reproduce its equality cases
and counterexamples, and search for extremal functions.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConcavityError,
    ConfigError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    HypothesisError,
    KappaError,
    ModeError,
    ParameterError,
)
from .funcspace import (  # noqa: E402
    DD,
    DN,
    ND,
    UNIT,
    BoundaryCondition,
    Concavity,
    HalfSineCombination,
    Interval,
    Nonnegativity,
    PiecewisePolynomial,
    SineCombination,
    TestFunction,
    Weight,
    check_admissible,
    check_concave,
    eval_derivatives,
    half_sine,
    random_admissible_function,
    random_concave_weight,
    sine,
)
from .kappa import (  # noqa: E402
    KappaReport,
    compute_kappa,
    epsilon_equivalence_check,
    lemma4_residual,
    make_equality_case,
    parts_identity_residual,
    reflect_even,
    sweep,
    verify_corollary,
    verify_theorem,
)
from .quadrature import (  # noqa: E402
    QuadratureResult,
    integrate_adaptive,
    integrate_poly_exact,
    weighted_product_integral,
)
from .search import KappaMaximizer, assemble_forms, gradient_check, maximize_kappa  # noqa: E402
from .smoothing import SmoothingSchedule, smooth_concave, smoothing_convergence  # noqa: E402
from .witness import (  # noqa: E402
    build_witness,
    kappa_closed_form,
    monotonicity_example,
    paper_coefficients,
    witness_study,
)
