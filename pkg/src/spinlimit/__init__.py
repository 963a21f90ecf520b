"""Exact SU(2) coupling coefficients and the large-spin sums S_n and D[k, n]."""

from .asymptotics import (
    ApproxErrorRow,
    RiemannNodes,
    approx_error_scan,
    gamma_integral,
    gaussian_weight,
    riemann_dk0,
    riemann_nodes,
)
from .coupling import (
    CGQuery,
    ReducedFamily,
    cg,
    check_m_recurrence,
    descend_from_stretched,
    reduced_family,
    stretched_weighted,
    wigner3j,
    zero_projection_cg,
)
from .exact import (
    HalfInt,
    ParityError,
    RangeError,
    SqrtRational,
    factorial,
    sqrt_rational_to_float,
)
from .moyal import (
    FiniteDTable,
    InsufficientTableError,
    LimitDTable,
    StudyReport,
    convergence_study,
    d_finite,
    induction_solve,
    limit_table,
    s_partial,
    t_values,
    verify_finite_recurrence,
    verify_sum_rule,
)

__version__ = "0.1.0"
