"""Symmetrized Jacobi expansions: basis, kernels, operators, and estimate checks."""

from .basis import (
    analyze,
    delta_apply,
    delta_star_apply,
    eval_phi,
    phi_table,
    sym_eigenvalue,
    synthesize,
)
from .core import (
    JacobiParams,
    SpectrumEntry,
    eigenvalue,
    eval_jacobi,
    eval_trig_poly,
    eval_trig_poly_deriv,
    jacobi_operator_apply,
    norm_const,
    spectrum,
    total_mass,
    trig_poly_table,
)
from .estimates import (
    EstimateReport,
    HarnessConfig,
    LadderResult,
    WeightSpec,
    ap_constant,
    ap_member,
    check_gradient,
    check_growth,
    check_smoothness,
    exact_lemma_report,
    ladder_verdict,
    lemma_samplers,
    run_ladder,
    run_standard_ladders,
)
from .kernels import (
    poisson_kernel_dk,
    poisson_kernel_dk_auto,
    poisson_kernel_series,
    semigroup_mass,
    symmetrized_kernel,
    tilde_kernel,
)
from .operators import (
    AtomicMultiplier,
    LaplaceMultiplier,
    fractional_atoms,
    gfun_apply,
    gfun_bound,
    gfun_norm,
    maximal_apply,
    multiplier_apply,
    riesz_apply,
    semigroup_apply,
)
from .quadrature import (
    QuadratureRule,
    ball_measure,
    gauss_jacobi_rule,
    mu_full_rule,
    mu_plus_rule,
    pi_rule,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMultiplier",
    "EstimateReport",
    "HarnessConfig",
    "JacobiParams",
    "LadderResult",
    "LaplaceMultiplier",
    "QuadratureRule",
    "SpectrumEntry",
    "WeightSpec",
    "analyze",
    "ap_constant",
    "ap_member",
    "ball_measure",
    "check_gradient",
    "check_growth",
    "check_smoothness",
    "delta_apply",
    "delta_star_apply",
    "eigenvalue",
    "eval_jacobi",
    "eval_phi",
    "eval_trig_poly",
    "eval_trig_poly_deriv",
    "exact_lemma_report",
    "fractional_atoms",
    "gauss_jacobi_rule",
    "gfun_apply",
    "gfun_bound",
    "gfun_norm",
    "jacobi_operator_apply",
    "ladder_verdict",
    "lemma_samplers",
    "maximal_apply",
    "mu_full_rule",
    "mu_plus_rule",
    "multiplier_apply",
    "norm_const",
    "phi_table",
    "pi_rule",
    "poisson_kernel_dk",
    "poisson_kernel_dk_auto",
    "poisson_kernel_series",
    "riesz_apply",
    "run_ladder",
    "run_standard_ladders",
    "semigroup_apply",
    "semigroup_mass",
    "spectrum",
    "sym_eigenvalue",
    "symmetrized_kernel",
    "synthesize",
    "tilde_kernel",
    "total_mass",
    "trig_poly_table",
    "__version__",
]
