"""polykin: stochastic kinetics of a polyatomic gas with continuous internal energy.

A space-homogeneous particle solver for a single polyatomic gas whose
molecules carry a continuous internal energy, together with numerical
verification of the moment, entropy and kernel estimates that underpin it
and a parameter pipeline linking the collision kernel to measured
transport coefficients.
"""

from .backend import BACKEND
from .constants import K_B, K_B_NONDIM
from .core import (
    Ensemble,
    MaxwellianParams,
    Particle,
    Species,
    conserved_totals,
    l1_moment,
    lebesgue_bracket,
    maxwellian_bracket_moment,
    maxwellian_density,
    maxwellian_entropy,
    sample_maxwellian,
)
from .kernel import (
    KernelParams,
    PairState,
    d_alpha_mass,
    d_alpha_weight,
    evaluate_frozen_kernel,
    evaluate_physical_kernel,
    kappa_bounds,
    kappa_ub_closed_form,
    pair_rate_frozen,
    pair_rate_physical,
    rho_q,
    sandwich_bounds,
)
from .collision import (
    apply_exchange_collision,
    apply_frozen_collision,
    collide,
    sample_exchange_parameters,
)
from .dsmc import (
    MajorantViolation,
    NumericalAbort,
    SolverConfig,
    majorant_rate,
    relaxation_rates,
    run,
    step,
    suggest_dt,
)
from .diagnostics import (
    AveragingReport,
    averaging_operator_Sk,
    averaging_report,
    empirical_Ck,
    empirical_entropy,
    energy_identity_check,
    equilibrium_pvalues,
    mann_kendall,
)
from .transport import (
    GasSpec,
    TransportDataset,
    alpha_from_cv,
    feasible_p_range,
    fit_power_law,
    load_tables,
    prandtl_from_measurements,
    reproduce_tables,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "K_B",
    "K_B_NONDIM",
    "Particle",
    "Species",
    "Ensemble",
    "MaxwellianParams",
    "lebesgue_bracket",
    "l1_moment",
    "conserved_totals",
    "maxwellian_density",
    "maxwellian_entropy",
    "maxwellian_bracket_moment",
    "sample_maxwellian",
    "KernelParams",
    "PairState",
    "d_alpha_weight",
    "d_alpha_mass",
    "evaluate_physical_kernel",
    "evaluate_frozen_kernel",
    "pair_rate_physical",
    "pair_rate_frozen",
    "sandwich_bounds",
    "kappa_bounds",
    "kappa_ub_closed_form",
    "rho_q",
    "apply_exchange_collision",
    "apply_frozen_collision",
    "sample_exchange_parameters",
    "collide",
    "SolverConfig",
    "MajorantViolation",
    "NumericalAbort",
    "majorant_rate",
    "suggest_dt",
    "step",
    "run",
    "relaxation_rates",
    "AveragingReport",
    "empirical_entropy",
    "energy_identity_check",
    "averaging_operator_Sk",
    "empirical_Ck",
    "averaging_report",
    "mann_kendall",
    "equilibrium_pvalues",
    "GasSpec",
    "TransportDataset",
    "alpha_from_cv",
    "fit_power_law",
    "prandtl_from_measurements",
    "feasible_p_range",
    "load_tables",
    "reproduce_tables",
    "__version__",
]
