"""Utility-indifference valuation of guaranteed annuity options.

A guaranteed annuity option lets the holder of an accumulation policy
convert the maturity fund into a lifelong annuity at a pre-agreed rate.
This package prices that guarantee from the policyholder's side as the
lump sum that leaves her indifferent between plans with and without it,
under CRRA preferences, constant market coefficients and Gompertz (or
table-backed) mortality, and verifies the closed-form value functions
by Monte Carlo simulation and dynamic-programming residuals.
"""

__version__ = "0.1.0"

from .annuity import (
    annuity_certain_fv,
    annuity_certain_pv,
    annuity_factor,
    implicit_rate,
    monthly_equivalents,
    monthly_rate,
)
from .errors import GaovalError
from .mortality import (
    CANONICAL_GOMPERTZ,
    GompertzModel,
    GompertzParams,
    MortalityTable,
    TabularModel,
    fit_gompertz,
    load_table,
    resolve_model,
)
from .simulate import (
    BACKEND,
    FeedbackPolicy,
    SimConfig,
    estimate_value,
    hjb_residual,
    merton_feedback,
    merton_phi_curve,
    run_verification,
    simulate_wealth_path,
)
from .valuation import (
    MarketParams,
    MertonConstants,
    PolicySpec,
    Preference,
    ValuationReport,
    accumulated_funds,
    build_report,
    exercise_decision,
    indifference_price,
    merton_constants,
    phi,
    premium_for_fund,
    value_U,
    value_V,
    value_calU,
    value_calV,
    xi_hat_U,
    xi_hat_V,
)

__all__ = [
    "__version__",
    "BACKEND",
    "CANONICAL_GOMPERTZ",
    "FeedbackPolicy",
    "GaovalError",
    "GompertzModel",
    "GompertzParams",
    "MarketParams",
    "MertonConstants",
    "MortalityTable",
    "PolicySpec",
    "Preference",
    "SimConfig",
    "TabularModel",
    "ValuationReport",
    "accumulated_funds",
    "annuity_certain_fv",
    "annuity_certain_pv",
    "annuity_factor",
    "build_report",
    "estimate_value",
    "exercise_decision",
    "fit_gompertz",
    "hjb_residual",
    "implicit_rate",
    "indifference_price",
    "load_table",
    "merton_constants",
    "merton_feedback",
    "merton_phi_curve",
    "monthly_equivalents",
    "monthly_rate",
    "phi",
    "premium_for_fund",
    "resolve_model",
    "run_verification",
    "simulate_wealth_path",
    "value_U",
    "value_V",
    "value_calU",
    "value_calV",
    "xi_hat_U",
    "xi_hat_V",
]
