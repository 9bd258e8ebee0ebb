"""Closed-form value functions and the indifference price of the
annuity-conversion guarantee.

The policyholder pays a continuous premium P over [t0, T], accumulating
a fund A at the risk-free rate.  At maturity she either withdraws A or,
if a guarantee was bought, converts it at rate h into a lifelong income
H = A*h.  Under CRRA utility with constant market coefficients every
value function collapses to

    (wealth offset)^(1-gamma) * phi(t)^gamma / (1-gamma)

with a single horizon integral phi; the price of embedding the
guarantee is the wealth translation between the two offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .annuity import MonthlyEquivalents, implicit_rate, monthly_equivalents
from .errors import (
    DomainError,
    IllPosedProblemError,
    UnsupportedRegimeError,
    ValidationError,
)
from .mortality import MortalityModel
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate_semi_infinite

__all__ = [
    "MarketParams",
    "Preference",
    "PolicySpec",
    "MertonConstants",
    "ValuationReport",
    "accumulated_funds",
    "premium_for_fund",
    "merton_constants",
    "phi",
    "value_U",
    "value_V",
    "exercise_decision",
    "xi_hat_U",
    "xi_hat_V",
    "value_calU",
    "value_calV",
    "indifference_price",
    "build_report",
]


@dataclass(frozen=True)
class MarketParams:
    """Constant market coefficients: risk-free rate, drift, volatility."""

    r: float
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValidationError("sigma must be positive")


@dataclass(frozen=True)
class Preference:
    """Constant relative risk aversion; gamma = 1 (log utility) excluded."""

    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValidationError("gamma must be positive")
        if self.gamma == 1.0:
            raise ValidationError("gamma = 1 (log utility) is not supported")


@dataclass(frozen=True)
class PolicySpec:
    """Contract terms: age, horizon, guaranteed rate, and P or A.

    Exactly one of ``premium`` (rate/year) and ``fund`` (target A at
    maturity) must be given; the other follows from the accumulation
    identity once the market rate is known, via :meth:`resolve`.
    """

    chi: float
    T: float
    h: float
    premium: float | None = None
    fund: float | None = None
    t0: float = 0.0

    def __post_init__(self):
        if self.T <= self.t0:
            raise ValidationError("maturity T must exceed start time t0")
        if self.h <= 0:
            raise ValidationError("conversion rate h must be positive")
        if self.chi < 0:
            raise ValidationError("age chi must be nonnegative")
        if (self.premium is None) == (self.fund is None):
            raise ValidationError("give exactly one of premium and fund")
        given = self.premium if self.premium is not None else self.fund
        if given <= 0:
            raise ValidationError("premium/fund must be positive")

    def resolve(self, r: float) -> tuple[float, float]:
        """Return (P, A) with the missing one derived at market rate r."""
        horizon = self.T - self.t0
        if self.premium is not None:
            return self.premium, accumulated_funds(self.premium, r, horizon)
        return premium_for_fund(self.fund, r, horizon), self.fund


@dataclass(frozen=True)
class MertonConstants:
    """Risk-adjusted discount constants delta and b (both 1/year)."""

    delta: float
    b: float


@dataclass(frozen=True)
class ValuationReport:
    """Everything the valuation pipeline derives for one scenario."""

    A: float
    P: float
    H: float
    r_h: float
    delta: float
    b: float
    phi_t0: float
    phi_T: float
    x0: float
    calU: float
    calV: float
    L_star: float
    exercise: bool
    worthless: bool
    p12: float
    l12: float

    @property
    def total_monthly(self) -> float:
        return self.p12 + self.l12


def accumulated_funds(P: float, r: float, T: float) -> float:
    """Fund accumulated by a continuous premium P over T years at rate r."""
    if T <= 0:
        raise ValidationError("accumulation horizon must be positive")
    if r == 0:
        return P * T
    return P * math.expm1(r * T) / r


def premium_for_fund(A: float, r: float, T: float) -> float:
    """Continuous premium rate that accumulates to A over T years."""
    if T <= 0:
        raise ValidationError("accumulation horizon must be positive")
    if r == 0:
        return A / T
    return A * r / math.expm1(r * T)


def merton_constants(market: MarketParams, pref: Preference) -> MertonConstants:
    """Compute delta = r + (mu-r)^2 / (2 gamma sigma^2) and b.

    Well-posedness requires r > (1-gamma) * delta; otherwise the
    infinite-horizon value diverges and IllPosedProblemError is raised.
    """
    gamma = pref.gamma
    delta = market.r + (market.mu - market.r) ** 2 / (2.0 * gamma * market.sigma**2)
    if market.r <= (1.0 - gamma) * delta:
        raise IllPosedProblemError(
            f"ill-posed: r = {market.r:.6g} <= (1-gamma)*delta = "
            f"{(1.0 - gamma) * delta:.6g}"
        )
    b = -((1.0 - gamma) * delta - market.r) / gamma
    return MertonConstants(delta=delta, b=b)


def phi(
    model: MortalityModel,
    age: float,
    b: float,
    survival_power: float = 1.0,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Horizon integral of discounted survival from ``age``:

        phi = integral_0^inf exp(-b*tau) * survival(age, tau)**p dtau

    With the default p = 1 this is the factor scaling all value
    functions.  ``survival_power`` = 1/gamma gives the risk-adjusted
    variant used by the stochastic-control verification (see the
    simulate module).  For b > 0 the value lies in (0, 1/b).
    """
    if survival_power <= 0:
        raise ValidationError("survival_power must be positive")
    try:
        return integrate_semi_infinite(
            lambda tau: math.exp(-b * tau)
            * model.survival_probability(age, tau) ** survival_power,
            quad,
        )
    except OverflowError as exc:
        raise IllPosedProblemError(f"phi integral diverges at b = {b:.6g}") from exc


def _crra_value(wealth: float, phi_t: float, gamma: float) -> float:
    if wealth <= 0:
        raise DomainError(f"effective wealth must be positive, got {wealth:.6g}")
    return wealth ** (1.0 - gamma) / (1.0 - gamma) * phi_t**gamma


def value_U(x: float, A: float, phi_T: float, gamma: float) -> float:
    """Maturity value when the fund A is withdrawn: wealth x + A."""
    return _crra_value(x + A, phi_T, gamma)


def value_V(x: float, H: float, r: float, phi_T: float, gamma: float) -> float:
    """Maturity value when converting: wealth x plus annuity worth H/r."""
    if r <= 0:
        raise UnsupportedRegimeError(
            "annuity capitalization H/r requires a positive interest rate"
        )
    return _crra_value(x + H / r, phi_T, gamma)


def exercise_decision(r: float, h: float) -> bool:
    """Convert at maturity iff the guaranteed rate is at least the market
    rate (ties go to exercise; the option is then worth exactly zero)."""
    return r <= h


def xi_hat_U(t: float, P: float, r: float, T: float, A: float) -> float:
    """Wealth offset of the no-guarantee problem at time t <= T."""
    if t > T:
        raise DomainError("t must not exceed maturity T")
    if r == 0:
        return P * (T - t) - A
    disc = math.exp(r * (t - T))
    return P / r * (1.0 - disc) - A * disc


def xi_hat_V(t: float, P: float, r: float, T: float, H: float) -> float:
    """Wealth offset of the with-guarantee problem at time t <= T."""
    if t > T:
        raise DomainError("t must not exceed maturity T")
    if r <= 0:
        raise UnsupportedRegimeError("xi_hat_V requires a positive interest rate")
    disc = math.exp(r * (t - T))
    return P / r * (1.0 - disc) - (H / r) * disc


def value_calU(
    x0: float,
    t0: float,
    policy: PolicySpec,
    market: MarketParams,
    pref: Preference,
    model: MortalityModel,
) -> float:
    """Initial-time value of the plan without the conversion guarantee."""
    constants = merton_constants(market, pref)
    P, A = policy.resolve(market.r)
    offset = xi_hat_U(t0, P, market.r, policy.T, A)
    phi_t0 = phi(model, policy.chi + (t0 - policy.t0), constants.b)
    return _crra_value(x0 - offset, phi_t0, pref.gamma)


def value_calV(
    x0: float,
    L0: float,
    t0: float,
    policy: PolicySpec,
    market: MarketParams,
    pref: Preference,
    model: MortalityModel,
) -> float:
    """Initial-time value with the guarantee, after paying the lump sum L0.

    For r >= h the guarantee is never exercised and the value collapses
    to the no-guarantee one evaluated at x0 - L0.
    """
    wealth = x0 - L0
    if market.r >= policy.h:
        return value_calU(wealth, t0, policy, market, pref, model)
    constants = merton_constants(market, pref)
    P, A = policy.resolve(market.r)
    offset = xi_hat_V(t0, P, market.r, policy.T, A * policy.h)
    phi_t0 = phi(model, policy.chi + (t0 - policy.t0), constants.b)
    return _crra_value(wealth - offset, phi_t0, pref.gamma)


def indifference_price(A: float, h: float, r: float, T: float, t0: float = 0.0) -> float:
    """Largest lump sum worth paying at t0 for the conversion guarantee:

        L* = (A*h/r - A) * exp(-r*(T - t0)),  clamped at zero.

    Strictly positive iff h > r; for r >= h a rational buyer pays
    nothing (the guarantee is worthless).
    """
    if r <= 0:
        raise UnsupportedRegimeError(
            "indifference price requires a positive interest rate"
        )
    if T <= t0:
        raise ValidationError("maturity T must exceed t0")
    raw = (A * h / r - A) * math.exp(-r * (T - t0))
    return max(0.0, raw)


def build_report(
    policy: PolicySpec,
    market: MarketParams,
    pref: Preference,
    subjective: MortalityModel,
    objective: MortalityModel,
    x0: float | None = None,
    l12_mode: str = "table",
) -> ValuationReport:
    """Run the full valuation pipeline for one scenario.

    The subjective model drives phi (the policyholder's horizon);
    the objective model prices the annuity and the implicit rate.
    calU/calV are reported at the reference initial wealth ``x0``
    (default: the fund A), with calV evaluated at L0 = 0 so the pair
    shows the gross utility gain from holding the guarantee.
    """
    constants = merton_constants(market, pref)
    P, A = policy.resolve(market.r)
    H = A * policy.h
    age_T = policy.chi + (policy.T - policy.t0)
    r_h = implicit_rate(objective, age_T, policy.h)
    phi_t0 = phi(subjective, policy.chi, constants.b)
    phi_T = phi(subjective, age_T, constants.b)
    L_star = indifference_price(A, policy.h, market.r, policy.T, policy.t0)
    if x0 is None:
        x0 = A
    calU = value_calU(x0, policy.t0, policy, market, pref, subjective)
    calV = value_calV(x0, 0.0, policy.t0, policy, market, pref, subjective)
    monthly: MonthlyEquivalents = monthly_equivalents(
        A, L_star, market.r, policy.T - policy.t0, mode=l12_mode
    )
    return ValuationReport(
        A=A,
        P=P,
        H=H,
        r_h=r_h,
        delta=constants.delta,
        b=constants.b,
        phi_t0=phi_t0,
        phi_T=phi_T,
        x0=x0,
        calU=calU,
        calV=calV,
        L_star=L_star,
        exercise=exercise_decision(market.r, policy.h),
        worthless=market.r >= policy.h,
        p12=monthly.p12,
        l12=monthly.l12,
    )
