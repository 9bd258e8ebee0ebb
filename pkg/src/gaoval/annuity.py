"""Life-annuity factors, the implicit guaranteed rate, and fixed-term
annuity-certain factors for the monthly-equivalent auxiliary problem."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    BracketingError,
    NoSolutionError,
    NumericalFailure,
    ValidationError,
)
from .mortality import MortalityModel
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    RootSpec,
    find_root_bracketed,
    integrate_semi_infinite,
)

__all__ = [
    "ConversionTerms",
    "DiscreteRate",
    "MonthlyEquivalents",
    "annuity_factor",
    "implicit_rate",
    "monthly_rate",
    "annuity_certain_pv",
    "annuity_certain_fv",
    "monthly_equivalents",
]


@dataclass(frozen=True)
class ConversionTerms:
    """Guaranteed conversion rate h and the income it buys on a fund A."""

    h: float
    fund: float

    def __post_init__(self):
        if self.h <= 0:
            raise ValidationError("conversion rate h must be positive")

    @property
    def income(self) -> float:
        """Annuity income rate H = A * h (currency / year)."""
        return self.fund * self.h


@dataclass(frozen=True)
class DiscreteRate:
    """Effective per-period rate with its compounding frequency."""

    i: float
    periods_per_year: int = 12

    def __post_init__(self):
        if self.i <= -1:
            raise ValidationError("per-period rate must exceed -1")


class MonthlyEquivalents(NamedTuple):
    p12: float
    l12: float


def annuity_factor(
    model: MortalityModel,
    age: float,
    rate: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Expected present value of a continuous unit-rate life annuity.

    Integrates exp(-rate*t) * survival(age, t) over t >= 0 by
    quadrature, for any survival law (a Gompertz closed form exists but
    a single integration path serves table-backed models too).  The
    integrand is evaluated in log space so that negative rates do not
    overflow where the survival factor has already underflowed; a
    genuinely divergent integral raises NumericalFailure.
    """

    def integrand(t: float) -> float:
        s = model.survival_probability(age, t)
        if s == 0.0:
            return 0.0
        return math.exp(-rate * t + math.log(s))

    try:
        return integrate_semi_infinite(integrand, quad)
    except OverflowError as exc:
        raise NumericalFailure(
            f"life-annuity integral diverges at rate {rate:.6g}"
        ) from exc


def implicit_rate(
    model: MortalityModel,
    age: float,
    h: float,
    tol: float = 1e-12,
    bracket: tuple[float, float] = (-0.5, 1.0),
) -> float:
    """Discount rate at which the guaranteed conversion is actuarially fair.

    Solves annuity_factor(model, age, r) = 1/h for r.  The annuity
    factor is strictly decreasing in the rate, so the default bracket is
    safe for realistic conversion rates; an unattainable 1/h raises
    NoSolutionError.
    """
    if h <= 0:
        raise ValidationError("conversion rate h must be positive")
    target = 1.0 / h

    def gap(r: float) -> float:
        return annuity_factor(model, age, r) - target

    lo, hi = bracket
    g_hi = gap(hi)  # converges for any survival law at a high rate
    if g_hi == 0.0:
        return hi
    if g_hi > 0.0:
        raise NoSolutionError(
            f"1/h = {target:.6g} is below the annuity factor at rate {hi:g}"
        )
    try:
        if gap(lo) < 0.0:
            raise NoSolutionError(
                f"1/h = {target:.6g} is above the annuity factor everywhere "
                f"on rate bracket [{lo}, {hi}]"
            )
    except NumericalFailure:
        # Divergent at the stated lower end: the factor is unbounded as
        # the rate falls toward minus the minimum hazard, so the target
        # is attainable; bisect to a finite lower end past the root.
        bad, good = lo, hi
        for _ in range(200):
            mid = 0.5 * (bad + good)
            try:
                g_mid = gap(mid)
            except NumericalFailure:
                bad = mid
                continue
            if g_mid >= 0.0:
                lo = mid
                break
            good = mid
        else:
            raise NumericalFailure(
                "could not locate a finite bracket for the implicit rate"
            ) from None
    try:
        return find_root_bracketed(gap, RootSpec(lo, hi, tol))
    except BracketingError as exc:  # pragma: no cover - defensive
        raise NoSolutionError(
            f"1/h = {target:.6g} is outside the annuity-factor range on "
            f"rate bracket [{bracket[0]}, {bracket[1]}]"
        ) from exc


def monthly_rate(r: float) -> DiscreteRate:
    """Effective monthly rate i12 = exp(r/12) - 1 for a continuous rate r."""
    return DiscreteRate(i=math.expm1(r / 12.0), periods_per_year=12)


def annuity_certain_pv(n: int, i: float) -> float:
    """Present value of 1 per period for n periods at per-period rate i."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    if i <= -1:
        raise ValidationError("per-period rate must exceed -1")
    if i == 0:
        return float(n)
    return (1.0 - (1.0 + i) ** (-n)) / i


def annuity_certain_fv(n: int, i: float) -> float:
    """Future value after n periods of 1 per period at per-period rate i."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    if i <= -1:
        raise ValidationError("per-period rate must exceed -1")
    if i == 0:
        return float(n)
    return ((1.0 + i) ** n - 1.0) / i


def monthly_equivalents(
    fund: float,
    l_star: float,
    r: float,
    horizon_years: float,
    mode: str = "table",
) -> MonthlyEquivalents:
    """Monthly payments equivalent to the fund A and the lump sum L*.

    p12 accumulates to the fund over the horizon:  A = p12 * s(n, i12).
    For l12 two conventions exist and they disagree in the reference
    results this package reproduces:

    * ``"table"`` (default): l12 = L* / s(n, i12), the same future-value
      convention as p12; matches the published table of values.
    * ``"text"``: l12 = L* / a(n, i12), the present-value convention
      (amortizing a lump sum paid today).

    Both are kept so either convention can be checked explicitly.
    """
    if fund <= 0:
        raise ValidationError("fund must be positive")
    if l_star < 0:
        raise ValidationError("lump sum must be nonnegative")
    if horizon_years <= 0:
        raise ValidationError("horizon must be positive")
    if mode not in ("table", "text"):
        raise ValidationError(f"unknown l12 mode {mode!r}")
    rate = monthly_rate(r)
    n = int(round(12 * horizon_years))
    s_factor = annuity_certain_fv(n, rate.i)
    p12 = fund / s_factor
    if mode == "table":
        l12 = l_star / s_factor
    else:
        l12 = l_star / annuity_certain_pv(n, rate.i)
    return MonthlyEquivalents(p12=p12, l12=l12)
