"""Generic numerical kernels used by the rest of the package.

Three operations: quadrature over [0, inf) for integrands dominated by a
discounted survival factor, bracketed scalar root finding, and
derivative-free minimization of a two-parameter loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import BracketingError, NumericalFailure, ValidationError

__all__ = [
    "QuadratureSpec",
    "RootSpec",
    "DEFAULT_QUADRATURE",
    "DEFAULT_ROOT",
    "integrate_semi_infinite",
    "find_root_bracketed",
    "minimize_loss_2d",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and split point for semi-infinite quadrature.

    ``horizon`` marks where the integrand is expected to be effectively
    dead (survival-weighted integrands underflow double-exponentially);
    the tail beyond it is still integrated, through a variable transform,
    so slowly decaying integrands lose nothing.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    horizon: float = 90.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValidationError("quadrature tolerances must be positive")
        if self.horizon <= 0:
            raise ValidationError("quadrature horizon must be positive")


@dataclass(frozen=True)
class RootSpec:
    """Bracket and tolerance for scalar root finding."""

    lo: float = -0.5
    hi: float = 1.0
    tol: float = 1e-12

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValidationError("root bracket must satisfy lo < hi")
        if self.tol <= 0:
            raise ValidationError("root tolerance must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()
DEFAULT_ROOT = RootSpec()

_QUAD_SLACK = 50.0  # QUADPACK abserr is an estimate; allow it some headroom


def integrate_semi_infinite(
    integrand: Callable[[float], float],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Integrate ``integrand`` over [0, inf).

    The integrand must be nonnegative and decay to zero beyond the
    spec's horizon.  Adaptive Gauss-Kronrod panels are used on
    [0, horizon] and, after a transform, on [horizon, inf).
    """
    pieces = []
    err = 0.0
    for lo, hi in ((0.0, spec.horizon), (spec.horizon, np.inf)):
        out = integrate.quad(
            integrand,
            lo,
            hi,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=200,
            full_output=1,
        )
        if len(out) > 3:
            raise NumericalFailure(
                f"quadrature did not converge on [{lo}, {hi}]: {out[3]}",
                last_estimate=out[0],
            )
        pieces.append(out[0])
        err += out[1]
    total = math.fsum(pieces)
    if err > _QUAD_SLACK * max(spec.abs_tol, spec.rel_tol * abs(total)):
        raise NumericalFailure(
            f"quadrature error estimate {err:.3e} exceeds requested tolerance",
            last_estimate=total,
        )
    return total


def find_root_bracketed(
    g: Callable[[float], float],
    spec: RootSpec = DEFAULT_ROOT,
) -> float:
    """Return x in [lo, hi] with g(x) = 0 (Brent's method).

    Raises BracketingError when g(lo) and g(hi) share a sign, and
    NumericalFailure when the iteration cap is hit.
    """
    g_lo = g(spec.lo)
    g_hi = g(spec.hi)
    if g_lo == 0.0:
        return spec.lo
    if g_hi == 0.0:
        return spec.hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketingError(
            f"no sign change on [{spec.lo}, {spec.hi}]: "
            f"g(lo)={g_lo:.6g}, g(hi)={g_hi:.6g}"
        )
    try:
        root, result = optimize.brentq(
            g, spec.lo, spec.hi, xtol=spec.tol, rtol=4 * np.finfo(float).eps,
            maxiter=200, full_output=True,
        )
    except RuntimeError as exc:  # scipy signals non-convergence this way
        raise NumericalFailure(f"root finding did not converge: {exc}") from exc
    if not result.converged:
        raise NumericalFailure(
            "root finding did not converge", last_estimate=root
        )
    return root


def minimize_loss_2d(
    loss: Callable[[float, float], float],
    initial: tuple[float, float],
    tolerance: float = 1e-10,
    max_restarts: int = 4,
) -> tuple[float, float]:
    """Minimize a smooth loss over two real parameters.

    Nelder-Mead simplex descent, restarted from its own result until the
    improvement between restarts falls below ``tolerance``.  The result
    never has higher loss than the initial point.  A loss of +inf at
    probe points is tolerated (treated as a rejected vertex); NaN, or a
    non-finite value at the initial point, raises NumericalFailure.
    """

    def wrapped(p) -> float:
        value = float(loss(p[0], p[1]))
        if math.isnan(value):
            raise NumericalFailure(
                f"loss evaluated to NaN at ({p[0]:.6g}, {p[1]:.6g})"
            )
        return value

    x = np.asarray(initial, dtype=float)
    best = wrapped(x)
    if not math.isfinite(best):
        raise NumericalFailure("loss is not finite at the initial point")
    best_x = x.copy()

    for _ in range(max_restarts):
        res = optimize.minimize(
            wrapped,
            best_x,
            method="Nelder-Mead",
            options={"xatol": tolerance, "fatol": tolerance, "maxiter": 4000},
        )
        if res.fun <= best:
            improvement = best - res.fun
            best = res.fun
            best_x = np.asarray(res.x, dtype=float)
            if improvement <= tolerance:
                break
        else:
            break

    if not math.isfinite(best):
        raise NumericalFailure("minimization diverged to a non-finite loss")
    return (float(best_x[0]), float(best_x[1]))
