"""The outside-option model: valuation, identification, and inverse construction.

Facing a sure alternative worth ``v(x)`` and a random outside option of value
``K ~ F`` (``K = -inf`` when unavailable), the decision maker ends with
``max(v(x), K)``; the effective risk attitude is ``u = chi(v)`` up to a positive
affine transformation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from risklens.core_numeric import TOL_EXACT, PiecewiseLinearFn, SetDescriptor
from risklens.distributions import ExtendedCDF, StepFn, chi_eval, concentrated_on
from risklens.errors import DomainError, NumericalFailure
from risklens.preferences import RiskAttitude, construct_phi_greatest


@dataclass(frozen=True)
class OORepresentation:
    """``alpha * u + beta = chi(v)`` with chi the valuation transform of F."""

    v: RiskAttitude
    F: ExtendedCDF
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError("alpha must be a positive real")
        if not math.isfinite(self.beta):
            raise DomainError("beta must be finite")


def effective_utility(v: RiskAttitude, F: ExtendedCDF) -> RiskAttitude:
    """``u(x) = E[max(v(x), K)]`` in the gauge ``alpha = 1, beta = 0``."""
    return v.with_values(np.atleast_1d(chi_eval(F, v.array)))


def exercise_probability(v: RiskAttitude, F: ExtendedCDF) -> np.ndarray:
    """Probability ``F(v(x))`` that the inside alternative is kept."""
    return np.atleast_1d(F(v.array))


@dataclass(frozen=True)
class Identification:
    F: ExtendedCDF
    alpha: float
    beta: float
    lam: float
    phi: PiecewiseLinearFn


def identify_F(u: RiskAttitude, v: RiskAttitude, tol: float = TOL_EXACT) -> Identification:
    """Outside-option distribution that turns ``v`` into ``u``.

    Slopes ``s_0 < ... `` of the greatest convex transform ``phi`` with
    ``u = phi(v)`` give ``F = s_i / lam`` on the ``i``-th gap of ``v``'s image,
    with ``lam`` the last slope.  Mass below ``min v`` cannot be located and
    sits at minus infinity; F reaches one below ``max v``.
    """
    if u.is_constant:
        raise DomainError("u is constant: no positive scale fits")
    phi = construct_phi_greatest(u, v, tol)
    slopes = phi.slopes
    lam = float(slopes[-1])
    if not lam > 0:
        raise NumericalFailure("non-positive final slope")
    # running max absorbs slope dips that the cross-ratio tolerance lets through
    cdf = np.minimum(np.maximum.accumulate(slopes / lam), 1.0)
    F = ExtendedCDF.from_step(StepFn(float(cdf[0]), tuple(phi.xs[1:-1]), tuple(cdf[1:])))
    alpha = 1.0 / lam
    w0 = phi.xs[0]
    beta = float(chi_eval(F, w0)) - alpha * phi.ys[0]
    return Identification(F, alpha, beta, lam, phi)


def is_concentrated_on_image(F: ExtendedCDF, v: RiskAttitude) -> bool:
    return concentrated_on(F, v.image().closure(), allow_neg_inf=True)


@dataclass(frozen=True)
class Fit:
    alpha: float
    beta: float
    residual: float


def fit_representation(u: RiskAttitude, rep: OORepresentation) -> Fit | None:
    """Fit ``alpha, beta`` on the alternatives extreme in ``u``; None if no positive fit exists."""
    if u.alternatives != rep.v.alternatives:
        raise DomainError("u and the representation live on different alternatives")
    target = np.atleast_1d(chi_eval(rep.F, rep.v.array))
    ua = u.array
    lo, hi = int(np.argmin(ua)), int(np.argmax(ua))
    if ua[hi] == ua[lo]:
        spread = float(target.max() - target.min())
        return Fit(1.0, float(target[0] - ua[0]), spread)
    alpha = (target[hi] - target[lo]) / (ua[hi] - ua[lo])
    if not alpha > 0:
        return None
    beta = target[lo] - alpha * ua[lo]
    return Fit(float(alpha), float(beta), float(np.max(np.abs(alpha * ua + beta - target))))


def verify_representation(u: RiskAttitude, rep: OORepresentation, tol: float = TOL_EXACT) -> bool:
    fit = fit_representation(u, rep)
    return fit is not None and fit.residual <= tol


def _positive_region_start(F: ExtendedCDF) -> float:
    """Left end of ``{k : F(k) > 0}``; minus infinity when F has mass there."""
    if F.neg_inf_mass > 0:
        return -math.inf
    starts = [a.at for a in F.atoms] + [p.lo for p in F.uniform]
    return min(starts)


def construct_v_prop2(u: RiskAttitude, F: ExtendedCDF) -> RiskAttitude:
    """True risk attitude ``v`` with ``chi(v) = u + const``, given the outside option F.

    With ``phi = chi + beta`` strictly increasing on ``J = {F > 0}``, each
    utility is inverted numerically.  When F has no mass at minus infinity the
    shift ``beta = min u - chi(inf J) - 1`` puts every target strictly inside
    ``phi(J)``.
    """
    j0 = _positive_region_start(F)
    if math.isinf(j0):
        beta = 0.0
    else:
        beta = min(u.values) - float(chi_eval(F, j0)) - 1.0
    values = []
    for target in u.values:
        goal = target - beta

        def gap(ell, goal=goal):
            return float(chi_eval(F, ell)) - goal

        lo = j0 if math.isfinite(j0) else min(-1.0, goal)
        width = 1.0
        while gap(lo) > 0:
            lo -= width
            width *= 2
            if not math.isfinite(lo):
                raise NumericalFailure("could not bracket the inverse from below")
        hi = max(lo + 1.0, abs(goal) + 1.0)
        width = 1.0
        while gap(hi) < 0:
            hi += width
            width *= 2
            if not math.isfinite(hi):
                raise NumericalFailure("could not bracket the inverse from above")
        if gap(lo) == 0:
            values.append(lo)
            continue
        root = brentq(gap, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
        values.append(float(root))
    return u.with_values(values)


def primitive_representation(u: RiskAttitude, F: ExtendedCDF) -> OORepresentation:
    """Package :func:`construct_v_prop2` output with its exact affine constants."""
    v = construct_v_prop2(u, F)
    fit = fit_representation(u, OORepresentation(v, F))
    if fit is None:
        raise NumericalFailure("constructed v does not represent u")
    return OORepresentation(v, F, fit.alpha, fit.beta)


def image_hull(v: RiskAttitude) -> SetDescriptor:
    return v.image().co()
