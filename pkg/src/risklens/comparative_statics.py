"""Comparative statics of the outside-option model, and the CARA worked example.

Two verifiers compare the effective risk attitudes induced by two outside
options: one by the reverse hazard rate order on the outside-option CDFs,
one by the true risk attitudes under a fixed physical outside option.  Both
report the two independently computed booleans and whether they agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risklens.core_numeric import TOL_EXACT
from risklens.distributions import ExtendedCDF, concentrated_on, rhr_geq
from risklens.errors import DomainError, NumericalFailure
from risklens.outside_option import effective_utility
from risklens.preferences import RiskAttitude, arrow_pratt_arrays, less_risk_averse_crossratio


@dataclass(frozen=True)
class PhysicalOutsideOption:
    """Probability of no outside option plus probabilities over alternatives."""

    unavailable_mass: float
    option_masses: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        masses = [float(self.unavailable_mass)] + [float(m) for _, m in self.option_masses]
        if any(m < 0 for m in masses):
            raise DomainError("masses must be non-negative")
        if abs(sum(masses) - 1.0) > 1e-12:
            raise DomainError(f"masses sum to {sum(masses)!r}, expected 1")


def induce_F(mu: PhysicalOutsideOption, v: RiskAttitude) -> ExtendedCDF:
    """CDF of the outside option's value ``v(y)``, with minus infinity when unavailable."""
    return ExtendedCDF.from_atoms(((v(y), m) for y, m in mu.option_masses), mu.unavailable_mass)


def _check_outside_option(F: ExtendedCDF, v: RiskAttitude, name: str):
    if not concentrated_on(F, v.image(), allow_neg_inf=True):
        raise DomainError(f"{name} is not concentrated on v(X) and minus infinity")
    if not F(min(v.values)) > 0:
        raise DomainError(f"{name} vanishes above the least value of v")


@dataclass(frozen=True)
class PartAResult:
    lra: bool
    rhr: bool

    @property
    def agree(self) -> bool:
        return self.lra == self.rhr


def mcs_part_a_check(
    v: RiskAttitude, F: ExtendedCDF, F_hat: ExtendedCDF, tol: float = TOL_EXACT
) -> PartAResult:
    """Is ``F_hat`` making the decision maker less risk-averse, and is it RHR-better?"""
    _check_outside_option(F, v, "F")
    _check_outside_option(F_hat, v, "F_hat")
    u = effective_utility(v, F)
    u_hat = effective_utility(v, F_hat)
    K = sorted(set(v.values) - {max(v.values)})
    return PartAResult(
        lra=less_risk_averse_crossratio(u_hat, u, tol),
        rhr=rhr_geq(F, F_hat, K, tol) if K else True,
    )


@dataclass(frozen=True)
class PartBResult:
    lra_u: bool
    lra_v: bool

    @property
    def agree(self) -> bool:
        return self.lra_u == self.lra_v


def mcs_part_b_check(
    v: RiskAttitude,
    v_hat: RiskAttitude,
    mu: PhysicalOutsideOption,
    tol: float = TOL_EXACT,
) -> PartBResult:
    """Same physical outside option, two true risk attitudes: do the effective ones compare alike?"""
    if v.alternatives != v_hat.alternatives:
        raise DomainError("v and v_hat live on different alternatives")
    F = induce_F(mu, v)
    F_hat = induce_F(mu, v_hat)
    _check_outside_option(F, v, "F")
    _check_outside_option(F_hat, v_hat, "F_hat")
    u = effective_utility(v, F)
    u_hat = effective_utility(v_hat, F_hat)
    return PartBResult(
        lra_u=less_risk_averse_crossratio(u_hat, u, tol),
        lra_v=less_risk_averse_crossratio(v_hat, v, tol),
    )


@dataclass(frozen=True)
class CaraSpec:
    """True CARA coefficient ``sigma``, reversed-exponential rate ``lam``, top ``x0``."""

    sigma: float
    lam: float
    x0: float

    def __post_init__(self):
        if not all(math.isfinite(t) for t in (self.sigma, self.lam, self.x0)):
            raise DomainError("CARA parameters must be finite")
        if self.lam < 0:
            raise DomainError("lambda must be non-negative")

    def v(self, x):
        x = np.asarray(x, dtype=float)
        if self.sigma == 0:
            return x
        with np.errstate(over="ignore"):
            return -np.exp(-self.sigma * x)

    def G(self, x):
        return np.minimum(1.0, np.exp(-self.lam * (self.x0 - np.asarray(x, dtype=float))))


def cara_effective_rho(spec: CaraSpec) -> float:
    return spec.sigma - spec.lam


@dataclass(frozen=True)
class CaraResult:
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray
    rho_x: np.ndarray
    rho_hat: np.ndarray
    window: tuple[float, float]
    max_abs_err: float
    rho_closed_form: float


def cara_numeric_check(
    spec: CaraSpec,
    lo: float,
    n: int,
    margin: float = 0.1,
    window: tuple[float, float] | None = None,
) -> CaraResult:
    """Finite-difference check of ``rho = sigma - lam`` on a grid below ``x0``.

    The grid is ``x_i = lo + i h``, ``h = (x0 - lo) / n``.  The outside
    option's position is discretized onto the grid: mass of ``(x_{i-1}, x_i]``
    goes to ``x_i``, the left tail below ``lo`` to ``x_0``, the rest to ``x0``.
    The error is measured on ``window`` (default: the span minus ``margin`` of
    it at each end).
    """
    if n < 5:
        raise DomainError("need at least five grid points")
    if not lo < spec.x0:
        raise DomainError("grid must lie below x0")
    h = (spec.x0 - lo) / n
    x = lo + h * np.arange(n)
    vx = spec.v(x)
    v_top = float(spec.v(spec.x0))
    if not (np.all(np.isfinite(vx)) and math.isfinite(v_top)):
        raise NumericalFailure("v overflows on the grid")
    g = spec.G(x)
    masses = np.diff(np.concatenate(([0.0], g)))
    atoms = list(zip(vx, masses)) + [(v_top, 1.0 - g[-1])]
    F = ExtendedCDF.from_atoms(atoms)
    v = RiskAttitude(tuple(x), tuple(vx))
    u = effective_utility(v, F)
    if not np.all(np.isfinite(u.array)):
        raise NumericalFailure("effective utility is not finite")
    try:
        rho_x, index = arrow_pratt_arrays(u, h)
    except DomainError as exc:
        raise NumericalFailure(f"finite differences broke down: {exc}") from exc
    rho_hat = -index
    if not np.all(np.isfinite(rho_hat)):
        raise NumericalFailure("finite differences are not finite")
    if window is None:
        span = spec.x0 - lo
        window = (lo + margin * span, spec.x0 - margin * span)
    inside = (rho_x >= window[0]) & (rho_x <= window[1])
    if not inside.any():
        raise DomainError("evaluation window holds no grid point")
    expected = cara_effective_rho(spec)
    err = float(np.max(np.abs(rho_hat[inside] - expected)))
    return CaraResult(x, vx, u.array, rho_x, rho_hat, window, err, expected)
