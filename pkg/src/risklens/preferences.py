"""Risk attitudes on finite alternative sets and comparative risk aversion.

Alternatives are identified with their real positions.  "u is less
risk-averse than v" is decided two ways: by the ordinal and cross-ratio
conditions (an exhaustive O(n^3) scan), and by a brute-force lottery oracle
that looks for a sure alternative ranked above a lottery by u but not by v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from risklens import kernels
from risklens.core_numeric import TOL_EXACT, PiecewiseLinearFn, SetDescriptor
from risklens.errors import DomainError, NotLessRiskAverse

PROB_TOL = 1e-12
GRID_DENOM = 64
MAX_RANDOM_SUPPORT = 4


@dataclass(frozen=True)
class RiskAttitude:
    """Utility values on a finite set of alternatives, kept sorted by position."""

    alternatives: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        xs = [float(x) for x in self.alternatives]
        us = [float(u) for u in self.values]
        if len(xs) != len(us):
            raise DomainError("alternatives and values differ in length")
        if not xs:
            raise DomainError("a risk attitude needs at least one alternative")
        if not all(math.isfinite(t) for t in xs + us):
            raise DomainError("alternatives and utilities must be finite")
        order = sorted(range(len(xs)), key=xs.__getitem__)
        xs = [xs[i] for i in order]
        if any(b == a for a, b in zip(xs, xs[1:])):
            raise DomainError("duplicate alternative")
        object.__setattr__(self, "alternatives", tuple(xs))
        object.__setattr__(self, "values", tuple(us[i] for i in order))

    @classmethod
    def from_function(cls, alternatives: Iterable[float], fn) -> RiskAttitude:
        xs = tuple(float(x) for x in alternatives)
        return cls(xs, tuple(float(fn(x)) for x in xs))

    def __len__(self) -> int:
        return len(self.alternatives)

    def __call__(self, x: float) -> float:
        return self.values[self.index(x)]

    def index(self, x: float) -> int:
        try:
            return self.alternatives.index(float(x))
        except ValueError:
            raise DomainError(f"{x!r} is not an alternative") from None

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def is_constant(self) -> bool:
        return max(self.values) == min(self.values)

    def image(self) -> SetDescriptor:
        return SetDescriptor.points(self.values)

    def affine(self, scale: float, shift: float) -> RiskAttitude:
        return RiskAttitude(self.alternatives, tuple(scale * u + shift for u in self.values))

    def with_values(self, values: Sequence[float]) -> RiskAttitude:
        return RiskAttitude(self.alternatives, tuple(float(u) for u in values))


@dataclass(frozen=True)
class SimpleLottery:
    """Finitely supported lottery as sorted ``(alternative, probability)`` pairs."""

    support: tuple[tuple[float, float], ...]

    def __post_init__(self):
        merged: dict[float, float] = {}
        for x, p in self.support:
            x, p = float(x), float(p)
            if not math.isfinite(x) or not (p >= 0):
                raise DomainError("lottery outcomes must be finite with p >= 0")
            merged[x] = merged.get(x, 0.0) + p
        total = sum(merged.values())
        if abs(total - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(
            self, "support", tuple((x, p) for x, p in sorted(merged.items()) if p > 0)
        )

    @classmethod
    def degenerate(cls, x: float) -> SimpleLottery:
        return cls(((x, 1.0),))

    def as_dict(self) -> dict[float, float]:
        return dict(self.support)

    def dense(self, alternatives: Sequence[float]) -> np.ndarray:
        row = np.zeros(len(alternatives))
        where = {x: i for i, x in enumerate(alternatives)}
        for x, p in self.support:
            if x not in where:
                raise DomainError(f"lottery outcome {x!r} is not an alternative")
            row[where[x]] = p
        return row


def expected_utility(u: RiskAttitude, p: SimpleLottery) -> float:
    return float(sum(q * u(x) for x, q in p.support))


def _same_alternatives(u: RiskAttitude, v: RiskAttitude):
    if u.alternatives != v.alternatives:
        raise DomainError("risk attitudes are defined on different alternatives")


@dataclass(frozen=True)
class OrdinalViolation:
    """``u`` and ``v`` rank ``x`` and ``y`` differently."""

    x: float
    y: float
    u_values: tuple[float, float]
    v_values: tuple[float, float]

    def witness(self, tol: float = TOL_EXACT) -> tuple[SimpleLottery, float]:
        """A degenerate lottery and a sure alternative breaking the lottery test."""
        (ux, uy), (vx, vy) = self.u_values, self.v_values
        # orient so that u weakly prefers `a` while v does not agree
        for a, b, ua, ub, va, vb in ((self.x, self.y, ux, uy, vx, vy), (self.y, self.x, uy, ux, vy, vx)):
            if (ua >= ub - tol and va < vb - tol) or (ua > ub + tol and va <= vb + tol):
                return SimpleLottery.degenerate(b), a
        raise AssertionError("ordinal violation without a witness")

    def strict_witness(self, u: RiskAttitude, v: RiskAttitude) -> tuple[SimpleLottery, float]:
        return self.witness()


@dataclass(frozen=True)
class CrossRatioViolation:
    """A triple ``u(x) < u(y) < u(z)`` at which u is relatively more concave than v."""

    x: float
    y: float
    z: float
    ratio_u: float
    ratio_v: float
    p_x: float

    def witness(self, tol: float = TOL_EXACT) -> tuple[SimpleLottery, float]:
        """Lottery on ``{x, z}`` with u-mean ``u(y)`` that v strictly prefers to ``y``."""
        return SimpleLottery(((self.x, self.p_x), (self.z, 1.0 - self.p_x))), self.y

    def strict_witness(self, u: RiskAttitude, v: RiskAttitude) -> tuple[SimpleLottery, float]:
        """Same support, with ``p(x)`` halfway to v's indifference point.

        Both margins are then bounded away from zero.
        """
        p_v = (v(self.z) - v(self.y)) / (v(self.z) - v(self.x))
        p = (self.p_x + p_v) / 2
        return SimpleLottery(((self.x, p), (self.z, 1.0 - p))), self.y


@dataclass(frozen=True)
class LotteryViolation:
    """``u(x) >= (>) E_p u`` while ``v(x) < (<=) E_p v``."""

    lottery: SimpleLottery
    x: float
    kind: str
    u_margin: float
    v_margin: float

    def witness(self, tol: float = TOL_EXACT) -> tuple[SimpleLottery, float]:
        return self.lottery, self.x


def crossratio_violation(u: RiskAttitude, v: RiskAttitude, tol: float = TOL_EXACT):
    """First ordinal or cross-ratio violation of "u less risk-averse than v", or None."""
    _same_alternatives(u, v)
    ua, va = u.array, v.array
    xs = u.alternatives
    hit = kernels.ordinal_violation(ua, va, tol)
    if hit is not None:
        i, j = hit
        return OrdinalViolation(xs[i], xs[j], (ua[i], ua[j]), (va[i], va[j]))
    hit = kernels.crossratio_violation(ua, va, tol)
    if hit is not None:
        i, j, k = hit
        ratio_u = (ua[k] - ua[j]) / (ua[j] - ua[i])
        ratio_v = (va[k] - va[j]) / (va[j] - va[i])
        p_x = (ua[k] - ua[j]) / (ua[k] - ua[i])
        return CrossRatioViolation(xs[i], xs[j], xs[k], float(ratio_u), float(ratio_v), float(p_x))
    return None


def less_risk_averse_crossratio(u: RiskAttitude, v: RiskAttitude, tol: float = TOL_EXACT) -> bool:
    return crossratio_violation(u, v, tol) is None


@dataclass(frozen=True)
class OracleResult:
    holds: bool
    lotteries_checked: int
    violation: LotteryViolation | None = None

    def __bool__(self) -> bool:
        return self.holds


def oracle_lotteries(n: int, trials: int, seed: int) -> np.ndarray:
    """Dense lottery matrix scanned by the oracle, in scan order.

    Rows: every degenerate lottery, every two-point lottery on the grid
    ``j / 64``, then ``trials`` random lotteries with at most four outcomes.
    """
    rows = [np.eye(n)]
    if n >= 2:
        grid = np.arange(1, GRID_DENOM) / GRID_DENOM
        for a in range(n):
            for b in range(a + 1, n):
                block = np.zeros((grid.size, n))
                block[:, a] = grid
                block[:, b] = 1.0 - grid
                rows.append(block)
    rng = np.random.default_rng(seed)
    rand = np.zeros((trials, n))
    for t in range(trials):
        size = int(rng.integers(1, min(MAX_RANDOM_SUPPORT, n) + 1))
        support = rng.choice(n, size=size, replace=False)
        w = rng.uniform(size=size)
        rand[t, support] = w / w.sum()
    rows.append(rand)
    return np.vstack(rows)


def less_risk_averse_oracle(
    u: RiskAttitude,
    v: RiskAttitude,
    trials: int = 500,
    seed: int = 0,
    tol: float = TOL_EXACT,
) -> OracleResult:
    """Brute-force lottery test of "u less risk-averse than v".

    Weak half: ``u(x) >= E_p u - tol`` must imply ``v(x) >= E_p v - tol``.
    Strict half: ``u(x) > E_p u + tol`` must imply ``v(x) > E_p v + tol``.
    """
    _same_alternatives(u, v)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    P = oracle_lotteries(len(u), trials, seed)
    hit = kernels.lottery_violation(u.array, v.array, P, tol)
    if hit is None:
        return OracleResult(True, P.shape[0])
    row, x, kind = hit
    xs = u.alternatives
    lottery = SimpleLottery(tuple((xs[i], float(P[row, i])) for i in np.flatnonzero(P[row])))
    u_margin = u.values[x] - float(P[row] @ u.array)
    v_margin = v.values[x] - float(P[row] @ v.array)
    return OracleResult(
        False,
        row + 1,
        LotteryViolation(lottery, xs[x], "weak" if kind == 0 else "strict", u_margin, v_margin),
    )


def lottery_margins(
    u: RiskAttitude, v: RiskAttitude, lottery: SimpleLottery, x: float
) -> tuple[float, float]:
    """``(u(x) - E_p u, v(x) - E_p v)``: a witness needs the first >= 0 and the second < 0."""
    return u(x) - expected_utility(u, lottery), v(x) - expected_utility(v, lottery)


def construct_phi_greatest(
    u: RiskAttitude, v: RiskAttitude, tol: float = TOL_EXACT
) -> PiecewiseLinearFn:
    """Greatest increasing convex ``phi`` with ``u = phi(v)``, on the hull of ``v``'s image.

    It interpolates ``u`` against ``v`` at the distinct values of ``v`` and is
    affine in between.
    """
    _same_alternatives(u, v)
    violation = crossratio_violation(u, v, tol)
    if violation is not None:
        raise NotLessRiskAverse("u is not less risk-averse than v", violation)
    if v.is_constant:
        raise DomainError("v is constant: the transform has a degenerate domain")
    knots: dict[float, float] = {}
    for vi, ui in zip(v.values, u.values):
        if vi in knots and abs(knots[vi] - ui) > tol:
            raise DomainError(f"u is not a function of v: v={vi} carries u={knots[vi]} and u={ui}")
        knots.setdefault(vi, ui)
    return PiecewiseLinearFn.from_knots(sorted(knots.items()))


def _uniform_spacing(xs: np.ndarray, h: float | None) -> float:
    steps = np.diff(xs)
    if h is None:
        h = float(steps.mean())
    if h <= 0 or not np.allclose(steps, h, rtol=1e-6, atol=0.0):
        raise DomainError("alternatives are not a uniform grid with the given spacing")
    return h


def arrow_pratt_arrays(u: RiskAttitude, h: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Interior grid points and central-difference estimates of ``u'' / u'``."""
    xs = np.asarray(u.alternatives)
    if xs.size < 3:
        raise DomainError("need at least one interior grid point")
    h = _uniform_spacing(xs, h)
    ua = u.array
    d1 = (ua[2:] - ua[:-2]) / (2 * h)
    d2 = (ua[2:] - 2 * ua[1:-1] + ua[:-2]) / h**2
    if np.any(d1 <= 0):
        raise DomainError("u is not increasing on the grid")
    return xs[1:-1], d2 / d1


def arrow_pratt_index(u: RiskAttitude, h: float | None = None) -> list[tuple[float, float]]:
    xs, idx = arrow_pratt_arrays(u, h)
    return [(float(x), float(r)) for x, r in zip(xs, idx)]
