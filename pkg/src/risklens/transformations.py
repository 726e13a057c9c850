"""Lottery-replacement kernels and their outside-option decomposition.

A kernel replaces each alternative ``x`` by a lottery ``G_x`` on the same
finite set.  It has outside-option form when

    G_x = lam * lift_x(G) + (1 - lam) * H        for x < max X,
    G_max = lam * delta_max + (1 - lam) * H_star,

where ``lift_x(G)`` is the law of ``max(x, K)`` for ``K ~ G``.  Such kernels
are exactly the ones whose expected-value map ``x -> E_{G_x} v`` is less
risk-averse than ``v`` for every bounded strictly increasing ``v``.

Finite data fix two gauges: mass of ``G`` at ``min X`` is reported at minus
infinity (lifting cannot tell them apart), and ``G`` carries no mass at
``max X``; the split of ``G_x`` at the second-largest alternative between
``G`` and ``H`` is resolved in favour of the largest ``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from risklens.core_numeric import TOL_EXACT, SetDescriptor
from risklens.distributions import ExtendedCDF, concentrated_on, fosd_leq
from risklens.errors import DomainError
from risklens.preferences import (
    RiskAttitude,
    SimpleLottery,
    crossratio_violation,
    less_risk_averse_oracle,
    lottery_margins,
)

KERNEL_TOL = 1e-9


@dataclass(frozen=True)
class LotteryKernel:
    """Proper CDFs ``G_x`` concentrated on the finite set ``X``, one per alternative."""

    X: tuple[float, ...]
    cdfs: tuple[ExtendedCDF, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.X)
        if len(xs) < 2:
            raise DomainError("a kernel needs at least two alternatives")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("alternatives must be strictly increasing")
        if len(self.cdfs) != len(xs):
            raise DomainError("one CDF per alternative is required")
        support = SetDescriptor.points(xs)
        for x, G in zip(xs, self.cdfs):
            if not concentrated_on(G, support, allow_neg_inf=False):
                raise DomainError(f"the lottery at {x:g} is not a proper CDF concentrated on X")
        object.__setattr__(self, "X", xs)
        object.__setattr__(self, "cdfs", tuple(self.cdfs))

    @property
    def n(self) -> int:
        return len(self.X)

    def cumulative(self) -> np.ndarray:
        """``C[i, j] = G_{x_i}(x_j)``."""
        return np.vstack([np.atleast_1d(G(np.asarray(self.X))) for G in self.cdfs])

    def mass_matrix(self) -> np.ndarray:
        C = self.cumulative()
        return np.diff(np.hstack((np.zeros((self.n, 1)), C)), axis=1)

    def expected(self, v: RiskAttitude) -> RiskAttitude:
        """``m(x) = E_{G_x} v``."""
        if v.alternatives != self.X:
            raise DomainError("v is not defined on the kernel's alternatives")
        return v.with_values(self.mass_matrix() @ v.array)

    @classmethod
    def from_cumulative(cls, X, C) -> LotteryKernel:
        C = np.asarray(C, dtype=float)
        masses = np.diff(np.hstack((np.zeros((C.shape[0], 1)), C)), axis=1)
        masses = np.where(np.abs(masses) < 1e-15, 0.0, masses)
        return cls(
            tuple(X),
            tuple(ExtendedCDF.from_atoms(zip(X, row)) for row in masses),
        )


@dataclass(frozen=True)
class Decomposition:
    lam: float
    G: ExtendedCDF
    H: ExtendedCDF
    H_star: ExtendedCDF | None = None
    H_arbitrary: bool = False

    def __post_init__(self):
        if not (0 < self.lam <= 1):
            raise DomainError("lambda must lie in (0, 1]")


def _lift(G: ExtendedCDF, x: float, X: np.ndarray) -> np.ndarray:
    """CDF of ``max(x, K)``, ``K ~ G``, evaluated on ``X``."""
    return np.where(X >= x, np.atleast_1d(G(X)), 0.0)


def synthesize(d: Decomposition, X) -> LotteryKernel:
    X = np.asarray(sorted(float(x) for x in X))
    support = SetDescriptor.points(X)
    if not concentrated_on(d.G, support, allow_neg_inf=True):
        raise DomainError("G must be concentrated on X and minus infinity")
    for H in (d.H, d.H_star):
        if H is not None and not concentrated_on(H, support):
            raise DomainError("H must be a proper CDF concentrated on X")
    H_vals = np.atleast_1d(d.H(X))
    top_H = H_vals if d.H_star is None else np.atleast_1d(d.H_star(X))
    rows = []
    for i, x in enumerate(X):
        other = top_H if i == X.size - 1 else H_vals
        # at the top every draw of G is lifted to max X
        lifted = _lift(d.G, x, X) if i < X.size - 1 else (X >= x).astype(float)
        rows.append(d.lam * lifted + (1 - d.lam) * other)
    return LotteryKernel.from_cumulative(tuple(X), np.minimum(np.vstack(rows), 1.0))


@dataclass(frozen=True)
class DecompositionFailure:
    """First violated condition, with the alternatives and point that witness it."""

    claim: str
    message: str
    pair: tuple[float, float] | None = None
    point: float | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DecomposeResult:
    decomposition: Decomposition | None = None
    failure: DecompositionFailure | None = None

    @property
    def ok(self) -> bool:
        return self.decomposition is not None


def _fail(claim, message, pair=None, point=None, **extra) -> DecomposeResult:
    return DecomposeResult(failure=DecompositionFailure(claim, message, pair, point, extra))


def decompose(kernel: LotteryKernel, tol: float = KERNEL_TOL) -> DecomposeResult:
    """Recover ``(lam, G, H, H_star)`` from a kernel, or report the first violated claim.

    Checked in order: strict first-order monotonicity of ``x -> G_x``; that
    ``G_x`` and ``G_y`` agree outside ``[x, y)`` below the top alternative
    ("claim1"); that ``R - L`` is non-decreasing ("claim2"); that the top
    lottery lies below ``L`` ("claim3"); ``lam > 0``; and finally that the
    recovered decomposition reproduces the kernel ("structure").
    """
    X = kernel.X
    n = kernel.n
    C = kernel.cumulative()
    for i in range(n - 1):
        hi_row, lo_row = C[i + 1], C[i]
        worse = np.flatnonzero(hi_row > lo_row + tol)
        if worse.size or not np.any(hi_row < lo_row - tol):
            j = int(worse[0]) if worse.size else None
            return _fail(
                "fosd",
                f"G at {X[i + 1]:g} does not strictly dominate G at {X[i]:g}",
                (X[i], X[i + 1]),
                X[j] if j is not None else None,
            )
    t = n - 2
    for i in range(t + 1):
        for k in range(i + 1, t + 1):
            outside = [j for j in range(n - 1) if j < i or j >= k]
            for j in outside:
                if abs(C[i, j] - C[k, j]) > tol:
                    return _fail(
                        "claim1",
                        f"G at {X[i]:g} and at {X[k]:g} differ at {X[j]:g}, outside [{X[i]:g}, {X[k]:g})",
                        (X[i], X[k]),
                        X[j],
                    )
    L = np.array([C[t, j] for j in range(t)])
    R = np.array([C[j, j] for j in range(t + 1)])
    D = R[:t] - L
    for j in range(1, t):
        if D[j] < D[j - 1] - tol:
            return _fail(
                "claim2",
                f"R - L decreases from {X[j - 1]:g} to {X[j]:g}",
                (X[j - 1], X[j]),
                X[j],
                drop=float(D[j - 1] - D[j]),
            )
    L_prev = L[t - 1] if t >= 1 else 0.0
    D_prev = D[t - 1] if t >= 1 else 0.0
    if t >= 1 and R[t] - L_prev < D_prev - tol:
        return _fail(
            "claim2",
            f"R - L decreases from {X[t - 1]:g} to {X[t]:g}",
            (X[t - 1], X[t]),
            X[t],
            drop=float(D_prev - (R[t] - L_prev)),
        )
    top = C[n - 1]
    for j in range(t):
        if top[j] > L[j] + tol:
            return _fail(
                "claim3",
                f"G at the top alternative exceeds L at {X[j]:g}",
                (X[j], X[n - 1]),
                X[j],
            )
    if top[t] > R[t] - D_prev + tol:
        return _fail(
            "claim3",
            f"G at the top alternative is too large at {X[t]:g}",
            (X[t], X[n - 1]),
            X[t],
        )
    floor_t = max(L_prev, top[t])
    lam = float(R[t] - floor_t)
    if not lam > tol:
        return _fail("lambda", "R - L vanishes: no outside-option weight", point=X[t])
    if lam > 1 - 1e-12:
        lam = 1.0

    # G: constant below x_1 (reported at minus infinity), steps at x_1..x_t
    G_cdf = np.append(np.minimum(D / lam, 1.0), 1.0) if t >= 1 else np.array([1.0])
    G_cdf = np.maximum.accumulate(G_cdf)
    G = ExtendedCDF.from_atoms(
        [(X[j], G_cdf[j] - G_cdf[j - 1]) for j in range(1, t + 1)], float(G_cdf[0])
    )
    arbitrary = lam == 1.0
    if arbitrary:
        H = ExtendedCDF.point(X[0])
        H_star = None
    else:
        H_cdf = np.concatenate((L, [floor_t], [1 - lam])) / (1 - lam)
        H = _cdf_on(X, H_cdf)
        star_cdf = top[:-1] / (1 - lam)
        H_star = _cdf_on(X, np.append(star_cdf, 1.0))
        if np.max(np.abs(np.atleast_1d(H_star(np.asarray(X))) - np.atleast_1d(H(np.asarray(X))))) <= tol:
            H_star = None
    d = Decomposition(lam, G, H, H_star, arbitrary)
    rebuilt = synthesize(d, X).cumulative()
    gap = np.abs(rebuilt - C)
    if gap.max() > tol:
        i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
        return _fail(
            "structure",
            f"recovered decomposition misses G at {X[i]:g} by {gap[i, j]:.3g} at {X[j]:g}",
            (X[i], X[i]),
            X[j],
        )
    return DecomposeResult(decomposition=d)


def _cdf_on(X, cdf_values) -> ExtendedCDF:
    vals = np.clip(np.maximum.accumulate(np.asarray(cdf_values, dtype=float)), 0.0, 1.0)
    vals[-1] = 1.0
    masses = np.diff(np.concatenate(([0.0], vals)))
    return ExtendedCDF.from_atoms(zip(X, masses))


@dataclass(frozen=True)
class PrattWitness:
    """Bounded strictly increasing ``v``, lottery ``p`` and sure ``x`` breaking the test."""

    v: RiskAttitude
    lottery: SimpleLottery
    x: float
    m_margin: float
    v_margin: float


def _witness_for(kernel: LotteryKernel, v: RiskAttitude, tol: float, trials: int, seed: int):
    m = kernel.expected(v)
    violation = crossratio_violation(m, v, tol)
    if violation is not None:
        lottery, x = violation.strict_witness(m, v)
    else:
        res = less_risk_averse_oracle(m, v, trials=trials, seed=seed, tol=tol)
        if res.holds:
            return None
        lottery, x = res.violation.lottery, res.violation.x
    mm, vm = lottery_margins(m, v, lottery, x)
    return PrattWitness(v, lottery, x, mm, vm)


def random_increasing_v(X, rng: np.random.Generator) -> RiskAttitude:
    """Cumulative sums of positive increments, rescaled onto [0, 1]."""
    steps = rng.uniform(1e-3, 1.0, size=len(X))
    c = np.cumsum(steps)
    return RiskAttitude(tuple(X), tuple((c - c[0]) / (c[-1] - c[0])))


@dataclass(frozen=True)
class RiskReductionReport:
    all_pass: bool
    samples: int
    witness: PrattWitness | None = None

    @property
    def summary(self) -> str:
        if self.all_pass:
            return f"no violation found in {self.samples} samples"
        return "violation found"


def check_risk_reduction(
    kernel: LotteryKernel,
    v_samples: int = 200,
    seed: int = 0,
    tol: float = TOL_EXACT,
    trials: int = 50,
) -> RiskReductionReport:
    """Sample increasing ``v`` and test whether ``E_{G_x} v`` is less risk-averse than ``v``."""
    if v_samples < 1:
        raise DomainError("v_samples must be at least 1")
    rng = np.random.default_rng(seed)
    for s in range(v_samples):
        v = random_increasing_v(kernel.X, rng)
        w = _witness_for(kernel, v, tol, trials, seed + s)
        if w is not None:
            return RiskReductionReport(False, s + 1, w)
    return RiskReductionReport(True, v_samples)


def _eps_primitive(intervals, eps: float, x: np.ndarray) -> np.ndarray:
    """``int_0^x`` of ``c`` on each ``(a, b, c)`` interval and ``eps * exp(-|t|)`` elsewhere."""
    x = np.asarray(x, dtype=float)

    def pi_prim(t):
        return np.sign(t) * (1 - np.exp(-np.abs(t)))

    total = eps * pi_prim(x)
    for a, b, c in intervals:
        lo, hi = np.clip(0.0, a, b), np.clip(x, a, b)
        total = total + c * (hi - lo) - eps * (pi_prim(hi) - pi_prim(lo))
    return total


def _candidate_vs(kernel: LotteryKernel, failure: DecompositionFailure):
    """The proof's steep-on-a-region utilities for the reported failure, by shrinking ``eps``."""
    X = np.asarray(kernel.X)
    gaps = np.diff(X)
    width = 0.5 * float(gaps.min())
    big = float(X[-1] - X[0]) + 1.0
    claim = failure.claim
    if claim in ("claim1", "structure") and failure.pair is not None:
        x, y = failure.pair
        if x == y:
            y = X[min(np.searchsorted(X, x) + 1, X.size - 1)]
        regions = [[(x, y, 1.0)]]
        z = failure.point
        if z is not None and z < X[-1]:
            # the two lotteries put different mass above z
            regions.insert(0, [(z, float(X[X > z][0]), 1.0)])
    elif claim == "claim2" and failure.pair is not None:
        x, y = failure.pair
        regions = [[(x, x + width, 1.0), (y, y + width, 1.0)], [(x, y, 1.0)]]
    elif claim == "claim3" and failure.pair is not None:
        y, top = failure.pair
        below = X[X < y]
        z = float(below[-1]) if below.size else y - 1.0
        regions = [[(y, top, 1.0)], [(z, y, 1.0), (y, top, big)]]
    elif claim == "fosd" and failure.point is not None:
        z = failure.point
        regions = [[(z, z + width, 1.0)]]
    elif claim == "fosd":
        regions = [[]]
    else:
        regions = [[(float(a), float(b), 1.0)] for a, b in zip(X, X[1:])]
    for eps in 10.0 ** -np.arange(1, 7):
        for region in regions:
            vals = _eps_primitive(region, eps, X)
            if np.all(np.diff(vals) > 0):
                yield RiskAttitude(tuple(X), tuple(vals))


def directed_violation_search(
    kernel: LotteryKernel,
    failure: DecompositionFailure,
    tol: float = TOL_EXACT,
) -> PrattWitness | None:
    """Try the utilities used to prove the failed claim; return the first Pratt witness."""
    for v in _candidate_vs(kernel, failure):
        m = kernel.expected(v)
        violation = crossratio_violation(m, v, tol)
        if violation is not None:
            lottery, x = violation.strict_witness(m, v)
            mm, vm = lottery_margins(m, v, lottery, x)
            return PrattWitness(v, lottery, x, mm, vm)
    return None


@dataclass(frozen=True)
class AgreementReport:
    lra: bool
    oo_form: bool
    risk: RiskReductionReport
    decomposition: DecomposeResult
    directed: PrattWitness | None = None

    @property
    def agree(self) -> bool:
        return self.lra == self.oo_form

    @property
    def witness(self) -> PrattWitness | None:
        return self.risk.witness or self.directed


def risk_reduction_agreement(
    kernel: LotteryKernel,
    v_samples: int = 200,
    seed: int = 0,
    tol: float = TOL_EXACT,
    trials: int = 50,
) -> AgreementReport:
    """Sampled risk reduction against outside-option form, with a directed search as tie-break."""
    dec = decompose(kernel)
    risk = check_risk_reduction(kernel, v_samples, seed, tol, trials)
    lra = risk.all_pass
    directed = None
    if lra and not dec.ok:
        directed = directed_violation_search(kernel, dec.failure, tol)
        if directed is not None:
            lra = False
    return AgreementReport(lra, dec.ok, risk, dec, directed)


def background_risk_kernel(X=(0.0, 1.0, 2.0, 3.0), shock: float = 1.0) -> LotteryKernel:
    """``G_x`` is the law of ``x + e`` clamped into ``X``, ``e = -shock, +shock`` equally likely."""
    X = tuple(float(x) for x in X)
    lo, hi = X[0], X[-1]
    cdfs = []
    for x in X:
        outcomes = [min(max(x + e, lo), hi) for e in (-shock, shock)]
        for o in outcomes:
            if o not in X:
                raise DomainError("shocked outcomes must land on X")
        cdfs.append(ExtendedCDF.from_atoms((o, 0.5) for o in outcomes))
    return LotteryKernel(X, tuple(cdfs))


def fosd_increasing(kernel: LotteryKernel) -> bool:
    grid = np.asarray(kernel.X)
    return all(
        fosd_leq(a, b, grid) for a, b in zip(kernel.cdfs, kernel.cdfs[1:])
    )


def identity_kernel(X) -> LotteryKernel:
    X = tuple(float(x) for x in X)
    return LotteryKernel(X, tuple(ExtendedCDF.point(x) for x in X))
