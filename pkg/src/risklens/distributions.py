"""Extended CDFs on [-inf, +inf), the valuation transform, and stochastic orders.

An :class:`ExtendedCDF` is a finite mixture of a point mass at minus
infinity, atoms, and uniform pieces.  The valuation transform
``chi(l) = E[max(l, K)]`` is computed two independent ways: :func:`chi_eval`
integrates the CDF, :func:`chi` sums over the distribution directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from risklens import kernels
from risklens.core_numeric import TOL_EXACT, PiecewiseLinearFn, SetDescriptor
from risklens.errors import DomainError

MASS_TOL = 1e-12
CHI_REFINE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Atom:
    at: float
    mass: float


@dataclass(frozen=True, order=True)
class UniformPiece:
    lo: float
    hi: float
    mass: float

    @property
    def density(self) -> float:
        return self.mass / (self.hi - self.lo)


def _split_pieces(pieces: Sequence[UniformPiece]) -> tuple[UniformPiece, ...]:
    """Rewrite overlapping pieces as disjoint pieces of constant density."""
    overlapping = any(b.lo < a.hi for a, b in zip(pieces, pieces[1:]))
    if not overlapping:
        return tuple(pieces)
    cuts = sorted({p.lo for p in pieces} | {p.hi for p in pieces})
    out = []
    for a, b in zip(cuts, cuts[1:]):
        dens = sum(p.density for p in pieces if p.lo <= a and b <= p.hi)
        if dens > 0:
            out.append(UniformPiece(a, b, dens * (b - a)))
    return tuple(out)


@dataclass(frozen=True)
class ExtendedCDF:
    """Distribution of a [-inf, +inf)-valued random variable.

    Atoms at the same location are merged, zero masses dropped, and
    overlapping uniform pieces are split into disjoint constant-density
    pieces.  Masses must sum to one within ``MASS_TOL``.
    """

    neg_inf_mass: float = 0.0
    atoms: tuple[Atom, ...] = ()
    uniform: tuple[UniformPiece, ...] = ()

    def __post_init__(self):
        alpha = float(self.neg_inf_mass)
        merged: dict[float, float] = {}
        for a in self.atoms:
            at, m = float(a.at), float(a.mass)
            if not math.isfinite(at):
                raise DomainError("atom locations must be finite; use neg_inf_mass")
            merged[at] = merged.get(at, 0.0) + m
        pieces = []
        for p in self.uniform:
            lo, hi, m = float(p.lo), float(p.hi), float(p.mass)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
                raise DomainError(f"uniform piece needs finite lo < hi, got ({lo}, {hi})")
            if m < 0:
                raise DomainError("masses must be non-negative")
            if m > 0:
                pieces.append(UniformPiece(lo, hi, m))
        if alpha < 0 or any(m < 0 for m in merged.values()):
            raise DomainError("masses must be non-negative")
        total = alpha + sum(merged.values()) + sum(p.mass for p in pieces)
        if abs(total - 1.0) > MASS_TOL:
            raise DomainError(f"masses sum to {total!r}, expected 1")
        atoms = tuple(Atom(at, m) for at, m in sorted(merged.items()) if m > 0)
        object.__setattr__(self, "neg_inf_mass", alpha)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "uniform", _split_pieces(sorted(pieces)))

    @classmethod
    def from_atoms(
        cls, atoms: Iterable[tuple[float, float]], neg_inf_mass: float = 0.0
    ) -> ExtendedCDF:
        return cls(neg_inf_mass, tuple(Atom(a, m) for a, m in atoms))

    @classmethod
    def point(cls, at: float) -> ExtendedCDF:
        return cls(0.0, (Atom(at, 1.0),))

    @classmethod
    def worthless(cls) -> ExtendedCDF:
        """All mass at minus infinity: F is identically one."""
        return cls(1.0)

    @property
    def is_atom_only(self) -> bool:
        return not self.uniform

    @property
    def is_proper(self) -> bool:
        return self.neg_inf_mass == 0.0

    def breakpoints(self) -> np.ndarray:
        pts = {a.at for a in self.atoms}
        for p in self.uniform:
            pts.update((p.lo, p.hi))
        return np.array(sorted(pts), dtype=float)

    def _atom_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([a.at for a in self.atoms], dtype=float),
            np.array([a.mass for a in self.atoms], dtype=float),
        )

    def _eval(self, k, left: bool):
        k = np.asarray(k, dtype=float)
        at, mass = self._atom_arrays()
        cum = np.concatenate(([0.0], np.cumsum(mass)))
        side = "left" if left else "right"
        out = self.neg_inf_mass + cum[np.searchsorted(at, k, side=side)]
        for p in self.uniform:
            out = out + p.mass * np.clip((k - p.lo) / (p.hi - p.lo), 0.0, 1.0)
        out = np.minimum(out, 1.0)
        return float(out) if out.ndim == 0 else out

    def __call__(self, k):
        return self._eval(k, left=False)

    def left_limit(self, k):
        return self._eval(k, left=True)

    def integral(self, a, b):
        """``int_a^b F(t) dt`` for finite ``a <= b`` (vectorized over either bound)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = self.neg_inf_mass * (b - a)
        for atom in self.atoms:
            out = out + atom.mass * np.maximum(0.0, b - np.maximum(a, atom.at))
        for p in self.uniform:
            out = out + p.mass * (_ramp(b, p.lo, p.hi) - _ramp(a, p.lo, p.hi))
        return float(out) if np.ndim(out) == 0 else out

    def to_step(self) -> StepFn:
        if not self.is_atom_only:
            raise DomainError("only atom-only distributions are step functions")
        at, mass = self._atom_arrays()
        return StepFn(self.neg_inf_mass, tuple(at), tuple(self.neg_inf_mass + np.cumsum(mass)))

    @classmethod
    def from_step(cls, step: StepFn) -> ExtendedCDF:
        """Atom-only distribution whose CDF is ``step`` (which must end at one)."""
        prev = step.initial
        atoms = []
        for x, val in zip(step.breaks, step.values):
            jump = val - prev
            if jump < -MASS_TOL:
                raise DomainError("step function is decreasing")
            atoms.append((x, max(jump, 0.0)))
            prev = val
        if abs(prev - 1.0) > MASS_TOL:
            raise DomainError(f"step function ends at {prev!r}, not 1")
        return cls.from_atoms(atoms, step.initial)


def _ramp(t, p, q):
    """``int_{-inf}^t clamp((s - p) / (q - p), 0, 1) ds``."""
    t = np.asarray(t, dtype=float)
    w = q - p
    inside = (t - p) ** 2 / (2 * w)
    above = w / 2 + (t - q)
    return np.where(t <= p, 0.0, np.where(t >= q, above, inside))


@dataclass(frozen=True)
class StepFn:
    """Right-continuous step function: ``initial`` below ``breaks[0]``, ``values[i]`` on ``[breaks[i], breaks[i+1])``."""

    initial: float
    breaks: tuple[float, ...] = ()
    values: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if len(self.breaks) != len(self.values):
            raise DomainError("breaks and values differ in length")
        if any(b <= a for a, b in zip(self.breaks, self.breaks[1:])):
            raise DomainError("breakpoints must be strictly increasing")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        table = np.concatenate(([self.initial], np.asarray(self.values, dtype=float)))
        out = table[np.searchsorted(np.asarray(self.breaks, dtype=float), k, side="right")]
        return float(out) if out.ndim == 0 else out


def cdf_eval(F: ExtendedCDF, k):
    return F(k)


def positive_part_mean(F: ExtendedCDF) -> float:
    """``int_{(0, inf)} k F(dk)``."""
    total = sum(a.at * a.mass for a in F.atoms if a.at > 0)
    for p in F.uniform:
        if p.hi > 0:
            lo = max(p.lo, 0.0)
            total += p.density * (p.hi**2 - lo**2) / 2
    return float(total)


def negative_part_mean(F: ExtendedCDF) -> float:
    """``int_{[-inf, 0]} k F(dk)``; minus infinity when F has mass at minus infinity."""
    if F.neg_inf_mass > 0:
        return -math.inf
    total = sum(a.at * a.mass for a in F.atoms if a.at <= 0)
    for p in F.uniform:
        if p.lo < 0:
            hi = min(p.hi, 0.0)
            total += p.density * (hi**2 - p.lo**2) / 2
    return float(total)


def lower_integral(F: ExtendedCDF) -> float:
    """``int_{-inf}^0 F``; infinite exactly when F has mass at minus infinity."""
    if F.neg_inf_mass > 0:
        return math.inf
    bps = F.breakpoints()
    if bps.size == 0 or bps[0] >= 0:
        return 0.0
    return F.integral(bps[0], 0.0)


def chi_eval(F: ExtendedCDF, ell):
    """Valuation transform by integration: ``m - int_l^0 F`` with ``m`` the positive-part mean."""
    ell = np.asarray(ell, dtype=float)
    m = positive_part_mean(F)
    out = m - F.integral(np.minimum(ell, 0.0), 0.0) + F.integral(0.0, np.maximum(ell, 0.0))
    return float(out) if np.ndim(out) == 0 else np.asarray(out)


def _chi_direct(F: ExtendedCDF, ell: np.ndarray) -> np.ndarray:
    """``F(l) l + int_{(l, inf)} k F(dk)``, the defining sum."""
    at, mass = F._atom_arrays()
    out = kernels.chi_atoms(at, mass, F.neg_inf_mass, ell)
    for p in F.uniform:
        frac = np.clip((ell - p.lo) / (p.hi - p.lo), 0.0, 1.0)
        lo = np.clip(ell, p.lo, p.hi)
        out = out + p.mass * frac * ell + p.density * (p.hi**2 - lo**2) / 2
    return out


def chi(F: ExtendedCDF, lo: float, hi: float, tol: float = CHI_REFINE_TOL) -> PiecewiseLinearFn:
    """Valuation transform on ``[lo, hi]`` as a piecewise-linear function.

    Exact for atom-only F.  With uniform pieces the transform is quadratic
    between breakpoints; segments are bisected until every midpoint residual
    is below ``tol``, which bounds the interpolation error on quadratics.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise DomainError("chi needs a bounded non-degenerate domain")
    bps = F.breakpoints()
    xs = np.unique(np.concatenate(([lo, hi], bps[(bps > lo) & (bps < hi)])))
    if not F.is_atom_only:
        curved = np.zeros(xs.size - 1, dtype=bool)
        for p in F.uniform:
            curved |= (xs[:-1] >= p.lo) & (xs[1:] <= p.hi)
        while True:
            mids = (xs[:-1] + xs[1:]) / 2
            lin = (_chi_direct(F, xs[:-1]) + _chi_direct(F, xs[1:])) / 2
            split = curved & (np.abs(_chi_direct(F, mids) - lin) > tol)
            if not split.any():
                break
            xs = np.sort(np.concatenate((xs, mids[split])))
            curved = np.repeat(curved, np.where(split, 2, 1))
    return PiecewiseLinearFn(tuple(xs), tuple(_chi_direct(F, xs)))


def _order_points(F: ExtendedCDF, G: ExtendedCDF, grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("grid must be non-empty")
    return np.unique(np.concatenate((grid, F.breakpoints(), G.breakpoints())))


def fosd_leq(F: ExtendedCDF, F_hat: ExtendedCDF, grid, tol: float = TOL_EXACT) -> bool:
    """True iff ``F_hat`` first-order stochastically dominates ``F``.

    Both CDFs are linear between consecutive breakpoints, so comparing the
    masses at minus infinity, the values, and the left limits at every
    breakpoint settles the question on the whole line.
    """
    pts = _order_points(F, F_hat, grid)
    if F_hat.neg_inf_mass > F.neg_inf_mass + tol:
        return False
    if np.any(F_hat(pts) > F(pts) + tol):
        return False
    return not np.any(F_hat.left_limit(pts) > F.left_limit(pts) + tol)


def rhr_geq(F: ExtendedCDF, F_hat: ExtendedCDF, K, tol: float = TOL_EXACT) -> bool:
    """True iff ``F_hat`` is better than ``F`` in the reverse hazard rate order on ``K``."""
    K = np.asarray(K, dtype=float).ravel()
    a = np.atleast_1d(F(K))
    b = np.atleast_1d(F_hat(K))
    lhs = a[None, :] * b[:, None]  # [i, j] -> F(K_j) F_hat(K_i)
    rhs = a[:, None] * b[None, :]  # [i, j] -> F(K_i) F_hat(K_j)
    upper = K[:, None] < K[None, :]
    return not np.any(upper & (lhs > rhs + tol))


def concentrated_on(F: ExtendedCDF, S: SetDescriptor, allow_neg_inf: bool = False) -> bool:
    if F.neg_inf_mass > 0 and not allow_neg_inf:
        return False
    if not all(S.contains(a.at) for a in F.atoms):
        return False
    return all(SetDescriptor.interval(p.lo, p.hi).is_subset_of(S) for p in F.uniform)
