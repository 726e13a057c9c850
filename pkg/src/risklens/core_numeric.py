"""Real-subset descriptors and continuous piecewise-linear functions.

``SetDescriptor`` describes a finite union of points and intervals with
finite endpoints; it is enough to evaluate the modified convex hull
(:func:`cotwo`) and the second infimum (:func:`inftwo`) of images of risk
attitudes.  ``PiecewiseLinearFn`` is the single function representation used
downstream (transforms between risk attitudes, valuation transforms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from risklens.errors import DomainError

#: absolute tolerance for values produced by exact piecewise arithmetic
TOL_EXACT = 1e-9
#: absolute tolerance for values produced by numerical differentiation
TOL_NUMERIC = 1e-6


@dataclass(frozen=True, order=True)
class Component:
    """A point (``lo == hi``, both ends closed) or a non-degenerate interval."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("set endpoints must be finite reals")
        if self.lo > self.hi:
            raise DomainError(f"empty component: lo={self.lo} > hi={self.hi}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise DomainError("a degenerate component must be a closed point")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def __str__(self) -> str:
        if self.is_point:
            return f"{{{self.lo:g}}}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g},{self.hi:g}{right}"


def _normalize(parts: Iterable[Component]) -> tuple[Component, ...]:
    ordered = sorted(parts, key=lambda c: (c.lo, not c.lo_closed, c.hi))
    merged: list[Component] = []
    for comp in ordered:
        if not merged:
            merged.append(comp)
            continue
        cur = merged[-1]
        touches = comp.lo < cur.hi or (
            comp.lo == cur.hi and (cur.hi_closed or comp.lo_closed)
        )
        if not touches:
            merged.append(comp)
            continue
        if comp.hi > cur.hi:
            hi, hi_closed = comp.hi, comp.hi_closed
        elif comp.hi == cur.hi:
            hi, hi_closed = cur.hi, cur.hi_closed or comp.hi_closed
        else:
            hi, hi_closed = cur.hi, cur.hi_closed
        lo_closed = cur.lo_closed or (comp.lo == cur.lo and comp.lo_closed)
        merged[-1] = Component(cur.lo, hi, lo_closed, hi_closed)
    return tuple(merged)


@dataclass(frozen=True)
class SetDescriptor:
    """Finite union of disjoint points and intervals, kept sorted and merged."""

    parts: tuple[Component, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", _normalize(self.parts))

    @classmethod
    def points(cls, xs: Iterable[float]) -> SetDescriptor:
        return cls(tuple(Component(float(x), float(x)) for x in xs))

    @classmethod
    def interval(
        cls, lo: float, hi: float, lo_closed: bool = True, hi_closed: bool = True
    ) -> SetDescriptor:
        return cls((Component(float(lo), float(hi), lo_closed, hi_closed),))

    def union(self, other: SetDescriptor) -> SetDescriptor:
        return SetDescriptor(self.parts + other.parts)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def _require_nonempty(self):
        if self.is_empty:
            raise DomainError("operation undefined on the empty set")

    @property
    def inf(self) -> float:
        self._require_nonempty()
        return self.parts[0].lo

    @property
    def sup(self) -> float:
        self._require_nonempty()
        return self.parts[-1].hi

    def contains(self, x: float) -> bool:
        return any(c.contains(x) for c in self.parts)

    def is_subset_of(self, other: SetDescriptor) -> bool:
        """True iff every component lies inside a single component of ``other``."""
        for comp in self.parts:
            ok = False
            for host in other.parts:
                if comp.lo < host.lo or comp.hi > host.hi:
                    continue
                if comp.lo == host.lo and comp.lo_closed and not host.lo_closed:
                    continue
                if comp.hi == host.hi and comp.hi_closed and not host.hi_closed:
                    continue
                ok = True
                break
            if not ok:
                return False
        return True

    def without_point(self, x: float) -> SetDescriptor:
        out: list[Component] = []
        for comp in self.parts:
            if not comp.contains(x):
                out.append(comp)
            elif comp.is_point:
                continue
            elif x == comp.lo:
                out.append(Component(comp.lo, comp.hi, False, comp.hi_closed))
            elif x == comp.hi:
                out.append(Component(comp.lo, comp.hi, comp.lo_closed, False))
            else:
                out.append(Component(comp.lo, x, comp.lo_closed, False))
                out.append(Component(x, comp.hi, False, comp.hi_closed))
        return SetDescriptor(tuple(out))

    def co(self) -> SetDescriptor:
        """Convex hull."""
        self._require_nonempty()
        first, last = self.parts[0], self.parts[-1]
        if first.lo == last.hi:
            return SetDescriptor.points([first.lo])
        return SetDescriptor.interval(first.lo, last.hi, first.lo_closed, last.hi_closed)

    def closure(self) -> SetDescriptor:
        return SetDescriptor(tuple(Component(c.lo, c.hi) for c in self.parts))

    def __str__(self) -> str:
        return " ∪ ".join(str(c) for c in self.parts) if self.parts else "∅"


def _second_branch(A: SetDescriptor) -> tuple[bool, float]:
    """Return whether the isolated-infimum branch applies, and inf(A minus inf A)."""
    m1 = A.inf
    rest = A.without_point(m1) if A.contains(m1) else A
    if rest.is_empty:
        # singleton: treated as convex, so inftwo stays inside cl(A)
        return False, m1
    m2 = rest.inf
    return (m1 < m2 and not A.contains(m2)), m2


def cotwo(A: SetDescriptor) -> SetDescriptor:
    """Convex hull that keeps an isolated infimum isolated.

    Equals ``co(A minus {inf A}) ∪ {inf A}`` when ``inf A < inf(A minus {inf A})``
    and the latter is not in ``A``; equals ``co(A)`` otherwise.

    >>> str(cotwo(SetDescriptor.points([0]).union(SetDescriptor.interval(1, 2, False))))
    '{0} ∪ (1,2]'
    """
    A._require_nonempty()
    isolated, _ = _second_branch(A)
    if not isolated:
        return A.co()
    m1 = A.inf
    return A.without_point(m1).co().union(SetDescriptor.points([m1]))


def inftwo(A: SetDescriptor) -> float:
    """Second infimum: ``inf(A minus {inf A})`` in the isolated branch, ``inf A`` otherwise."""
    A._require_nonempty()
    isolated, m2 = _second_branch(A)
    return m2 if isolated else A.inf


class Segment(NamedTuple):
    lo: float
    hi: float
    slope: float


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous function on ``[xs[0], xs[-1]]``, linear between knots."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys):
            raise DomainError("knot x and y sequences differ in length")
        if len(xs) < 2:
            raise DomainError("a piecewise-linear function needs a non-degenerate domain")
        if not all(math.isfinite(t) for t in xs + ys):
            raise DomainError("knots must be finite")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("knot x-values must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_knots(cls, knots: Sequence[tuple[float, float]]) -> PiecewiseLinearFn:
        return cls(tuple(k[0] for k in knots), tuple(k[1] for k in knots))

    @property
    def lo(self) -> float:
        return self.xs[0]

    @property
    def hi(self) -> float:
        return self.xs[-1]

    @cached_property
    def x_array(self) -> np.ndarray:
        return np.asarray(self.xs)

    @cached_property
    def y_array(self) -> np.ndarray:
        return np.asarray(self.ys)

    @cached_property
    def slopes(self) -> np.ndarray:
        return np.diff(self.y_array) / np.diff(self.x_array)

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.xs, self.ys))

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < self.lo) or np.any(arr > self.hi) or np.any(np.isnan(arr)):
            raise DomainError(f"query outside domain [{self.lo}, {self.hi}]")
        out = np.interp(arr, self.x_array, self.y_array)
        return float(out) if out.ndim == 0 else out


def pwl_right_derivative(f: PiecewiseLinearFn) -> tuple[Segment, ...]:
    """Right-hand derivative as half-open segments ``[lo, hi)`` with their slopes."""
    return tuple(
        Segment(a, b, float(s)) for a, b, s in zip(f.xs, f.xs[1:], f.slopes)
    )


def pwl_is_convex(f: PiecewiseLinearFn, tol: float = TOL_EXACT) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    return bool(np.all(np.diff(f.slopes) >= -tol))


def integrate_segments(segments: Sequence[Segment], y0: float) -> PiecewiseLinearFn:
    """Inverse of :func:`pwl_right_derivative`: rebuild knots from slopes and a start value."""
    if not segments:
        raise DomainError("need at least one segment")
    xs = [segments[0].lo]
    ys = [float(y0)]
    for seg in segments:
        if seg.lo != xs[-1]:
            raise DomainError("segments must be contiguous")
        xs.append(seg.hi)
        ys.append(ys[-1] + seg.slope * (seg.hi - seg.lo))
    return PiecewiseLinearFn(tuple(xs), tuple(ys))
