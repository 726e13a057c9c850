"""Pure-Python (numpy) implementations of the hot scans.

Every function here has a twin with the same signature and the same
first-witness ordering in the compiled ``_kernels`` extension.
"""

from __future__ import annotations

import numpy as np


def _sign_tol(d: np.ndarray, tol: float) -> np.ndarray:
    return np.where(d > tol, 1, np.where(d < -tol, -1, 0))


def ordinal_violation(u, v, tol):
    """First pair ``(i, j)``, ``i < j``, on which ``u`` and ``v`` rank differently."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    su = _sign_tol(u[:, None] - u[None, :], tol)
    sv = _sign_tol(v[:, None] - v[None, :], tol)
    bad = np.triu(su != sv, k=1)
    hits = np.argwhere(bad)
    if hits.size == 0:
        return None
    i, j = hits[0]
    return int(i), int(j)


def crossratio_violation(u, v, tol):
    """First triple ``(i, j, k)`` with ``u_i < u_j < u_k`` breaking the cross-ratio bound.

    Triples whose ``v`` gaps are not positive are skipped; ordinal agreement
    is checked separately.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = u.size
    for i in range(n):
        du1 = u[None, :] - u[i]  # u_j - u_i, indexed by j
        dv1 = v[None, :] - v[i]
        du2 = u[None, :] - u[:, None]  # u_k - u_j, indexed by (j, k)
        dv2 = v[None, :] - v[:, None]
        ok_shape = (du1.T > tol) & (du2 > tol) & (dv1.T > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            lhs = du2 / du1.T
            rhs = dv2 / dv1.T
        bad = ok_shape & (lhs < rhs - tol)
        hits = np.argwhere(bad)
        if hits.size:
            j, k = hits[0]
            return i, int(j), int(k)
    return None


def lottery_violation(u, v, P, tol):
    """Scan lotteries (rows of ``P``) against every sure alternative.

    Returns ``(row, x, kind)`` for the first failure of the weak (kind 0) or
    strict (kind 1) implication, or None.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    P = np.asarray(P, dtype=float)
    eu = P @ u
    ev = P @ v
    du = u[None, :] - eu[:, None]
    dv = v[None, :] - ev[:, None]
    weak = (du >= -tol) & (dv < -tol)
    strict = (du > tol) & (dv <= tol)
    bad = weak | strict
    if not bad.any():
        return None
    flat = int(np.argmax(bad))
    row, x = divmod(flat, u.size)
    return row, x, 0 if weak[row, x] else 1


def chi_atoms(at, mass, alpha, ells):
    """Valuation transform of ``alpha`` at minus infinity plus sorted atoms.

    ``chi(l) = F(l) * l + sum_{at > l} at * mass``.
    """
    at = np.asarray(at, dtype=float)
    mass = np.asarray(mass, dtype=float)
    ells = np.asarray(ells, dtype=float)
    cum = np.concatenate(([0.0], np.cumsum(mass)))
    tail = np.concatenate((np.cumsum((at * mass)[::-1])[::-1], [0.0]))
    idx = np.searchsorted(at, ells, side="right")
    return (alpha + cum[idx]) * ells + tail[idx]
