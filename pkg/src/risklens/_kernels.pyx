# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the scans in ``risklens._kernels_py``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline int _sign_tol(double d, double tol) nogil:
    if d > tol:
        return 1
    if d < -tol:
        return -1
    return 0


def ordinal_violation(u, v, double tol):
    cdef const double[:] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0]
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(i + 1, n):
            if _sign_tol(uu[i] - uu[j], tol) != _sign_tol(vv[i] - vv[j], tol):
                return i, j
    return None


def crossratio_violation(u, v, double tol):
    cdef const double[:] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double du1, dv1, du2, dv2
    for i in range(n):
        for j in range(n):
            du1 = uu[j] - uu[i]
            dv1 = vv[j] - vv[i]
            if not (du1 > tol and dv1 > 0):
                continue
            for k in range(n):
                du2 = uu[k] - uu[j]
                if not du2 > tol:
                    continue
                dv2 = vv[k] - vv[j]
                if du2 / du1 < dv2 / dv1 - tol:
                    return i, j, k
    return None


def lottery_violation(u, v, P, double tol):
    cdef const double[:] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[:, :] pp = np.ascontiguousarray(P, dtype=np.float64)
    cdef Py_ssize_t rows = pp.shape[0]
    cdef Py_ssize_t n = uu.shape[0]
    cdef Py_ssize_t r, x, a
    cdef double eu, ev, du, dv
    for r in range(rows):
        eu = 0.0
        ev = 0.0
        for a in range(n):
            eu += pp[r, a] * uu[a]
            ev += pp[r, a] * vv[a]
        for x in range(n):
            du = uu[x] - eu
            dv = vv[x] - ev
            if du >= -tol and dv < -tol:
                return r, x, 0
            if du > tol and dv <= tol:
                return r, x, 1
    return None


def chi_atoms(at, mass, double alpha, ells):
    cdef const double[:] aa = np.ascontiguousarray(at, dtype=np.float64)
    cdef const double[:] mm = np.ascontiguousarray(mass, dtype=np.float64)
    cdef const double[:] ll = np.ascontiguousarray(ells, dtype=np.float64).ravel()
    cdef Py_ssize_t m = aa.shape[0]
    cdef Py_ssize_t q = ll.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cum = np.empty(m + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tail = np.empty(m + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(q)
    cdef Py_ssize_t i, lo, hi, mid
    cdef double ell
    cum[0] = 0.0
    for i in range(m):
        cum[i + 1] = cum[i] + mm[i]
    tail[m] = 0.0
    for i in range(m - 1, -1, -1):
        tail[i] = tail[i + 1] + aa[i] * mm[i]
    for i in range(q):
        ell = ll[i]
        lo = 0
        hi = m
        while lo < hi:  # bisect_right
            mid = (lo + hi) // 2
            if ell < aa[mid]:
                hi = mid
            else:
                lo = mid + 1
        out[i] = (alpha + cum[lo]) * ell + tail[lo]
    return out.reshape(np.shape(ells))
