# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the loop-bound kernels (see ``_pykernels`` for docs)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def fused_dp(y_in, double lam):
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    out = np.empty(n)
    cdef double[::1] beta = out
    if n == 0:
        return out
    if n == 1 or lam <= 0.0:
        out[:] = y_in
        return out

    cdef double[::1] x = np.zeros(2 * n)
    cdef double[::1] a = np.zeros(2 * n)
    cdef double[::1] b = np.zeros(2 * n)
    cdef double[::1] tm = np.zeros(n - 1)
    cdef double[::1] tp = np.zeros(n - 1)
    cdef Py_ssize_t k, l, r, lo, hi
    cdef double afirst, bfirst, alast, blast, alo, blo, ahi, bhi, last

    tm[0] = -lam + y[0]
    tp[0] = lam + y[0]
    l = n - 1
    r = n
    x[l] = tm[0]
    x[r] = tp[0]
    a[l] = 1.0
    b[l] = -y[0] + lam
    a[r] = -1.0
    b[r] = y[0] + lam
    afirst = 1.0
    bfirst = -lam - y[1]
    alast = -1.0
    blast = -lam + y[1]

    for k in range(1, n - 1):
        alo = afirst
        blo = bfirst
        lo = l
        while lo <= r:
            if alo * x[lo] + blo > -lam:
                break
            alo += a[lo]
            blo += b[lo]
            lo += 1

        ahi = alast
        bhi = blast
        hi = r
        while hi >= lo:
            if -ahi * x[hi] - bhi < lam:
                break
            ahi += a[hi]
            bhi += b[hi]
            hi -= 1

        tm[k] = (-lam - blo) / alo
        l = lo - 1
        x[l] = tm[k]
        tp[k] = (lam + bhi) / (-ahi)
        r = hi + 1
        x[r] = tp[k]

        a[l] = alo
        b[l] = blo + lam
        a[r] = ahi
        b[r] = bhi + lam
        afirst = 1.0
        bfirst = -lam - y[k + 1]
        alast = -1.0
        blast = -lam + y[k + 1]

    alo = afirst
    blo = bfirst
    lo = l
    while lo <= r:
        if alo * x[lo] + blo > 0.0:
            break
        alo += a[lo]
        blo += b[lo]
        lo += 1
    last = -blo / alo
    beta[n - 1] = last
    for k in range(n - 2, -1, -1):
        if last > tp[k]:
            last = tp[k]
        elif last < tm[k]:
            last = tm[k]
        beta[k] = last
    return out


cdef inline double _soft(double z, double t) nogil:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def cd_gram(double[:, ::1] G, double[::1] q, double[::1] beta, double lam,
            double tol, int max_sweeps):
    cdef Py_ssize_t k = beta.shape[0]
    cdef Py_ssize_t j, i
    cdef int sweep
    cdef double gjj, old, new, delta, maxd, step
    for sweep in range(max_sweeps):
        maxd = 0.0
        for j in range(k):
            gjj = G[j, j]
            if gjj <= 0.0:
                continue
            old = beta[j]
            new = _soft(q[j] + gjj * old, lam) / gjj
            if new != old:
                delta = new - old
                beta[j] = new
                # G is symmetric: row j equals column j and is contiguous
                for i in range(k):
                    q[i] -= delta * G[j, i]
                step = fabs(delta) * sqrt(gjj)
                if step > maxd:
                    maxd = step
        if maxd < tol:
            return sweep + 1
    return -max_sweeps


def cd_csc(const int[::1] indptr, const int[::1] indices, const double[::1] data,
           const double[::1] colsq, active, double[::1] beta, double[::1] r,
           double lam, double tol, int max_sweeps):
    cdef cnp.intp_t[::1] act = np.ascontiguousarray(active, dtype=np.intp)
    cdef Py_ssize_t na = act.shape[0]
    cdef Py_ssize_t t, j, p
    cdef int sweep
    cdef double cj, old, new, delta, maxd, step, z
    for sweep in range(max_sweeps):
        maxd = 0.0
        for t in range(na):
            j = act[t]
            cj = colsq[j]
            if cj <= 0.0:
                continue
            z = 0.0
            for p in range(indptr[j], indptr[j + 1]):
                z += data[p] * r[indices[p]]
            old = beta[j]
            new = _soft(z + cj * old, lam) / cj
            if new != old:
                delta = new - old
                beta[j] = new
                for p in range(indptr[j], indptr[j + 1]):
                    r[indices[p]] -= delta * data[p]
                step = fabs(delta) * sqrt(cj)
                if step > maxd:
                    maxd = step
        if maxd < tol:
            return sweep + 1
    return -max_sweeps
