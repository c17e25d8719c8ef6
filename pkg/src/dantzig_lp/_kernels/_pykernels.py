"""Pure-Python reference versions of the compiled kernels.

Semantics must match ``_ckernels.pyx`` exactly; the test suite runs both.
"""
import math

import numpy as np


def fused_dp(y, lam):
    """Exact minimizer of 0.5*||y - b||^2 + lam * sum |b_{i+1} - b_i|.

    Forward pass keeps the derivative of the partial objective as a
    piecewise-linear function stored by its breakpoints in ``x`` (a deque
    living in ``[l, r]``) with slope/intercept increments ``a``/``b``.  The
    knots ``tm``/``tp`` are the clipping back-pointers for the backward pass.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    beta = np.empty(n)
    if n == 0:
        return beta
    if n == 1 or lam <= 0.0:
        beta[:] = y
        return beta

    x = [0.0] * (2 * n)
    a = [0.0] * (2 * n)
    b = [0.0] * (2 * n)
    tm = [0.0] * (n - 1)
    tp = [0.0] * (n - 1)
    yl = y.tolist()

    tm[0] = -lam + yl[0]
    tp[0] = lam + yl[0]
    l = n - 1
    r = n
    x[l] = tm[0]
    x[r] = tp[0]
    a[l] = 1.0
    b[l] = -yl[0] + lam
    a[r] = -1.0
    b[r] = yl[0] + lam
    afirst, bfirst = 1.0, -lam - yl[1]
    alast, blast = -1.0, -lam + yl[1]

    for k in range(1, n - 1):
        alo, blo = afirst, bfirst
        lo = l
        while lo <= r:
            if alo * x[lo] + blo > -lam:
                break
            alo += a[lo]
            blo += b[lo]
            lo += 1

        ahi, bhi = alast, blast
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
        afirst, bfirst = 1.0, -lam - yl[k + 1]
        alast, blast = -1.0, -lam + yl[k + 1]

    alo, blo = afirst, bfirst
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
    return beta


def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def cd_gram(G, q, beta, lam, tol, max_sweeps):
    """Coordinate descent on 0.5 b'Gb - c'b + lam ||b||_1 in covariance form.

    ``q`` holds the current gradient of the smooth part negated
    (``c - G beta``, i.e. ``X_A^T r``) and is updated in place together with
    ``beta``.  Returns the number of sweeps run, negated if ``tol`` was
    not reached.
    """
    k = beta.shape[0]
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
                q -= delta * G[:, j]
                step = abs(delta) * math.sqrt(gjj)
                if step > maxd:
                    maxd = step
        if maxd < tol:
            return sweep + 1
    return -max_sweeps


def cd_csc(indptr, indices, data, colsq, active, beta, r, lam, tol, max_sweeps):
    """Coordinate descent over ``active`` columns with residual updates.

    ``r`` (= y - X beta) and ``beta`` are updated in place.  Returns the
    number of sweeps run, negated if ``tol`` was not reached.
    """
    for sweep in range(max_sweeps):
        maxd = 0.0
        for j in active:
            cj = colsq[j]
            if cj <= 0.0:
                continue
            s, e = indptr[j], indptr[j + 1]
            idx = indices[s:e]
            vals = data[s:e]
            old = beta[j]
            new = _soft(float(vals @ r[idx]) + cj * old, lam) / cj
            if new != old:
                delta = new - old
                beta[j] = new
                r[idx] -= delta * vals
                step = abs(delta) * math.sqrt(cj)
                if step > maxd:
                    maxd = step
        if maxd < tol:
            return sweep + 1
    return -max_sweeps
