# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: tree split search and SVR coordinate descent.

Keep the arithmetic order identical to ``_pykernels`` — the tree builder
relies on both backends producing the same floats for the same node.
"""

from libc.math cimport INFINITY, NAN, fabs
from libc.stdint cimport int64_t


def best_split(const double[:, ::1] xs, const double[:, ::1] ys, Py_ssize_t min_leaf):
    """See _pykernels.best_split; same contract, same tie-breaking."""
    cdef Py_ssize_t d = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1]
    cdef Py_ssize_t f, i, nl
    cdef double left_sum, total, score, best_score, best_thr
    cdef Py_ssize_t best_f = -1

    best_score = -INFINITY
    best_thr = NAN
    if n < 2 * min_leaf:
        return -1, NAN, -INFINITY

    for f in range(d):
        total = 0.0
        for i in range(n):
            total += ys[f, i]
        left_sum = 0.0
        for i in range(n - 1):
            left_sum += ys[f, i]
            nl = i + 1
            if nl < min_leaf or n - nl < min_leaf:
                continue
            if not xs[f, i] < xs[f, i + 1]:
                continue
            score = (
                left_sum * left_sum / (<double> nl)
                + (total - left_sum) * (total - left_sum) / (<double> (n - nl))
            )
            if score > best_score:
                best_score = score
                best_f = f
                best_thr = (xs[f, i] + xs[f, i + 1]) * 0.5
    return best_f, best_thr, best_score


def svr_pass(
    const double[:, ::1] xb,
    const double[::1] y,
    double[::1] beta,
    double[::1] w,
    const double[::1] qii,
    double c,
    double eps,
    const int64_t[::1] order,
):
    """See _pykernels.svr_pass; updates beta and w in place."""
    cdef Py_ssize_t n = xb.shape[0]
    cdef Py_ssize_t d = xb.shape[1]
    cdef Py_ssize_t idx, i, j
    cdef double g, b, viol, max_viol, q, z, t, nb, delta

    max_viol = 0.0
    for idx in range(n):
        i = <Py_ssize_t> order[idx]
        g = 0.0
        for j in range(d):
            g += xb[i, j] * w[j]
        g -= y[i]
        b = beta[i]

        if b == 0.0:
            viol = fabs(g) - eps
            if viol < 0.0:
                viol = 0.0
        elif b >= c:
            # At the upper box edge the only allowed move is down, which pays
            # off iff g > -eps; g <= -eps is the optimal bounded-SV state.
            viol = g + eps
            if viol < 0.0:
                viol = 0.0
        elif b <= -c:
            viol = eps - g
            if viol < 0.0:
                viol = 0.0
        elif b > 0.0:
            viol = fabs(g + eps)
        else:
            viol = fabs(g - eps)
        if viol > max_viol:
            max_viol = viol

        q = qii[i]
        z = b - g / q
        t = eps / q
        if z > t:
            nb = z - t
        elif z < -t:
            nb = z + t
        else:
            nb = 0.0
        if nb > c:
            nb = c
        elif nb < -c:
            nb = -c
        if nb != b:
            delta = nb - b
            for j in range(d):
                w[j] += delta * xb[i, j]
            beta[i] = nb
    return max_viol
