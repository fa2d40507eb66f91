# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot sequential loops.

Mirrors pfol._kernels_py exactly (same signatures, same update order); the
backend selector prefers this module when the extension was built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, sqrt
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

KIND_BALL = 0
KIND_BOX = 1
KIND_L1 = 2


cdef int _cmp_desc(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*> a)[0]
    cdef double y = (<const double*> b)[0]
    if x < y:
        return 1
    if x > y:
        return -1
    return 0


cdef void _lmo(int kind, double[::1] param, double[::1] d, double[::1] v) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, best
    cdef double rho, nrm, amax, a
    if kind == 0:  # ball
        rho = param[0]
        nrm = 0.0
        for i in range(n):
            nrm += d[i] * d[i]
        nrm = sqrt(nrm)
        if nrm == 0.0:
            for i in range(n):
                v[i] = 0.0
            v[0] = -rho
        else:
            for i in range(n):
                v[i] = -rho * d[i] / nrm
    elif kind == 1:  # box
        for i in range(n):
            v[i] = -param[i] if d[i] >= 0.0 else param[i]
    else:  # l1
        rho = param[0]
        best = 0
        amax = -1.0
        for i in range(n):
            a = fabs(d[i])
            if a > amax:  # strict: lowest index wins ties
                amax = a
                best = i
        for i in range(n):
            v[i] = 0.0
        if amax == 0.0:
            v[0] = -rho
        else:
            v[best] = -rho if d[best] > 0.0 else rho


cdef int _project(int kind, double[::1] param, double[::1] x, double* scratch) noexcept nogil:
    # in-place Euclidean projection; scratch must hold n doubles for l1
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, k
    cdef double rho, nrm, s, css, theta, a
    if kind == 0:
        rho = param[0]
        nrm = 0.0
        for i in range(n):
            nrm += x[i] * x[i]
        nrm = sqrt(nrm)
        if nrm > rho:
            if rho > 0.0:
                for i in range(n):
                    x[i] *= rho / nrm
            else:
                for i in range(n):
                    x[i] = 0.0
    elif kind == 1:
        for i in range(n):
            if x[i] > param[i]:
                x[i] = param[i]
            elif x[i] < -param[i]:
                x[i] = -param[i]
    else:
        rho = param[0]
        s = 0.0
        for i in range(n):
            s += fabs(x[i])
        if s <= rho:
            return 0
        if rho <= 0.0:
            for i in range(n):
                x[i] = 0.0
            return 0
        for i in range(n):
            scratch[i] = fabs(x[i])
        qsort(scratch, n, sizeof(double), _cmp_desc)
        css = 0.0
        theta = 0.0
        k = 0
        for i in range(n):
            css += scratch[i]
            if scratch[i] * (i + 1) > css - rho:
                k = i
                theta = (css - rho) / (i + 1.0)
        for i in range(n):
            a = fabs(x[i]) - theta
            if a <= 0.0:
                x[i] = 0.0
            elif x[i] < 0.0:
                x[i] = -a
            else:
                x[i] = a
    return 0


def ofw_full_run(double[:, ::1] thetas, double[:, ::1] linears, double alpha,
                 double T0, double[::1] x1, int kind, double[::1] param):
    """Full-information online Frank-Wolfe loop; returns (plays, sigmas)."""
    cdef Py_ssize_t T = thetas.shape[0]
    cdef Py_ssize_t n = thetas.shape[1]
    plays_arr = np.empty((T, n))
    sigmas_arr = np.empty(T)
    S_arr = np.zeros(n)
    A_arr = np.empty(n)
    x_arr = np.empty(n)
    g_arr = np.empty(n)
    v_arr = np.empty(n)
    cdef double[:, ::1] plays = plays_arr
    cdef double[::1] sigmas = sigmas_arr
    cdef double[::1] S = S_arr
    cdef double[::1] A = A_arr
    cdef double[::1] x = x_arr
    cdef double[::1] g = g_arr
    cdef double[::1] v = v_arr
    cdef Py_ssize_t t, i
    cdef double W = T0
    cdef double den, num, sigma, step
    for i in range(n):
        A[i] = T0 * x1[i]
        x[i] = x1[i]
    with nogil:
        for t in range(T):
            for i in range(n):
                plays[t, i] = x[i]
            W += 1.0
            for i in range(n):
                S[i] += alpha * (x[i] - thetas[t, i]) + linears[t, i]
                A[i] += x[i]
                g[i] = S[i] + alpha * (W * x[i] - A[i])
            _lmo(kind, param, g, v)
            den = 0.0
            num = 0.0
            for i in range(n):
                step = v[i] - x[i]
                den += step * step
                num -= g[i] * step
            den *= alpha * W
            if den <= 0.0 or num <= 0.0:
                sigma = 0.0
            else:
                sigma = num / den
                if sigma > 1.0:
                    sigma = 1.0
            for i in range(n):
                x[i] += sigma * (v[i] - x[i])
            sigmas[t] = sigma
    return plays_arr, sigmas_arr


def ogd_run(double[:, ::1] thetas, double[:, ::1] linears, double alpha,
            double[::1] x1, int kind, double[::1] param):
    """Projected gradient loop with step 1/(alpha t); returns plays."""
    cdef Py_ssize_t T = thetas.shape[0]
    cdef Py_ssize_t n = thetas.shape[1]
    plays_arr = np.empty((T, n))
    x_arr = np.array(x1, dtype=np.float64)
    cdef double[:, ::1] plays = plays_arr
    cdef double[::1] x = x_arr
    cdef Py_ssize_t t, i
    cdef double g
    cdef double* scratch = <double*> malloc(n * sizeof(double))
    if scratch == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(T):
                for i in range(n):
                    plays[t, i] = x[i]
                for i in range(n):
                    g = alpha * (x[i] - thetas[t, i]) + linears[t, i]
                    x[i] -= g / (alpha * (t + 1.0))
                _project(kind, param, x, scratch)
    finally:
        free(scratch)
    return plays_arr


def fw_solve(double[::1] S, double[::1] A, double W, double alpha, int kind,
             double[::1] param, double eps, double[::1] z0, long max_iter):
    """Gap-certified Frank-Wolfe descent; returns (z, iterations, gap, converged)."""
    cdef Py_ssize_t n = S.shape[0]
    z_arr = np.array(z0, dtype=np.float64)
    g_arr = np.empty(n)
    v_arr = np.empty(n)
    cdef double[::1] z = z_arr
    cdef double[::1] g = g_arr
    cdef double[::1] v = v_arr
    cdef double gap = INFINITY
    cdef long it = 0
    cdef Py_ssize_t i
    cdef double den, sigma, step
    cdef bint converged = False
    with nogil:
        while it < max_iter:
            it += 1
            for i in range(n):
                g[i] = S[i] + alpha * (W * z[i] - A[i])
            _lmo(kind, param, g, v)
            gap = 0.0
            den = 0.0
            for i in range(n):
                step = v[i] - z[i]
                gap -= g[i] * step
                den += step * step
            if gap <= eps:
                converged = True
                break
            den *= alpha * W
            if den <= 0.0:
                sigma = 0.0
            else:
                sigma = gap / den
                if sigma > 1.0:
                    sigma = 1.0
            for i in range(n):
                z[i] += sigma * (v[i] - z[i])
    return z_arr, int(it), gap, bool(converged)
