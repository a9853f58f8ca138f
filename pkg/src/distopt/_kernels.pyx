# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Semantics mirror ``_fallback`` exactly."""

import numpy as np
from libc.math cimport fabs


def quad_sgd(const double[:, ::1] H, const double[::1] b, double[::1] x, double[::1] s,
             const double[::1] steps, const double[:, ::1] noise, const long[::1] marks):
    cdef Py_ssize_t n = x.shape[0], N = steps.shape[0], C = marks.shape[0]
    cdef Py_ssize_t t, i, j, c = 0
    cdef bint noisy = noise.shape[0] > 0
    cdef double acc, h
    out_x = np.empty((C, n))
    out_s = np.empty((C, n))
    cdef double[:, ::1] ox = out_x, os = out_s
    cdef double[::1] g = np.empty(n)
    for t in range(N):
        h = steps[t]
        for i in range(n):
            acc = -b[i]
            for j in range(n):
                acc = acc + H[i, j] * x[j]
            if noisy:
                acc = acc + noise[t, i]
            g[i] = acc
        for i in range(n):
            x[i] = x[i] - h * g[i]
            s[i] = s[i] + x[i]
        while c < C and marks[c] == t:
            for i in range(n):
                ox[c, i] = x[i]
                os[c, i] = s[i]
            c += 1
    return out_x, out_s


def sliding_l1(const double[::1] g, const double[::1] x, double beta, long T, double weight,
               const double[:, ::1] dirs, double tau):
    cdef Py_ssize_t n = x.shape[0], t, i
    cdef bint zo = dirs.shape[0] > 0
    cdef double p, theta, sub, fp, fm, scale, denom, ui
    u_arr = np.array(x, copy=True)
    ut_arr = np.array(x, copy=True)
    cdef double[::1] u = u_arr, ut = ut_arr
    for t in range(1, T + 1):
        p = 0.5 * t
        theta = 2.0 * (t + 1) / (t * (t + 3.0))
        denom = beta * (1.0 + p)
        if zo:
            fp = 0.0
            fm = 0.0
            for i in range(n):
                fp = fp + fabs(u[i] + tau * dirs[t - 1, i])
                fm = fm + fabs(u[i] - tau * dirs[t - 1, i])
            scale = n / (2.0 * tau) * weight * (fp - fm)
        for i in range(n):
            ui = u[i]
            if zo:
                sub = scale * dirs[t - 1, i]
            elif ui > 0:
                sub = weight
            elif ui < 0:
                sub = -weight
            else:
                sub = 0.0
            u[i] = (beta * x[i] + beta * p * ui - g[i] - sub) / denom
            ut[i] = (1.0 - theta) * ut[i] + theta * u[i]
    return u_arr, ut_arr
