# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 kernels. Arithmetic order mirrors ``_kernels_py`` exactly."""
import numpy as np


def lti_rk4(const double[:, ::1] M, const double[:, ::1] F0, const double[:, ::1] Fm,
            const double[:, ::1] F1, const double[::1] x0, double h):
    cdef Py_ssize_t steps = F0.shape[0]
    cdef Py_ssize_t n = x0.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double acc
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0

    out = np.empty((steps + 1, n), dtype=np.float64)
    cdef double[:, ::1] X = out
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] y = np.empty(n)
    cdef double[::1] k1 = np.empty(n)
    cdef double[::1] k2 = np.empty(n)
    cdef double[::1] k3 = np.empty(n)
    cdef double[::1] k4 = np.empty(n)

    for i in range(n):
        X[0, i] = x[i]
    for k in range(steps):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + M[i, j] * x[j]
            k1[i] = acc + F0[k, i]
        for i in range(n):
            y[i] = x[i] + half * k1[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + M[i, j] * y[j]
            k2[i] = acc + Fm[k, i]
        for i in range(n):
            y[i] = x[i] + half * k2[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + M[i, j] * y[j]
            k3[i] = acc + Fm[k, i]
        for i in range(n):
            y[i] = x[i] + h * k3[i]
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc = acc + M[i, j] * y[j]
            k4[i] = acc + F1[k, i]
        for i in range(n):
            x[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            X[k + 1, i] = x[i]
    return out


def gradient_flow(const double[::1] m, const double[::1] phi, double gamma, double h,
                  double theta0, Py_ssize_t nsub):
    cdef Py_ssize_t N = m.shape[0]
    cdef Py_ssize_t k, j
    cdef double hs = h / nsub
    cdef double half = 0.5 * hs
    cdef double sixth = hs / 6.0
    cdef double x = theta0
    cdef double a0, a1, a2, p0, p1, p2, m0, m1, m2, dp, dm
    cdef double q1, q2, q3, q4

    out = np.empty(N, dtype=np.float64)
    cdef double[::1] th = out
    th[0] = x
    for k in range(N - 1):
        dp = phi[k + 1] - phi[k]
        dm = m[k + 1] - m[k]
        for j in range(nsub):
            a0 = <double>j / nsub
            a1 = (j + 0.5) / nsub
            a2 = <double>(j + 1) / nsub
            p0 = phi[k] + dp * a0
            p1 = phi[k] + dp * a1
            p2 = phi[k] + dp * a2
            m0 = m[k] + dm * a0
            m1 = m[k] + dm * a1
            m2 = m[k] + dm * a2
            q1 = -gamma * p0 * (p0 * x - m0)
            q2 = -gamma * p1 * (p1 * (x + half * q1) - m1)
            q3 = -gamma * p1 * (p1 * (x + half * q2) - m1)
            q4 = -gamma * p2 * (p2 * (x + hs * q3) - m2)
            x = x + sixth * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
        th[k + 1] = x
    return out
