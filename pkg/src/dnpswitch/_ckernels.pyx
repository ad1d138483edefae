# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the Overhauser rate equation.

Same contract as ``_pykernels``; see there for argument conventions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, isfinite

cnp.import_array()


cdef inline double _rate(double B, double coef, double kappa, double bz,
                         double q, double target, double gd) noexcept nogil:
    cdef double E = kappa * (bz + B)
    return coef / (E * E + q) * (target - B) - gd * B


cdef double _bisect(double a, double b, double fa, double tol, double coef,
                    double kappa, double bz, double q, double target,
                    double gd) noexcept nogil:
    cdef double m, fm
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = _rate(m, coef, kappa, bz, q, target, gd)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a = m
            fa = fm
        else:
            b = m
    return 0.5 * (a + b)


def rate(double B, double coef, double kappa, double bz, double q,
         double target, double gd):
    return _rate(B, coef, kappa, bz, q, target, gd)


def rate_grid(double lo, double hi, Py_ssize_t n, double coef, double kappa,
              double bz, double q, double target, double gd):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] view = out
    cdef Py_ssize_t i
    cdef double span = hi - lo
    with nogil:
        for i in range(n + 1):
            view[i] = _rate(lo + span * <double>i / <double>n, coef, kappa, bz, q, target, gd)
    return out


def bisect(double a, double b, double fa, double tol, double coef, double kappa,
           double bz, double q, double target, double gd):
    return _bisect(a, b, fa, tol, coef, kappa, bz, q, target, gd)


def find_roots(double lo, double hi, Py_ssize_t n, double tol, double coef,
               double kappa, double bz, double q, double target, double gd):
    cdef list roots = []
    cdef double span = hi - lo
    cdef double x, f, r
    cdef double x_prev = lo
    cdef double f_prev = _rate(lo, coef, kappa, bz, q, target, gd)
    cdef Py_ssize_t i
    if f_prev == 0.0:
        roots.append(lo)
    for i in range(1, n + 1):
        x = lo + span * <double>i / <double>n
        f = _rate(x, coef, kappa, bz, q, target, gd)
        if f == 0.0:
            roots.append(x)
        elif f_prev != 0.0 and (f_prev < 0.0) != (f < 0.0):
            roots.append(_bisect(x_prev, x, f_prev, tol, coef, kappa, bz, q, target, gd))
        x_prev = x
        f_prev = f
    cdef list merged = []
    cdef double last = 0.0
    for r in roots:
        if merged and r - last < 2.0 * tol:
            continue
        merged.append(r)
        last = r
    return np.array(merged, dtype=np.float64), span / <double>n


def rk4(double B0, double dt, Py_ssize_t nsteps, double bsat, double conv_eps,
        Py_ssize_t conv_count, bint record, double coef, double kappa, double bz,
        double q, double target, double gd):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf
    cdef double[::1] view
    if record:
        buf = np.empty(nsteps + 1, dtype=np.float64)
    else:
        buf = np.empty(1, dtype=np.float64)
    view = buf
    view[0] = B0
    cdef double B = B0
    cdef double k1 = _rate(B, coef, kappa, bz, q, target, gd)
    cdef double k2, k3, k4, Bn
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef Py_ssize_t quiet = 0
    cdef Py_ssize_t n_done = 0
    cdef Py_ssize_t i
    cdef bint converged = False
    cdef bint diverged = False
    with nogil:
        for i in range(nsteps):
            k2 = _rate(B + half * k1, coef, kappa, bz, q, target, gd)
            k3 = _rate(B + half * k2, coef, kappa, bz, q, target, gd)
            k4 = _rate(B + dt * k3, coef, kappa, bz, q, target, gd)
            Bn = B + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not isfinite(Bn):
                diverged = True
                break
            if Bn > bsat:
                Bn = bsat
            elif Bn < -bsat:
                Bn = -bsat
            B = Bn
            n_done += 1
            if record:
                view[n_done] = B
            k1 = _rate(B, coef, kappa, bz, q, target, gd)
            if not isfinite(k1):
                diverged = True
                break
            if fabs(k1) < conv_eps:
                quiet += 1
                if quiet >= conv_count:
                    converged = True
                    break
            else:
                quiet = 0
    if record:
        values = buf[:n_done + 1].copy()
    else:
        buf[0] = B
        values = buf
    return values, n_done, converged, diverged
