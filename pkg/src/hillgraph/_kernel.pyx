# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled monodromy kernel; mirrors ``_kernel_py`` step for step."""

import numpy as np

from libc.math cimport NAN, atan2, cos, cosh, fabs, floor, sin, sinh, sqrt

cdef double SQRT3_12 = 0.14433756729740643  # sqrt(3) / 12
cdef double PI = 3.141592653589793


cdef inline void _expm_coeffs(double d, double* c, double* s) noexcept nogil:
    cdef double r
    if fabs(d) < 1e-4:
        c[0] = 1.0 + d / 2.0 + d * d / 24.0 + d * d * d / 720.0
        s[0] = 1.0 + d / 6.0 + d * d / 120.0 + d * d * d / 5040.0
    elif d > 0.0:
        r = sqrt(d)
        c[0] = cosh(r)
        s[0] = sinh(r) / r
    else:
        r = sqrt(-d)
        c[0] = cos(r)
        s[0] = sin(r) / r


cdef inline double _angle(double u, double du, long crossings) noexcept nogil:
    # the Pruefer angle only passes k*pi upwards (there u = 0 and the angle
    # increases at rate 1), so it is pi * crossings plus atan2 reduced mod pi
    cdef double phi = atan2(u, du)
    if phi < 0.0:
        phi += PI
    elif phi >= PI:
        phi -= PI
    return PI * crossings + phi


cdef inline bint _side(double u, double du) noexcept nogil:
    return u > 0.0 or (u == 0.0 and du > 0.0)


def magnus_transfer(double[::1] h, double[::1] q1, double[::1] q2, double[::1] lams, bint angles=True):
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t m = lams.shape[0]
    out_arr = np.empty((m, 6), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double lam, hi, v1, v2, vbar, k, cc, ss
    cdef double e11, e12, e21, e22
    cdef double c, cp, s, sp, t0, t1
    cdef long zc, zs
    cdef bint side_c, side_s, new_side
    with nogil:
        for j in range(m):
            lam = lams[j]
            c = 1.0
            cp = 0.0
            s = 0.0
            sp = 1.0
            zc = 0
            zs = 0
            side_c = True
            side_s = True
            for i in range(n):
                hi = h[i]
                v1 = q1[i] - lam
                v2 = q2[i] - lam
                vbar = 0.5 * (v1 + v2)
                k = SQRT3_12 * hi * hi * (v1 - v2)
                _expm_coeffs(k * k + hi * hi * vbar, &cc, &ss)
                e11 = cc + ss * k
                e12 = ss * hi
                e21 = ss * hi * vbar
                e22 = cc - ss * k
                t0 = e11 * c + e12 * cp
                t1 = e21 * c + e22 * cp
                c = t0
                cp = t1
                t0 = e11 * s + e12 * sp
                t1 = e21 * s + e22 * sp
                s = t0
                sp = t1
                if angles:
                    new_side = _side(c, cp)
                    if new_side != side_c:
                        zc += 1
                        side_c = new_side
                    new_side = _side(s, sp)
                    if new_side != side_s:
                        zs += 1
                        side_s = new_side
            out[j, 0] = c
            out[j, 1] = cp
            out[j, 2] = s
            out[j, 3] = sp
            if angles:
                out[j, 4] = _angle(c, cp, zc)
                out[j, 5] = _angle(s, sp, zs)
            else:
                out[j, 4] = NAN
                out[j, 5] = NAN
    return out_arr


def magnus_path(double[::1] h, double[::1] q1, double[::1] q2, double lam):
    cdef Py_ssize_t n = h.shape[0]
    out_arr = np.empty((n + 1, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i
    cdef double hi, v1, v2, vbar, k, cc, ss, e11, e12, e21, e22
    cdef double c = 1.0, cp = 0.0, s = 0.0, sp = 1.0, t0, t1
    out[0, 0] = c
    out[0, 1] = cp
    out[0, 2] = s
    out[0, 3] = sp
    with nogil:
        for i in range(n):
            hi = h[i]
            v1 = q1[i] - lam
            v2 = q2[i] - lam
            vbar = 0.5 * (v1 + v2)
            k = SQRT3_12 * hi * hi * (v1 - v2)
            _expm_coeffs(k * k + hi * hi * vbar, &cc, &ss)
            e11 = cc + ss * k
            e12 = ss * hi
            e21 = ss * hi * vbar
            e22 = cc - ss * k
            t0 = e11 * c + e12 * cp
            t1 = e21 * c + e22 * cp
            c = t0
            cp = t1
            t0 = e11 * s + e12 * sp
            t1 = e21 * s + e22 * sp
            s = t0
            sp = t1
            out[i + 1, 0] = c
            out[i + 1, 1] = cp
            out[i + 1, 2] = s
            out[i + 1, 3] = sp
    return out_arr
