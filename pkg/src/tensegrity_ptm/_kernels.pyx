# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``; same signatures."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, fabs, fmax

cnp.import_array()

BACKEND = "cython"


cdef inline void _resid(double L1, double L2, double a, double b, double f3, double f4,
                        double t1, double t2, double *ra, double *rb) noexcept nogil:
    cdef double s12 = sin(t1 + t2)
    ra[0] = L2 * s12 - a * sin(t1) + f3 * cos(t1)
    rb[0] = L1 * s12 - b * sin(t2) + f4 * cos(t2)


def trig_residuals(p, th1, th2):
    cdef double L1 = p[0], L2 = p[1], rho = p[2], f3 = p[3], f4 = p[4], f3x = p[5], f4x = p[6]
    cdef double a = 2 * rho + f3x, b = 2 * rho - f4x
    x1 = np.ascontiguousarray(th1, dtype=np.float64)
    x2 = np.ascontiguousarray(th2, dtype=np.float64)
    cdef double[::1] v1 = x1.reshape(-1), v2 = x2.reshape(-1)
    out_a = np.empty(v1.shape[0])
    out_b = np.empty(v1.shape[0])
    cdef double[::1] oa = out_a, ob = out_b
    cdef Py_ssize_t i
    with nogil:
        for i in range(v1.shape[0]):
            _resid(L1, L2, a, b, f3, f4, v1[i], v2[i], &oa[i], &ob[i])
    return out_a.reshape(x1.shape), out_b.reshape(x1.shape)


def polish(p, th1, th2, int maxiter=30, double tol=1e-14):
    cdef double L1 = p[0], L2 = p[1], rho = p[2], f3 = p[3], f4 = p[4], f3x = p[5], f4x = p[6]
    cdef double a = 2 * rho + f3x, b = 2 * rho - f4x
    x1 = np.array(th1, dtype=np.float64, copy=True)
    x2 = np.array(th2, dtype=np.float64, copy=True)
    shape = x1.shape
    x1 = np.ascontiguousarray(x1.reshape(-1))
    x2 = np.ascontiguousarray(x2.reshape(-1))
    cdef double[::1] v1 = x1, v2 = x2
    res = np.empty(v1.shape[0])
    cdef double[::1] r = res
    cdef Py_ssize_t i
    cdef int it
    cdef double ra, rb, c12, j11, j12, j21, j22, det
    with nogil:
        for i in range(v1.shape[0]):
            for it in range(maxiter):
                _resid(L1, L2, a, b, f3, f4, v1[i], v2[i], &ra, &rb)
                if fmax(fabs(ra), fabs(rb)) <= tol:
                    break
                c12 = cos(v1[i] + v2[i])
                j11 = L2 * c12 - a * cos(v1[i]) - f3 * sin(v1[i])
                j12 = L2 * c12
                j21 = L1 * c12
                j22 = L1 * c12 - b * cos(v2[i]) - f4 * sin(v2[i])
                det = j11 * j22 - j12 * j21
                if det == 0.0:
                    break
                v1[i] -= (j22 * ra - j12 * rb) / det
                v2[i] -= (j11 * rb - j21 * ra) / det
            _resid(L1, L2, a, b, f3, f4, v1[i], v2[i], &ra, &rb)
            r[i] = fmax(fabs(ra), fabs(rb))
    return x1.reshape(shape), x2.reshape(shape), res.reshape(shape)


def minors(p, double k, th1, th2):
    cdef double L1 = p[0], L2 = p[1], rho = p[2], f3 = p[3], f4 = p[4], f3x = p[5], f4x = p[6]
    x1 = np.ascontiguousarray(th1, dtype=np.float64)
    x2 = np.ascontiguousarray(th2, dtype=np.float64)
    shape = x1.shape
    cdef double[::1] v1 = x1.reshape(-1), v2 = x2.reshape(-1)
    m1 = np.empty(v1.shape[0])
    dt = np.empty(v1.shape[0])
    cdef double[::1] om = m1, od = dt
    cdef Py_ssize_t i
    cdef double c12, h11, h22, h12
    with nogil:
        for i in range(v1.shape[0]):
            c12 = cos(v1[i] + v2[i])
            h11 = k * L1 * ((2 * rho + f3x) * cos(v1[i]) - L2 * c12 + f3 * sin(v1[i]))
            h22 = k * L2 * ((2 * rho - f4x) * cos(v2[i]) - L1 * c12 + f4 * sin(v2[i]))
            h12 = -k * L1 * L2 * c12
            om[i] = h11
            od[i] = h11 * h22 - h12 * h12
    return m1.reshape(shape), dt.reshape(shape)


cdef void _fl_derivs(double L1, double L2, double rho, double f3, double f4, double f3x,
                     double f4x, double k, double l0, double th1, double th2,
                     double *out) noexcept nogil:
    cdef double s1 = sin(th1), c1 = cos(th1), s2 = sin(th2), c2 = cos(th2)
    cdef double s12 = sin(th1 + th2), c12 = cos(th1 + th2)
    cdef double d1 = rho * rho - 2 * rho * L2 * c2 + L2 * L2
    cdef double d2 = L1 * L1 - 2 * rho * L1 * c1 + rho * rho
    cdef double d3 = (L1 * L1 + L2 * L2 + rho * rho - 2 * rho * L1 * c1 - 2 * rho * L2 * c2
                      + 2 * L1 * L2 * c12)
    cdef double l1 = sqrt(fmax(d1, 0.0)), l2 = sqrt(fmax(d2, 0.0)), l3 = sqrt(fmax(d3, 0.0))
    cdef double lmin = l1
    if l2 < lmin:
        lmin = l2
    if l3 < lmin:
        lmin = l3
    if l1 == 0.0:
        l1 = 1.0
    if l2 == 0.0:
        l2 = 1.0
    if l3 == 0.0:
        l3 = 1.0
    cdef double e1 = 2 * rho * L2 * s2
    cdef double e2 = 2 * rho * L1 * s1
    cdef double e3a = 2 * rho * L1 * s1 - 2 * L1 * L2 * s12
    cdef double e3b = 2 * rho * L2 * s2 - 2 * L1 * L2 * s12
    cdef double q1 = 2 * rho * L2 * c2
    cdef double q2 = 2 * rho * L1 * c1
    cdef double cr = -2 * L1 * L2 * c12
    cdef double t1 = (l1 - l0) / (2 * l1), t2 = (l2 - l0) / (2 * l2), t3 = (l3 - l0) / (2 * l3)
    cdef double u1 = l0 / (4 * l1 * l1 * l1), u2 = l0 / (4 * l2 * l2 * l2)
    cdef double u3 = l0 / (4 * l3 * l3 * l3)
    out[0] = k * (t2 * e2 + t3 * e3a) - k * (f3 * L1 * c1 - f3x * L1 * s1)
    out[1] = k * (t1 * e1 + t3 * e3b) - k * (f4 * L2 * c2 + f4x * L2 * s2)
    out[2] = (k * (u2 * e2 * e2 + t2 * q2 + u3 * e3a * e3a + t3 * (2 * rho * L1 * c1 + cr))
              + k * (f3 * L1 * s1 + f3x * L1 * c1))
    out[3] = k * (u3 * e3a * e3b + t3 * cr)
    out[4] = (k * (u1 * e1 * e1 + t1 * q1 + u3 * e3b * e3b + t3 * (2 * rho * L2 * c2 + cr))
              + k * (f4 * L2 * s2 - f4x * L2 * c2))
    out[5] = lmin


def freelength_derivatives(p, double k, double l0, th1, th2):
    cdef double L1 = p[0], L2 = p[1], rho = p[2], f3 = p[3], f4 = p[4], f3x = p[5], f4x = p[6]
    x1 = np.ascontiguousarray(th1, dtype=np.float64)
    x2 = np.ascontiguousarray(th2, dtype=np.float64)
    shape = x1.shape
    cdef double[::1] v1 = x1.reshape(-1), v2 = x2.reshape(-1)
    cdef Py_ssize_t n = v1.shape[0], i, j
    out = np.empty((6, n))
    cdef double[:, ::1] o = out
    cdef double buf[6]
    with nogil:
        for i in range(n):
            _fl_derivs(L1, L2, rho, f3, f4, f3x, f4x, k, l0, v1[i], v2[i], buf)
            for j in range(6):
                o[j, i] = buf[j]
    return tuple(out[j].reshape(shape) for j in range(6))


def freelength_newton(p, double k, double l0, th1, th2, int maxiter=60, double clamp=0.5,
                      double gtol=1e-12, double lmin_floor=1e-9):
    cdef double L1 = p[0], L2 = p[1], rho = p[2], f3 = p[3], f4 = p[4], f3x = p[5], f4x = p[6]
    x1 = np.array(th1, dtype=np.float64, copy=True)
    x2 = np.array(th2, dtype=np.float64, copy=True)
    shape = x1.shape
    x1 = np.ascontiguousarray(x1.reshape(-1))
    x2 = np.ascontiguousarray(x2.reshape(-1))
    cdef double[::1] v1 = x1, v2 = x2
    cdef Py_ssize_t n = v1.shape[0], i
    gn_arr = np.empty(n)
    st_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] gn = gn_arr
    cdef long long[::1] st = st_arr
    cdef double buf[6]
    cdef double det, scale, d1, d2, step, fac, g
    cdef int it
    with nogil:
        for i in range(n):
            st[i] = 1
            for it in range(maxiter):
                _fl_derivs(L1, L2, rho, f3, f4, f3x, f4x, k, l0, v1[i], v2[i], buf)
                if buf[5] < lmin_floor:
                    st[i] = 2
                    break
                if fmax(fabs(buf[0]), fabs(buf[1])) < gtol:
                    st[i] = 0
                    break
                det = buf[2] * buf[4] - buf[3] * buf[3]
                scale = fabs(buf[2]) + fabs(buf[4]) + 2 * fabs(buf[3])
                if scale < 1e-300:
                    scale = 1e-300
                if fabs(det) > 1e-14 * scale * scale:
                    d1 = (buf[4] * buf[0] - buf[3] * buf[1]) / det
                    d2 = (buf[2] * buf[1] - buf[3] * buf[0]) / det
                else:
                    d1 = buf[0] / scale
                    d2 = buf[1] / scale
                step = fmax(fabs(d1), fabs(d2))
                if step == 0.0:
                    break
                fac = 1.0
                if step > clamp:
                    fac = clamp / step
                v1[i] -= fac * d1
                v2[i] -= fac * d2
            _fl_derivs(L1, L2, rho, f3, f4, f3x, f4x, k, l0, v1[i], v2[i], buf)
            g = fmax(fabs(buf[0]), fabs(buf[1]))
            gn[i] = g
            if st[i] == 1 and g < gtol:
                st[i] = 0
    return x1.reshape(shape), x2.reshape(shape), gn_arr.reshape(shape), st_arr.reshape(shape)
