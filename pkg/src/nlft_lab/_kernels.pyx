# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel; see _kernels_py for the reference version."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef extern from "<complex.h>" nogil:
    double complex csqrt(double complex)
    double complex ccosh(double complex)
    double complex csinh(double complex)
    double complex cexp(double complex)
    double creal(double complex)
    double cabs(double complex)

cdef double[5] COSH_C
cdef double[5] SINHC_C
cdef double[13] DSINHC_C

cdef void _init_coefficients():
    cdef int k
    # factorials up to 27!
    cdef double[28] f
    f[0] = 1.0
    for k in range(1, 28):
        f[k] = f[k - 1] * k
    for k in range(5):
        COSH_C[k] = 1.0 / f[2 * k]
        SINHC_C[k] = 1.0 / f[2 * k + 1]
    for k in range(1, 14):
        DSINHC_C[k - 1] = k / f[2 * k + 1]

_init_coefficients()

cdef inline double complex _horner(double* c, int n, double complex x) nogil:
    cdef double complex out = c[n - 1]
    cdef int i
    for i in range(n - 2, -1, -1):
        out = out * x + c[i]
    return out


cdef inline void _coeffs(double q, double h, double complex z, double thr2, bint deriv,
                         double complex* c, double complex* s,
                         double complex* dc, double complex* ds) nogil:
    cdef double complex u = q * q - z * z
    cdef double complex X = h * h * u
    cdef double complex w
    cdef double ax = cabs(X)
    if ax < thr2:
        c[0] = _horner(COSH_C, 5, X)
        s[0] = h * _horner(SINHC_C, 5, X)
    else:
        w = csqrt(u)
        c[0] = ccosh(h * w)
        s[0] = csinh(h * w) / w
    if deriv:
        dc[0] = -z * h * s[0]
        if ax < 0.25:
            ds[0] = -2.0 * z * h * h * h * _horner(DSINHC_C, 13, X)
        else:
            ds[0] = -z * (h * c[0] - s[0]) / u


cdef inline void _diagonal(double q, double h, double complex z, bint deriv,
                           double complex c, double complex s, double complex dc,
                           double complex ds, double complex* pp, double complex* pm,
                           double complex* dpp, double complex* dpm) nogil:
    # c - q s cancels for Re(h w) > 1; use the eigen-expansion there instead
    cdef double complex u = q * q - z * z
    cdef double complex w = csqrt(u)
    cdef double complex ap, am, ep, em
    if creal(h * w) <= 1.0:
        pp[0] = c + s * q
        pm[0] = c - s * q
        if deriv:
            dpp[0] = dc + ds * q
            dpm[0] = dc - ds * q
        return
    if q >= 0:
        ap = 1.0 + q / w
        am = -z * z / (w * (w + q))
    else:
        ap = -z * z / (w * (w - q))
        am = 1.0 - q / w
    ep = cexp(h * w)
    em = cexp(-h * w)
    pp[0] = 0.5 * (ap * ep + am * em)
    pm[0] = 0.5 * (am * ep + ap * em)
    if deriv:
        dpp[0] = -z / u * (0.5 * h * w * (ap * ep - am * em) - q * s)
        dpm[0] = -z / u * (0.5 * h * w * (am * ep - ap * em) + q * s)


def propagate(q, h, z, M0=None, D0=None, bint with_derivative=False, double threshold=1e-4,
              bint record=False):
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    zarr = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    cdef double complex[::1] zv = zarr
    cdef Py_ssize_t m = zarr.shape[0]
    cdef Py_ssize_t n = qv.shape[0]
    if M0 is None:
        Marr = np.zeros((m, 2, 2), dtype=np.complex128)
        Marr[:, 0, 0] = 1.0
        Marr[:, 1, 1] = 1.0
    else:
        Marr = np.array(M0, dtype=np.complex128).reshape(m, 2, 2)
    cdef double complex[:, :, ::1] M = Marr
    Darr = None
    cdef double complex[:, :, ::1] D
    if with_derivative:
        Darr = np.zeros((m, 2, 2), dtype=np.complex128) if D0 is None else np.array(D0, dtype=np.complex128).reshape(m, 2, 2)
        D = Darr
    Harr = None
    cdef double complex[:, :, :, ::1] H
    if record:
        Harr = np.empty((n + 1, m, 2, 2), dtype=np.complex128)
        Harr[0] = Marr
        H = Harr
    cdef Py_ssize_t j, k
    cdef double complex zz, c, s, dc, ds
    cdef double complex p00, p01, p10, p11, d00, d01, d10, d11
    cdef double complex m00, m01, m10, m11, e00, e01, e10, e11
    cdef double thr2 = threshold * threshold
    with nogil:
        for j in range(m):
            zz = zv[j]
            m00 = M[j, 0, 0]; m01 = M[j, 0, 1]; m10 = M[j, 1, 0]; m11 = M[j, 1, 1]
            if with_derivative:
                e00 = D[j, 0, 0]; e01 = D[j, 0, 1]; e10 = D[j, 1, 0]; e11 = D[j, 1, 1]
            for k in range(n):
                _coeffs(qv[k], hv[k], zz, thr2, with_derivative, &c, &s, &dc, &ds)
                _diagonal(qv[k], hv[k], zz, with_derivative, c, s, dc, ds,
                          &p00, &p11, &d00, &d11)
                p01 = -s * zz
                p10 = s * zz
                if with_derivative:
                    d01 = -ds * zz - s
                    d10 = ds * zz + s
                    e00, e01, e10, e11 = (
                        d00 * m00 + d01 * m10 + p00 * e00 + p01 * e10,
                        d00 * m01 + d01 * m11 + p00 * e01 + p01 * e11,
                        d10 * m00 + d11 * m10 + p10 * e00 + p11 * e10,
                        d10 * m01 + d11 * m11 + p10 * e01 + p11 * e11,
                    )
                m00, m01, m10, m11 = (
                    p00 * m00 + p01 * m10,
                    p00 * m01 + p01 * m11,
                    p10 * m00 + p11 * m10,
                    p10 * m01 + p11 * m11,
                )
                if record:
                    H[k + 1, j, 0, 0] = m00; H[k + 1, j, 0, 1] = m01
                    H[k + 1, j, 1, 0] = m10; H[k + 1, j, 1, 1] = m11
            M[j, 0, 0] = m00; M[j, 0, 1] = m01; M[j, 1, 0] = m10; M[j, 1, 1] = m11
            if with_derivative:
                D[j, 0, 0] = e00; D[j, 0, 1] = e01; D[j, 1, 0] = e10; D[j, 1, 1] = e11
    return Marr, Darr, Harr
