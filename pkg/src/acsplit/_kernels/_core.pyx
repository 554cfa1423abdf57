# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled single-pass versions of the kernels in ``_ref``.

Expression order matches the reference module so both backends agree
bit-for-bit wherever the underlying libm calls do.
"""

from libc.math cimport exp, fabs, isnan, sqrt

RADICAND_FLOOR = 1e-14

cdef double _FLOOR = 1e-14
cdef double _F64_MAX = 1.7976931348623157e308


def free_energy_apply(const double[::1] phi, double[::1] out, double decay):
    cdef Py_ssize_t i, n = phi.shape[0]
    cdef double p, phi2, rad
    cdef double d = decay
    if d > _F64_MAX:
        d = _F64_MAX
    if d == 0.0:
        # effectively infinite forward step: saturate at the fixed points
        # (phi/sqrt(phi^2) would lose precision once phi^2 is subnormal)
        for i in range(n):
            p = phi[i]
            out[i] = 1.0 if p > 0.0 else (-1.0 if p < 0.0 else 0.0)
        return -1
    if d > 1.0:
        for i in range(n):
            p = phi[i]
            phi2 = p * p
            rad = phi2 + (1.0 - phi2) * d
            if rad <= _FLOOR:
                return i
            out[i] = p / sqrt(rad)
        return -1
    for i in range(n):
        p = phi[i]
        phi2 = p * p
        rad = phi2 + (1.0 - phi2) * d
        if rad > 0.0:
            out[i] = p / sqrt(rad)
        elif p > 0.0:
            out[i] = 1.0
        elif p < 0.0:
            out[i] = -1.0
        else:
            out[i] = 0.0
    return -1


def heat_multiplier_apply(const double[::1] coeffs, const double[::1] eig,
                          double tau, double k_tol, double[::1] out):
    # out may alias coeffs: each element is read before it is written
    cdef Py_ssize_t i, n = coeffs.shape[0]
    cdef double cap = k_tol if k_tol < _F64_MAX else _F64_MAX
    cdef double m
    for i in range(n):
        m = exp(eig[i] * tau)
        if m > cap:
            m = cap
        out[i] = coeffs[i] * m


def guard_scan(const double[::1] values):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double m = 0.0, v
    for i in range(n):
        v = fabs(values[i])
        if isnan(v):
            return v
        if v > m:
            m = v
    return m
