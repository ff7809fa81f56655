# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Sturm-sequence kernels for symmetric tridiagonal matrices."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmax, sqrt

cnp.import_array()


cdef inline Py_ssize_t _count_below(const double[::1] d, const double[::1] e2,
                                    double d0, double x, double pivmin) noexcept nogil:
    # Number of eigenvalues strictly below x, with d[0] replaced by d0.
    cdef Py_ssize_t m = d.shape[0], i, count = 0
    cdef double q = d0 - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, m):
        q = d[i] - x - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


cdef void _bounds(const double[::1] d, const double[::1] e, double *lo, double *hi) noexcept nogil:
    cdef Py_ssize_t m = d.shape[0], i
    cdef double r, a = d[0], b = d[0]
    for i in range(m):
        r = 0.0
        if i > 0:
            r += fabs(e[i - 1])
        if i < m - 1:
            r += fabs(e[i])
        if d[i] - r < a:
            a = d[i] - r
        if d[i] + r > b:
            b = d[i] + r
    lo[0] = a
    hi[0] = b


def count_below(double[::1] d, double[::1] e, double x):
    """Sturm count: number of eigenvalues of the tridiagonal below ``x``."""
    e2 = np.square(np.asarray(e))
    cdef double[::1] e2v = e2
    cdef double pivmin = 1e-300
    return _count_below(d, e2v, d[0], x, pivmin)


def top_eigenvalues(double[::1] d, double[::1] e, Py_ssize_t k, double tol):
    """The ``k`` largest eigenvalues by bisection, in descending order."""
    cdef Py_ssize_t m = d.shape[0], j
    cdef double lo0, hi0, lo, hi, mid, pivmin
    e2 = np.square(np.asarray(e))
    cdef double[::1] e2v = e2
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] o = out
    _bounds(d, e, &lo0, &hi0)
    pivmin = 1e-300 + 1e-18 * fmax(fabs(lo0), fabs(hi0))
    with nogil:
        for j in range(k):
            # the (j+1)-th largest eigenvalue is the (m-j)-th smallest
            lo = lo0
            hi = hi0 if j == 0 else o[j - 1]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                if _count_below(d, e2v, d[0], mid, pivmin) >= m - j:
                    hi = mid
                else:
                    lo = mid
            o[j] = 0.5 * (lo + hi)
    return out


def largest_eigenvalue_spiked(double[::1] d, double[::1] e, double[::1] spikes, double tol):
    """Largest eigenvalue after adding each spike to entry (1,1)."""
    cdef Py_ssize_t m = d.shape[0], s, n = spikes.shape[0]
    cdef double lo0, hi0, lo, hi, mid, d0, pivmin
    e2 = np.square(np.asarray(e))
    cdef double[::1] e2v = e2
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    _bounds(d, e, &lo0, &hi0)
    pivmin = 1e-300 + 1e-18 * fmax(fabs(lo0), fabs(hi0))
    with nogil:
        for s in range(n):
            d0 = d[0] + spikes[s]
            # adding a spike moves the Gershgorin interval by at most |spike|
            lo = lo0 - fabs(spikes[s])
            hi = hi0 + fabs(spikes[s])
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                if _count_below(d, e2v, d0, mid, pivmin) >= m:
                    hi = mid
                else:
                    lo = mid
            o[s] = 0.5 * (lo + hi)
    return out


cdef inline double _resolvent_11(const double[::1] d, const double[::1] e2, double x) noexcept nogil:
    # (1,1) entry of (x - T)^{-1} by a continued fraction from the bottom;
    # stable for x above the spectrum, where every pivot is positive.
    cdef Py_ssize_t i, m = d.shape[0]
    cdef double g = 1.0 / (x - d[m - 1])
    for i in range(m - 2, -1, -1):
        g = 1.0 / (x - d[i] - e2[i] * g)
    return g


cdef inline double _centered_inverse_spike(double x, double theta, double scale) noexcept nogil:
    # Real part of the semicircle Stieltjes transform, plus the edge
    # counterterm, minus the spike strength on the N^{-1/3} scale.
    cdef double delta = x - 2.0
    if delta > 0:
        return 0.5 * (x - sqrt(delta * (x + 2.0))) + sqrt(delta) - theta * scale
    return 0.5 * x - theta * scale


def centered_secular_roots(double[::1] d, double[::1] e, double[::1] thetas,
                           double scale, double tol, double weight=1.0, double shift=0.0):
    """Largest root of the centred secular equation for each spike level.

    Solves ``r(x) = m(x) + sqrt((x - 2)_+) - theta * scale`` where ``r`` is the
    (1,1) resolvent entry of the unspiked tridiagonal, scaled by ``weight``
    and offset by ``shift``, and ``m`` the real part of the semicircle
    Stieltjes transform. Returns the roots ``x``.
    """
    cdef Py_ssize_t m = d.shape[0], s, n = thetas.shape[0]
    cdef double lo0, hi0, lo, hi, mid, top, pivmin, step
    e2 = np.square(np.asarray(e))
    cdef double[::1] e2v = e2
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    _bounds(d, e, &lo0, &hi0)
    pivmin = 1e-300 + 1e-18 * fmax(fabs(lo0), fabs(hi0))
    with nogil:
        lo = lo0
        hi = hi0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if _count_below(d, e2v, d[0], mid, pivmin) >= m:
                hi = mid
            else:
                lo = mid
        top = hi
        for s in range(n):
            lo = top
            step = fmax(tol, 1e-8)
            hi = top + step
            while weight * _resolvent_11(d, e2v, hi) + shift > _centered_inverse_spike(hi, thetas[s], scale):
                lo = hi
                step *= 2.0
                hi = top + step
                if step > 1e6:
                    break
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                if weight * _resolvent_11(d, e2v, mid) + shift > _centered_inverse_spike(mid, thetas[s], scale):
                    lo = mid
                else:
                    hi = mid
            o[s] = 0.5 * (lo + hi)
    return out
