"""Pure numpy fallback for the Sturm-sequence kernels.

Bisection runs for all targets at once, so each Sturm pass is a Python loop
over the matrix dimension acting on a vector of shifts.
"""

import numpy as np

_TINY = 1e-300


def _count_below_many(d, e2, d0, x, pivmin):
    q = d0 - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def _bounds(d, e):
    r = np.zeros_like(d)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    return float(np.min(d - r)), float(np.max(d + r))


def count_below(d, e, x):
    """Sturm count: number of eigenvalues of the tridiagonal below ``x``."""
    d = np.asarray(d, dtype=np.float64)
    e2 = np.square(np.asarray(e, dtype=np.float64))
    return int(_count_below_many(d, e2, d[0], np.array([x], dtype=np.float64), _TINY)[0])


def _bisect(d, e2, d0, lo, hi, target, tol, pivmin):
    while True:
        active = hi - lo > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        stuck = (mid == lo) | (mid == hi)
        active &= ~stuck
        if not active.any():
            break
        below = _count_below_many(d, e2, d0, mid, pivmin) >= target
        hi = np.where(active & below, mid, hi)
        lo = np.where(active & ~below, mid, lo)
    return 0.5 * (lo + hi)


def top_eigenvalues(d, e, k, tol):
    """The ``k`` largest eigenvalues by bisection, in descending order."""
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    m = d.shape[0]
    lo0, hi0 = _bounds(d, e)
    pivmin = _TINY + 1e-18 * max(abs(lo0), abs(hi0))
    target = m - np.arange(k)
    lo = np.full(k, lo0)
    hi = np.full(k, hi0)
    return _bisect(d, np.square(e), d[0], lo, hi, target, tol, pivmin)


def largest_eigenvalue_spiked(d, e, spikes, tol):
    """Largest eigenvalue after adding each spike to entry (1,1)."""
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    spikes = np.asarray(spikes, dtype=np.float64)
    lo0, hi0 = _bounds(d, e)
    pivmin = _TINY + 1e-18 * max(abs(lo0), abs(hi0))
    lo = lo0 - np.abs(spikes)
    hi = hi0 + np.abs(spikes)
    return _bisect(d, np.square(e), d[0] + spikes, lo, hi, d.shape[0], tol, pivmin)


def _resolvent_11(d, e2, x):
    g = 1.0 / (x - d[-1])
    for i in range(d.shape[0] - 2, -1, -1):
        g = 1.0 / (x - d[i] - e2[i] * g)
    return g


def _centered_inverse_spike(x, theta, scale):
    delta = x - 2.0
    pos = np.maximum(delta, 0.0)
    outside = 0.5 * (x - np.sqrt(pos * (x + 2.0))) + np.sqrt(pos)
    return np.where(delta > 0, outside, 0.5 * x) - theta * scale


def centered_secular_roots(d, e, thetas, scale, tol, weight=1.0, shift=0.0):
    """Largest root of the centred secular equation for each spike level.

    Solves ``weight * r(x) + shift = m(x) + sqrt((x - 2)_+) - theta * scale``
    where ``r`` is the (1,1) resolvent entry of the unspiked tridiagonal and
    ``m`` the real part of the semicircle Stieltjes transform.
    """
    d = np.ascontiguousarray(d, dtype=np.float64)
    e2 = np.square(np.ascontiguousarray(e, dtype=np.float64))
    thetas = np.asarray(thetas, dtype=np.float64)
    top = top_eigenvalues(d, e, 1, tol)[0]

    def above(x):
        return weight * _resolvent_11(d, e2, x) + shift > _centered_inverse_spike(x, thetas, scale)

    lo = np.full(thetas.shape, top)
    step = np.full(thetas.shape, max(tol, 1e-8))
    hi = top + step
    grow = above(hi)
    while grow.any():
        lo = np.where(grow, hi, lo)
        step = np.where(grow, 2.0 * step, step)
        hi = top + step
        grow = above(hi) & (step <= 1e6)
    while True:
        mid = 0.5 * (lo + hi)
        active = (hi - lo > tol) & (mid != lo) & (mid != hi)
        if not active.any():
            break
        up = above(mid)
        lo = np.where(active & up, mid, lo)
        hi = np.where(active & ~up, mid, hi)
    return 0.5 * (lo + hi)
