# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same algorithms as ``_pykernel.py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, fabs, INFINITY, M_PI

cnp.import_array()

ctypedef cnp.int64_t i64

cdef double _LN_2PI = log(2.0 * M_PI)
cdef double _EPS = 1e-18

cdef double[16] _STIRLERR
_STIRLERR[:] = [
    0.0,
    0.08106146679532725821967026,
    0.04134069595540929409382208,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.01041126526197209649747857,
    0.009255462182712732917728637,
    0.008330563433362871256469319,
    0.007573675487951840794972024,
    0.006942840107209529865664153,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.00555473355196280137103869,
]

cdef double _S0 = 1.0 / 12
cdef double _S1 = 1.0 / 360
cdef double _S2 = 1.0 / 1260
cdef double _S3 = 1.0 / 1680
cdef double _S4 = 1.0 / 1188


cdef inline double _stirlerr(i64 n) nogil:
    cdef double nn
    if n <= 15:
        return _STIRLERR[n]
    nn = <double>n * <double>n
    if n > 500:
        return (_S0 - _S1 / nn) / n
    if n > 80:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


cdef double _bd0(double x, double np_) nogil:
    cdef double v, s, s1, ej
    cdef int j
    if fabs(x - np_) < 0.1 * (x + np_):
        v = (x - np_) / (x + np_)
        s = (x - np_) * v
        ej = 2.0 * x * v
        v = v * v
        j = 1
        while True:
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * log(x / np_) + np_ - x


cdef double _log_dbinom(i64 x, i64 n, double p, double q) nogil:
    cdef double lc, lf
    if p == 0.0:
        return 0.0 if x == 0 else -INFINITY
    if q == 0.0:
        return 0.0 if x == n else -INFINITY
    if x == 0:
        if n == 0:
            return 0.0
        return -_bd0(n, n * q) - n * p if p < 0.1 else n * log(q)
    if x == n:
        return -_bd0(n, n * p) - n * q if q < 0.1 else n * log(p)
    if x < 0 or x > n:
        return -INFINITY
    lc = (_stirlerr(n) - _stirlerr(x) - _stirlerr(n - x)
          - _bd0(x, n * p) - _bd0(n - x, n * q))
    lf = _LN_2PI + log(<double>x) + log1p(-(<double>x) / n)
    return lc - 0.5 * lf


cdef inline void _bounds(i64 cx, i64 cy, i64 m, i64* lo, i64* hi, i64* mode) nogil:
    lo[0] = cx + cy - m
    if lo[0] < 0:
        lo[0] = 0
    hi[0] = cx if cx < cy else cy
    mode[0] = (cx + 1) * (cy + 1) // (m + 2)
    if mode[0] < lo[0]:
        mode[0] = lo[0]
    if mode[0] > hi[0]:
        mode[0] = hi[0]


cdef double _pmf(i64 r, i64 cx, i64 cy, i64 m) nogil:
    cdef i64 lo, hi, mode
    cdef double p, q
    _bounds(cx, cy, m, &lo, &hi, &mode)
    if r < lo or r > hi:
        return 0.0
    if lo == hi:
        return 1.0
    p = <double>cx / m
    q = <double>(m - cx) / m
    return exp(_log_dbinom(r, cy, p, q) + _log_dbinom(cx - r, m - cy, p, q)
               - _log_dbinom(cx, m, p, q))


cdef double _lower_sum(i64 q, i64 lo, i64 cx, i64 cy, i64 m) nogil:
    cdef double t = _pmf(q, cx, cy, m)
    cdef double s = t
    cdef i64 i = q
    cdef i64 base = m - cx - cy
    while i > lo and t > 0.0:
        t *= (<double>i) * (base + i) / ((cx - i + 1.0) * (cy - i + 1.0))
        s += t
        i -= 1
        if t < s * _EPS:
            break
    return s


cdef double _upper_sum(i64 k, i64 hi, i64 cx, i64 cy, i64 m) nogil:
    cdef double t = _pmf(k, cx, cy, m)
    cdef double s = t
    cdef i64 i = k
    cdef i64 base = m - cx - cy
    while i < hi and t > 0.0:
        t *= (<double>(cx - i)) * (cy - i) / ((i + 1.0) * (base + i + 1.0))
        s += t
        i += 1
        if t < s * _EPS:
            break
    return s


cdef inline bint _center(i64 q, i64 cx, i64 cy, i64 m) nogil:
    # with 2 cY = m, C and cX - C share a distribution, so P(C <= (cX-1)/2) = 1/2
    return (2 * cy == m and 2 * q + 1 == cx) or (2 * cx == m and 2 * q + 1 == cy)


cdef double _cdf(i64 q, i64 cx, i64 cy, i64 m) nogil:
    cdef i64 lo, hi, mode
    _bounds(cx, cy, m, &lo, &hi, &mode)
    if q < lo:
        return 0.0
    if q >= hi:
        return 1.0
    if _center(q, cx, cy, m):
        return 0.5
    if q < mode:
        return _lower_sum(q, lo, cx, cy, m)
    return 1.0 - _upper_sum(q + 1, hi, cx, cy, m)


cdef double _sf(i64 q, i64 cx, i64 cy, i64 m) nogil:
    cdef i64 lo, hi, mode
    _bounds(cx, cy, m, &lo, &hi, &mode)
    if q < lo:
        return 1.0
    if q >= hi:
        return 0.0
    if _center(q, cx, cy, m):
        return 0.5
    if q < mode:
        return 1.0 - _lower_sum(q, lo, cx, cy, m)
    return _upper_sum(q + 1, hi, cx, cy, m)


cdef i64 _quantile(double delta, i64 cx, i64 cy, i64 m) nogil:
    cdef i64 lo, hi, mode, below, above, mid
    _bounds(cx, cy, m, &lo, &hi, &mode)
    below = lo - 1
    above = hi
    while above - below > 1:
        mid = (above + below) // 2
        if _cdf(mid, cx, cy, m) >= delta:
            above = mid
        else:
            below = mid
    return above


def hyper_pmf(i64 r, i64 cx, i64 cy, i64 m):
    return _pmf(r, cx, cy, m)


def hyper_cdf(i64 q, i64 cx, i64 cy, i64 m):
    """P(C <= q)."""
    return _cdf(q, cx, cy, m)


def hyper_sf(i64 q, i64 cx, i64 cy, i64 m):
    """P(C > q)."""
    return _sf(q, cx, cy, m)


def hyper_quantile(double delta, i64 cx, i64 cy, i64 m):
    """Smallest q with P(C <= q) >= delta."""
    return _quantile(delta, cx, cy, m)


def batch_pmf(const i64[:] r, const i64[:] cx, const i64[:] cy, const i64[:] m):
    cdef Py_ssize_t k, n = r.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    with nogil:
        for k in range(n):
            o[k] = _pmf(r[k], cx[k], cy[k], m[k])
    return out


def batch_cdf(const i64[:] q, const i64[:] cx, const i64[:] cy, const i64[:] m):
    cdef Py_ssize_t k, n = q.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    with nogil:
        for k in range(n):
            o[k] = _cdf(q[k], cx[k], cy[k], m[k])
    return out


def batch_sf(const i64[:] q, const i64[:] cx, const i64[:] cy, const i64[:] m):
    cdef Py_ssize_t k, n = q.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    with nogil:
        for k in range(n):
            o[k] = _sf(q[k], cx[k], cy[k], m[k])
    return out


def batch_quantile(double delta, const i64[:] cx, const i64[:] cy, const i64[:] m):
    cdef Py_ssize_t k, n = cx.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef i64[:] o = out
    with nogil:
        for k in range(n):
            o[k] = _quantile(delta, cx[k], cy[k], m[k])
    return out


def intersect(const i64[:] a, const i64[:] b):
    """Intersection of two strictly increasing id arrays."""
    cdef Py_ssize_t i = 0, j = 0, k = 0
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    out = np.empty(na if na < nb else nb, dtype=np.int64)
    cdef i64[:] o = out
    with nogil:
        while i < na and j < nb:
            if a[i] < b[j]:
                i += 1
            elif a[i] > b[j]:
                j += 1
            else:
                o[k] = a[i]
                k += 1
                i += 1
                j += 1
    return out[:k]


def intersect_count(const i64[:] a, const i64[:] b):
    cdef Py_ssize_t i = 0, j = 0, k = 0
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    with nogil:
        while i < na and j < nb:
            if a[i] < b[j]:
                i += 1
            elif a[i] > b[j]:
                j += 1
            else:
                k += 1
                i += 1
                j += 1
    return k
