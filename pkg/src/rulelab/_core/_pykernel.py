"""Pure-Python kernels. Mirrors ``_ckernel.pyx`` line for line.

Hyper-geometric probabilities use Loader's saddle-point form of the
binomial density (stirling error + deviance), which keeps full relative
precision for large databases where plain log-gamma differences do not.
Tail sums always run over the tail on the far side of the mode.
"""

from math import exp, inf, log, log1p, pi

import numpy as np

_LN_2PI = log(2.0 * pi)
_EPS = 1e-18

# log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 0..15
_STIRLERR = (
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
)

_S0 = 1.0 / 12
_S1 = 1.0 / 360
_S2 = 1.0 / 1260
_S3 = 1.0 / 1680
_S4 = 1.0 / 1188


def _stirlerr(n):
    if n <= 15:
        return _STIRLERR[n]
    nn = float(n) * n
    if n > 500:
        return (_S0 - _S1 / nn) / n
    if n > 80:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


def _bd0(x, np_):
    # x log(x/np) + np - x without cancellation
    if abs(x - np_) < 0.1 * (x + np_):
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


def _log_dbinom(x, n, p, q):
    if p == 0.0:
        return 0.0 if x == 0 else -inf
    if q == 0.0:
        return 0.0 if x == n else -inf
    if x == 0:
        if n == 0:
            return 0.0
        return -_bd0(n, n * q) - n * p if p < 0.1 else n * log(q)
    if x == n:
        return -_bd0(n, n * p) - n * q if q < 0.1 else n * log(p)
    if x < 0 or x > n:
        return -inf
    lc = (_stirlerr(n) - _stirlerr(x) - _stirlerr(n - x)
          - _bd0(x, n * p) - _bd0(n - x, n * q))
    lf = _LN_2PI + log(x) + log1p(-x / n)
    return lc - 0.5 * lf


def _bounds(cx, cy, m):
    lo = cx + cy - m
    if lo < 0:
        lo = 0
    hi = cx if cx < cy else cy
    mode = (cx + 1) * (cy + 1) // (m + 2)
    if mode < lo:
        mode = lo
    if mode > hi:
        mode = hi
    return lo, hi, mode


def hyper_pmf(r, cx, cy, m):
    lo, hi, _ = _bounds(cx, cy, m)
    if r < lo or r > hi:
        return 0.0
    if lo == hi:
        return 1.0
    p = cx / m
    q = (m - cx) / m
    lp = (_log_dbinom(r, cy, p, q) + _log_dbinom(cx - r, m - cy, p, q)
          - _log_dbinom(cx, m, p, q))
    return exp(lp)


def _lower_sum(q, lo, cx, cy, m):
    # sum_{i=lo}^{q} pmf(i), q below the mode
    t = hyper_pmf(q, cx, cy, m)
    s = t
    i = q
    base = m - cx - cy
    while i > lo and t > 0.0:
        t *= i * (base + i) / ((cx - i + 1.0) * (cy - i + 1.0))
        s += t
        i -= 1
        if t < s * _EPS:
            break
    return s


def _upper_sum(k, hi, cx, cy, m):
    # sum_{i=k}^{hi} pmf(i), k above the mode
    t = hyper_pmf(k, cx, cy, m)
    s = t
    i = k
    base = m - cx - cy
    while i < hi and t > 0.0:
        t *= (cx - i) * (cy - i) / ((i + 1.0) * (base + i + 1.0))
        s += t
        i += 1
        if t < s * _EPS:
            break
    return s


def _center(q, cx, cy, m):
    # with 2 cY = m, C and cX - C share a distribution, so P(C <= (cX-1)/2) = 1/2
    return (2 * cy == m and 2 * q + 1 == cx) or (2 * cx == m and 2 * q + 1 == cy)


def hyper_cdf(q, cx, cy, m):
    """P(C <= q)."""
    lo, hi, mode = _bounds(cx, cy, m)
    if q < lo:
        return 0.0
    if q >= hi:
        return 1.0
    if _center(q, cx, cy, m):
        return 0.5
    if q < mode:
        return _lower_sum(q, lo, cx, cy, m)
    return 1.0 - _upper_sum(q + 1, hi, cx, cy, m)


def hyper_sf(q, cx, cy, m):
    """P(C > q)."""
    lo, hi, mode = _bounds(cx, cy, m)
    if q < lo:
        return 1.0
    if q >= hi:
        return 0.0
    if _center(q, cx, cy, m):
        return 0.5
    if q < mode:
        return 1.0 - _lower_sum(q, lo, cx, cy, m)
    return _upper_sum(q + 1, hi, cx, cy, m)


def hyper_quantile(delta, cx, cy, m):
    """Smallest q with P(C <= q) >= delta."""
    lo, hi, _ = _bounds(cx, cy, m)
    below = lo - 1
    above = hi
    while above - below > 1:
        mid = (above + below) // 2
        if hyper_cdf(mid, cx, cy, m) >= delta:
            above = mid
        else:
            below = mid
    return above


def batch_cdf(q, cx, cy, m):
    out = np.empty(len(q), dtype=np.float64)
    for k in range(len(q)):
        out[k] = hyper_cdf(int(q[k]), int(cx[k]), int(cy[k]), int(m[k]))
    return out


def batch_sf(q, cx, cy, m):
    out = np.empty(len(q), dtype=np.float64)
    for k in range(len(q)):
        out[k] = hyper_sf(int(q[k]), int(cx[k]), int(cy[k]), int(m[k]))
    return out


def batch_pmf(r, cx, cy, m):
    out = np.empty(len(r), dtype=np.float64)
    for k in range(len(r)):
        out[k] = hyper_pmf(int(r[k]), int(cx[k]), int(cy[k]), int(m[k]))
    return out


def batch_quantile(delta, cx, cy, m):
    out = np.empty(len(cx), dtype=np.int64)
    for k in range(len(cx)):
        out[k] = hyper_quantile(delta, int(cx[k]), int(cy[k]), int(m[k]))
    return out


def intersect(a, b):
    return np.intersect1d(a, b, assume_unique=True)


def intersect_count(a, b):
    return int(np.intersect1d(a, b, assume_unique=True).size)
