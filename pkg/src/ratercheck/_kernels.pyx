# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; mirrors ``_kernels_py`` operation for operation."""

from libc.math cimport exp, log, sin, sqrt, fabs, M_PI
from libc.stdint cimport int64_t

cdef double EPS = 2.220446049250313e-16
cdef double FPMIN = 1e-300
cdef int MAXIT = 100000
cdef double _LANCZOS_G = 7.0
cdef double[9] _LANCZOS = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]
cdef double _HALF_LOG_2PI = 0.91893853320467274178


cdef double _log_gamma(double x) nogil:
    cdef double acc, t
    cdef int i
    if x < 0.5:
        return log(M_PI / fabs(sin(M_PI * x))) - _log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * log(t) - t + log(acc)


cdef double _gamma_series(double a, double x) nogil:
    cdef double ap = a
    cdef double term = 1.0 / a
    cdef double total = term
    cdef int it
    for it in range(MAXIT):
        ap += 1.0
        term *= x / ap
        total += term
        if fabs(term) < fabs(total) * EPS:
            break
    return total * exp(-x + a * log(x) - _log_gamma(a))


cdef double _gamma_cf(double a, double x) nogil:
    cdef double b = x + 1.0 - a
    cdef double c = 1.0 / FPMIN
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double an, delta
    cdef int i
    for i in range(1, MAXIT):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < FPMIN:
            d = FPMIN
        c = b + an / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < EPS:
            break
    return exp(-x + a * log(x) - _log_gamma(a)) * h


cdef double _gammainc_p(double a, double x) nogil:
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


cdef double _gammainc_q(double a, double x) nogil:
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


cdef double _beta_cf(double a, double b, double x) nogil:
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < EPS:
            break
    return h


cdef double _betainc(double a, double b, double x, double y) nogil:
    cdef double lbt, bt
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbt = _log_gamma(a + b) - _log_gamma(a) - _log_gamma(b) + a * log(x) + b * log(y)
    bt = exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_cf(a, b, x) / a
    return 1.0 - bt * _beta_cf(b, a, y) / b


cdef double _norm_cdf(double x) nogil:
    cdef double q = 0.5 * x * x
    if x < 0.0:
        return 0.5 * _gammainc_q(0.5, q)
    return 1.0 - 0.5 * _gammainc_q(0.5, q)


def log_gamma(double x):
    """ln Gamma(x) for x > 0 (Lanczos, g=7, n=9)."""
    return _log_gamma(x)


def gammainc_p(double a, double x):
    """Regularized lower incomplete gamma P(a, x)."""
    return _gammainc_p(a, x)


def gammainc_q(double a, double x):
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    return _gammainc_q(a, x)


def betainc(double a, double b, double x, double y):
    """Regularized incomplete beta I_x(a, b); ``y`` must equal ``1 - x``."""
    return _betainc(a, b, x, y)


def norm_cdf(double x):
    """Standard normal CDF via erfc = Q(1/2, x^2/2)."""
    return _norm_cdf(x)


def kolmogorov_sf(double lam):
    """P(K > lam) for the limiting Kolmogorov distribution."""
    cdef double w, total, term, cdf, sign, p
    cdef int k, j
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        w = M_PI * M_PI / (8.0 * lam * lam)
        total = 0.0
        for k in range(1, 40):
            j = 2 * k - 1
            term = exp(-j * j * w)
            total += term
            if term < 1e-300:
                break
        cdf = sqrt(2.0 * M_PI) / lam * total
        return 1.0 - cdf
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-18:
            break
        sign = -sign
    p = 2.0 * total
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


def ks_normal_statistic(xs, double mean, double sd):
    """sup |ECDF - N(mean, sd) CDF| over a sorted sample."""
    cdef Py_ssize_t n = len(xs)
    cdef Py_ssize_t i
    cdef double d = 0.0
    cdef double f, upper, lower
    vals = [float(v) for v in xs]
    for i in range(n):
        f = _norm_cdf((<double>vals[i] - mean) / sd)
        upper = <double>(i + 1) / <double>n - f
        lower = f - <double>i / <double>n
        if upper > d:
            d = upper
        if lower > d:
            d = lower
    return d


def midranks(values):
    """1-based ranks with ties averaged, plus the sizes of tie groups (>1)."""
    cdef Py_ssize_t n = len(values)
    cdef Py_ssize_t i, j, k
    cdef double r, v
    order = sorted(range(n), key=values.__getitem__)
    vals = [float(values[o]) for o in order]
    ranks = [0.0] * n
    ties = []
    i = 0
    while i < n:
        j = i
        v = vals[i]
        while j + 1 < n and <double>vals[j + 1] == v:
            j += 1
        r = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = r
        if j > i:
            ties.append(j - i + 1)
        i = j + 1
    return ranks, ties


def u_counts(int m, int n):
    """Arrangement counts of the Mann-Whitney U for sample sizes m, n (int64)."""
    cdef Py_ssize_t top = <Py_ssize_t>m * n
    cdef Py_ssize_t size = top + m + n + 1
    cdef Py_ssize_t i, k, shift, new_deg
    cdef Py_ssize_t deg = 0
    cdef int64_t[:] c
    import array
    arr = array.array("q", bytes(8 * size))
    c = arr
    c[0] = 1
    for i in range(1, m + 1):
        shift = n + i
        new_deg = deg + shift
        k = new_deg
        while k >= shift:
            c[k] -= c[k - shift]
            k -= 1
        for k in range(i, new_deg + 1):
            c[k] += c[k - i]
        deg = i * n
    return [c[k] for k in range(top + 1)]


def signed_rank_counts(int n):
    """Sign-pattern counts of the Wilcoxon T+ on ranks 1..n (int64)."""
    cdef Py_ssize_t top = <Py_ssize_t>n * (n + 1) // 2
    cdef Py_ssize_t j, k
    cdef Py_ssize_t deg = 0
    cdef int64_t[:] c
    import array
    arr = array.array("q", bytes(8 * (top + 1)))
    c = arr
    c[0] = 1
    for j in range(1, n + 1):
        deg += j
        k = deg
        while k >= j:
            c[k] += c[k - j]
            k -= 1
    return [c[k] for k in range(top + 1)]
