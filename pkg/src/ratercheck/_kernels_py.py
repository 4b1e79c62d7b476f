"""Pure-Python numerical kernels.

Reference implementation of every routine in ``_kernels.pyx``.  The two
modules must stay operation-for-operation identical so that results agree
bit-for-bit between backends (the compiled module is built with
``-ffp-contract=off`` for the same reason).
"""

from math import exp, log, pi, sin, sqrt

EPS = 2.220446049250313e-16
FPMIN = 1e-300
MAXIT = 100000

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.91893853320467274178


def log_gamma(x):
    """ln Gamma(x) for x > 0 (Lanczos, g=7, n=9)."""
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return log(pi / abs(sin(pi * x))) - log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * log(t) - t + log(acc)


def _gamma_series(a, x):
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(MAXIT):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            break
    return total * exp(-x + a * log(x) - log_gamma(a))


def _gamma_cf(a, x):
    b = x + 1.0 - a
    c = 1.0 / FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, MAXIT):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < FPMIN:
            d = FPMIN
        c = b + an / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            break
    return exp(-x + a * log(x) - log_gamma(a)) * h


def gammainc_p(a, x):
    """Regularized lower incomplete gamma P(a, x)."""
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def gammainc_q(a, x):
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _beta_cf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            break
    return h


def betainc(a, b, x, y):
    """Regularized incomplete beta I_x(a, b); ``y`` must equal ``1 - x``.

    Passing the complement separately keeps full precision when x is
    close to 1.
    """
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbt = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * log(x) + b * log(y)
    bt = exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_cf(a, b, x) / a
    return 1.0 - bt * _beta_cf(b, a, y) / b


def norm_cdf(x):
    """Standard normal CDF via erfc = Q(1/2, x^2/2)."""
    q = 0.5 * x * x
    if x < 0.0:
        return 0.5 * gammainc_q(0.5, q)
    return 1.0 - 0.5 * gammainc_q(0.5, q)


def kolmogorov_sf(lam):
    """P(K > lam) for the limiting Kolmogorov distribution."""
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        w = pi * pi / (8.0 * lam * lam)
        total = 0.0
        for k in range(1, 40):
            j = 2 * k - 1
            term = exp(-j * j * w)
            total += term
            if term < 1e-300:
                break
        cdf = sqrt(2.0 * pi) / lam * total
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


def ks_normal_statistic(xs, mean, sd):
    """sup |ECDF - N(mean, sd) CDF| over a sorted sample."""
    n = len(xs)
    d = 0.0
    for i in range(n):
        f = norm_cdf((xs[i] - mean) / sd)
        upper = (i + 1) / n - f
        lower = f - i / n
        if upper > d:
            d = upper
        if lower > d:
            d = lower
    return d


def midranks(values):
    """1-based ranks with ties averaged, plus the sizes of tie groups (>1)."""
    n = len(values)
    order = sorted(range(n), key=values.__getitem__)
    ranks = [0.0] * n
    ties = []
    i = 0
    while i < n:
        j = i
        v = values[order[i]]
        while j + 1 < n and values[order[j + 1]] == v:
            j += 1
        r = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = r
        if j > i:
            ties.append(j - i + 1)
        i = j + 1
    return ranks, ties


def u_counts(m, n):
    """Arrangement counts of the Mann-Whitney U for sample sizes m, n.

    Coefficients of the Gaussian binomial prod_{i=1..m} (1 - q^(n+i)) / (1 - q^i).
    """
    top = m * n
    size = top + m + n + 1
    c = [0] * size
    c[0] = 1
    deg = 0
    for i in range(1, m + 1):
        shift = n + i
        new_deg = deg + shift
        for k in range(new_deg, shift - 1, -1):
            c[k] -= c[k - shift]
        for k in range(i, new_deg + 1):
            c[k] += c[k - i]
        deg = i * n
    return c[: top + 1]


def signed_rank_counts(n):
    """Sign-pattern counts of the Wilcoxon T+ on ranks 1..n."""
    top = n * (n + 1) // 2
    c = [0] * (top + 1)
    c[0] = 1
    deg = 0
    for j in range(1, n + 1):
        deg += j
        for k in range(deg, j - 1, -1):
            c[k] += c[k - j]
    return c
