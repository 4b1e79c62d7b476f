"""Reference distributions for the test battery.

Continuous families (standard normal, Student t, Snedecor F, chi-square)
are evaluated through the regularized incomplete beta and gamma kernels;
the exact null distributions of the Mann-Whitney U and Wilcoxon signed-rank
T statistics are built by dynamic programming instead of printed tables.

All critical values follow the two-sided convention: a statistic is
significant at level ``alpha`` when twice its tail probability is at most
``alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist
from typing import Callable, Optional

from scipy.optimize import brentq

from . import kernels
from .errors import CapExceeded, DomainError

U_CAP = 400
T_CAP = 60

_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class TailDecision:
    """Outcome of comparing a statistic with its reference distribution.

    ``statistic`` is ``None`` when the statistic is undefined (degenerate
    samples); ``critical_value`` is ``None`` when no critical value exists at
    ``alpha`` (e.g. exact tables too small to ever reject).
    """

    statistic: Optional[float]
    critical_value: Optional[float]
    p_value: float
    reject: bool
    alpha: float

    @classmethod
    def from_p(cls, statistic, critical_value, p_value, alpha):
        p = min(1.0, max(0.0, float(p_value)))
        return cls(statistic, critical_value, p, p < alpha, alpha)

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["statistic"], d["critical_value"], d["p_value"], d["reject"], d["alpha"])


# --- argument checks -----------------------------------------------------


def _check_x(x):
    x = float(x)
    if math.isnan(x):
        raise DomainError("x is NaN")
    return x


def _check_nonneg(x):
    x = _check_x(x)
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x}")
    return x


def _check_df(df, name="df"):
    df = float(df)
    if not df > 0.0 or math.isinf(df):
        raise DomainError(f"{name} must be a positive finite number, got {df}")
    return df


def _check_p(p):
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie strictly inside (0, 1), got {p}")
    return p


# --- standard normal -----------------------------------------------------


def std_normal_cdf(x: float) -> float:
    x = _check_x(x)
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    return kernels.norm_cdf(x)


def std_normal_sf(x: float) -> float:
    x = _check_x(x)
    if math.isinf(x):
        return 0.0 if x > 0 else 1.0
    return kernels.norm_cdf(-x)


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF (Wichura's AS241 via ``statistics``)."""
    return _STD_NORMAL.inv_cdf(_check_p(p))


def two_sided_normal_p(z: float) -> float:
    return min(1.0, 2.0 * std_normal_sf(abs(z)))


# --- Student t -----------------------------------------------------------


def student_t_cdf(x: float, df: float) -> float:
    x = _check_x(x)
    df = _check_df(df)
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    if x == 0.0:
        return 0.5
    x2 = x * x
    tail = 0.5 * kernels.betainc(0.5 * df, 0.5, df / (df + x2), x2 / (df + x2))
    return 1.0 - tail if x > 0 else tail


def student_t_sf(x: float, df: float) -> float:
    return student_t_cdf(-_check_x(x), df)


def two_sided_t_p(t: float, df: float) -> float:
    return min(1.0, 2.0 * student_t_cdf(-abs(t), df))


def student_t_quantile(p: float, df: float) -> float:
    p = _check_p(p)
    df = _check_df(df)
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # 1 - p is exact for p in [0.5, 1]
        return -student_t_quantile(1.0 - p, df)
    lo = -1.0
    while student_t_cdf(lo, df) > p:
        lo *= 2.0
    return _root(lambda x: student_t_cdf(x, df) - p, lo, 0.0)


# --- Snedecor F ----------------------------------------------------------


def f_cdf(x: float, d1: float, d2: float) -> float:
    x = _check_nonneg(x)
    d1 = _check_df(d1, "d1")
    d2 = _check_df(d2, "d2")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    den = d1 * x + d2
    return kernels.betainc(0.5 * d1, 0.5 * d2, d1 * x / den, d2 / den)


def f_sf(x: float, d1: float, d2: float) -> float:
    x = _check_nonneg(x)
    d1 = _check_df(d1, "d1")
    d2 = _check_df(d2, "d2")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    den = d1 * x + d2
    return kernels.betainc(0.5 * d2, 0.5 * d1, d2 / den, d1 * x / den)


def f_quantile(p: float, d1: float, d2: float) -> float:
    p = _check_p(p)
    d1 = _check_df(d1, "d1")
    d2 = _check_df(d2, "d2")
    return _positive_quantile(p, lambda x: f_cdf(x, d1, d2), lambda x: f_sf(x, d1, d2), 1.0)


# --- chi-square ----------------------------------------------------------


def chi_square_cdf(x: float, df: float) -> float:
    x = _check_nonneg(x)
    df = _check_df(df)
    if math.isinf(x):
        return 1.0
    return kernels.gammainc_p(0.5 * df, 0.5 * x)


def chi_square_sf(x: float, df: float) -> float:
    x = _check_nonneg(x)
    df = _check_df(df)
    if math.isinf(x):
        return 0.0
    return kernels.gammainc_q(0.5 * df, 0.5 * x)


def chi_square_quantile(p: float, df: float) -> float:
    p = _check_p(p)
    df = _check_df(df)
    return _positive_quantile(
        p, lambda x: chi_square_cdf(x, df), lambda x: chi_square_sf(x, df), max(1.0, df)
    )


# --- root finding --------------------------------------------------------


def _root(f: Callable[[float], float], lo: float, hi: float) -> float:
    return brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=1000)


def _positive_quantile(p, cdf, sf, start):
    """Quantile of a distribution on [0, inf); solves on the smaller tail."""
    hi = start
    if p <= 0.5:
        while cdf(hi) < p:
            hi *= 2.0
        return _root(lambda x: cdf(x) - p, 0.0, hi)
    q = 1.0 - p
    while sf(hi) > q:
        hi *= 2.0
    return _root(lambda x: sf(x) - q, 0.0, hi)


# --- exact rank distributions --------------------------------------------


@dataclass(frozen=True)
class ExactRankPmf:
    """Exact null pmf of an integer rank statistic on ``0..len(counts)-1``.

    ``counts[k]`` is the number of equally likely configurations giving the
    value ``k`` and ``total`` their sum, so every probability is the exact
    rational ``counts[k] / total`` rounded once.
    """

    kind: str  # "U" (Mann-Whitney) or "T" (Wilcoxon signed rank)
    sizes: tuple
    counts: tuple
    total: int

    @property
    def support_max(self) -> int:
        return len(self.counts) - 1

    @property
    def probabilities(self) -> tuple:
        return tuple(c / self.total for c in self.counts)

    def pmf(self, k: int) -> float:
        if k < 0 or k > self.support_max:
            return 0.0
        return self.counts[k] / self.total

    def cdf_count(self, k) -> int:
        """Number of configurations with statistic <= k."""
        k = math.floor(k)
        if k < 0:
            return 0
        return sum(self.counts[: min(k, self.support_max) + 1])

    def cdf(self, k) -> float:
        return self.cdf_count(k) / self.total

    def two_sided_p(self, k) -> float:
        """2 * P(S <= k), clamped to [0, 1]."""
        return min(1.0, 2.0 * self.cdf_count(k) / self.total)

    def critical_value(self, alpha: float) -> Optional[int]:
        """Largest k with 2 * P(S <= k) <= alpha, or None if none exists."""
        bound = Fraction(alpha)
        best = None
        cum = 0
        for k, c in enumerate(self.counts):
            cum += c
            if Fraction(2 * cum, self.total) <= bound:
                best = k
            else:
                break
        return best


@lru_cache(maxsize=256)
def _u_pmf(m: int, n: int) -> ExactRankPmf:
    counts = kernels.u_counts(m, n)
    return ExactRankPmf("U", (m, n), tuple(counts), math.comb(m + n, m))


@lru_cache(maxsize=128)
def _t_pmf(n: int) -> ExactRankPmf:
    counts = kernels.signed_rank_counts(n)
    return ExactRankPmf("T", (n,), tuple(counts), 2**n)


def exact_u_pmf(n_a: int, n_b: int, cap: int = U_CAP) -> ExactRankPmf:
    """Null pmf of the Mann-Whitney U for sample sizes ``n_a``, ``n_b``."""
    n_a, n_b = int(n_a), int(n_b)
    if n_a < 1 or n_b < 1:
        raise DomainError(f"sample sizes must be >= 1, got ({n_a}, {n_b})")
    if n_a * n_b > cap:
        raise CapExceeded(f"N_A*N_B = {n_a * n_b} exceeds the exact-U cap {cap}")
    # the distribution is symmetric in the two sizes; normalise the cache key
    base = _u_pmf(min(n_a, n_b), max(n_a, n_b))
    if (n_a, n_b) == base.sizes:
        return base
    return ExactRankPmf("U", (n_a, n_b), base.counts, base.total)


def u_critical(n_a: int, n_b: int, alpha: float, cap: int = U_CAP) -> Optional[int]:
    return exact_u_pmf(n_a, n_b, cap).critical_value(alpha)


def exact_t_pmf(n: int, cap: int = T_CAP) -> ExactRankPmf:
    """Null pmf of the Wilcoxon signed-rank sum over ``2**n`` sign patterns."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds the exact-T cap {cap}")
    return _t_pmf(n)


def t_critical(n: int, alpha: float, cap: int = T_CAP) -> Optional[int]:
    return exact_t_pmf(n, cap).critical_value(alpha)
