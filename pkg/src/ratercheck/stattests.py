"""The hypothesis-test battery.

Each function returns a :class:`TestOutcome` holding the statistic, the
reference distribution's degrees of freedom or sample sizes, a
:class:`~ratercheck.distributions.TailDecision` and a test-specific detail
record, so every formula evaluation can be audited afterwards.

Variance conventions
--------------------
``var_n`` (divisor n) is the lowercase s^2 used by the mean tests, where
``s^2 / (n - 1)`` is the squared standard error of a mean.  The
related-variance test uses divisor ``n - 1`` covariance entries.  Both are
carried by :class:`SampleSummary` so they are never mixed silently.

All p-values are two-sided except the chi-square related-variance test,
which is an upper-tail likelihood-ratio test.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Sequence

from . import distributions as dist
from . import kernels
from .distributions import TailDecision
from .errors import CapExceeded, DomainError, InsufficientData

SMALL_SAMPLE_MAX = 30  # means: Student t when either n <= 30
MW_EXACT_MAX = 10  # Mann-Whitney: exact table when N_A or N_B <= 10
WILCOXON_EXACT_MAX = 30  # Wilcoxon: exact table when n <= 30


class TestId(str, Enum):
    __test__ = False

    RATER_INFLUENCE = "RaterInfluence"
    KS_NORMALITY = "KSNormality"
    CORRELATION = "Correlation"
    MEANS_INDEP_Z = "MeansIndepZ"
    MEANS_INDEP_T = "MeansIndepT"
    VAR_INDEP_F = "VarIndepF"
    MEANS_RELATED_Z = "MeansRelatedZ"
    VAR_RELATED_CHI2 = "VarRelatedChi2"
    MANN_WHITNEY_SMALL = "MannWhitneySmall"
    MANN_WHITNEY_LARGE = "MannWhitneyLarge"
    WILCOXON_SMALL = "WilcoxonSmall"
    WILCOXON_LARGE = "WilcoxonLarge"
    INTER_METHOD_T = "InterMethodT"


class CorrelationKind(str, Enum):
    PEARSON = "Pearson"
    SPEARMAN = "Spearman"
    KENDALL = "Kendall"


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    var_n: float
    var_unbiased: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "SampleSummary":
        n = len(values)
        if n == 0:
            raise InsufficientData("empty sample")
        mean = math.fsum(values) / n
        ss = math.fsum((v - mean) ** 2 for v in values)
        return cls(n, mean, ss / n, ss / (n - 1) if n > 1 else 0.0)

    def to_dict(self):
        return asdict(self)


# --- detail records -------------------------------------------------------


@dataclass(frozen=True)
class LocationDetail:
    """Mean comparisons (branches a, c) and one-sample t tests."""

    mean_a: float
    mean_b: Optional[float]
    standard_error: Optional[float]
    r12: Optional[float] = None


@dataclass(frozen=True)
class VarianceDetail:
    var_a: float
    var_b: float
    lower_critical: Optional[float]
    upper_critical: Optional[float]


@dataclass(frozen=True)
class RelatedVarianceDetail:
    s11: float
    s22: float
    s12: float
    det_s: float
    sigma2: float
    rho: Optional[float]
    multiplier: float
    df: int


@dataclass(frozen=True)
class RankTestDetail:
    r_a: float
    r_b: float
    u_a: float
    u_b: float
    n_a: int
    n_b: int
    tie_groups: tuple
    regime: str  # "exact", "normal" or "normal-fallback"
    mu_u: Optional[float] = None
    sigma_u: Optional[float] = None


@dataclass(frozen=True)
class SignedRankDetail:
    t_p: float
    t_n: float
    n_effective: int
    zeros_dropped: int
    tie_groups: tuple
    regime: str
    t_mean: Optional[float] = None
    sigma_t: Optional[float] = None


@dataclass(frozen=True)
class KSDetail:
    d: float
    n: int
    mean: float
    sd: float
    variant: str  # "kolmogorov" or "lilliefors"
    normal: bool


@dataclass(frozen=True)
class CorrelationOutcome:
    coefficient_kind: str
    r: Optional[float]
    p_value: float


_DETAIL_TYPES = {
    cls.__name__: cls
    for cls in (
        LocationDetail,
        VarianceDetail,
        RelatedVarianceDetail,
        RankTestDetail,
        SignedRankDetail,
        KSDetail,
        CorrelationOutcome,
    )
}


def _detail_to_dict(detail):
    if detail is None:
        return None
    d = {"type": type(detail).__name__}
    for k, v in asdict(detail).items():
        d[k] = list(v) if isinstance(v, tuple) else v
    return d


def _detail_from_dict(d):
    if d is None:
        return None
    d = dict(d)
    cls = _DETAIL_TYPES[d.pop("type")]
    if "tie_groups" in d:
        d["tie_groups"] = tuple(d["tie_groups"])
    return cls(**d)


@dataclass(frozen=True)
class TestOutcome:
    """Audit record of one hypothesis test.

    ``degenerate`` names the degeneracy path taken, if any (``"all_zero"``,
    ``"constant_offset"``, ``"zero_variance"``, ``"singular_covariance"``,
    ``"undefined_correlation"``); ``warnings`` collects approximations
    substituted for the nominal procedure.
    """

    __test__ = False

    test_id: TestId
    statistic: Optional[float]
    df_or_sizes: tuple
    decision: TailDecision
    detail: object = None
    degenerate: Optional[str] = None
    warnings: tuple = field(default=())

    @property
    def p_value(self) -> float:
        return self.decision.p_value

    @property
    def reject(self) -> bool:
        return self.decision.reject

    def to_dict(self):
        return {
            "test_id": self.test_id.value,
            "statistic": self.statistic,
            "df_or_sizes": list(self.df_or_sizes),
            "decision": self.decision.to_dict(),
            "detail": _detail_to_dict(self.detail),
            "degenerate": self.degenerate,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            test_id=TestId(d["test_id"]),
            statistic=d["statistic"],
            df_or_sizes=tuple(d["df_or_sizes"]),
            decision=TailDecision.from_dict(d["decision"]),
            detail=_detail_from_dict(d["detail"]),
            degenerate=d["degenerate"],
            warnings=tuple(d["warnings"]),
        )


# --- helpers --------------------------------------------------------------


def _z_crit(alpha):
    return dist.std_normal_quantile(1.0 - alpha / 2.0) if 0.0 < alpha < 1.0 else None


def _t_crit(alpha, df):
    return dist.student_t_quantile(1.0 - alpha / 2.0, df) if 0.0 < alpha < 1.0 else None


def _fixed(test_id, sizes, alpha, accept, degenerate, detail=None, statistic=None, warnings=()):
    """Outcome of a degenerate sample where the decision is forced."""
    p = 1.0 if accept else 0.0
    return TestOutcome(
        test_id,
        statistic,
        tuple(sizes),
        TailDecision.from_p(statistic, None, p, alpha),
        detail,
        degenerate,
        tuple(warnings),
    )


def _pearson_r(x, y):
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxx = math.fsum((v - mx) ** 2 for v in x)
    syy = math.fsum((v - my) ** 2 for v in y)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _check_paired(x, y, minimum):
    if len(x) != len(y):
        raise InsufficientData(f"paired series differ in length ({len(x)} vs {len(y)})")
    if len(x) < minimum:
        raise InsufficientData(f"need at least {minimum} pairs, got {len(x)}")


# --- rater influence and one-sample t ------------------------------------


def one_sample_t(values: Sequence[float], alpha: float, test_id=TestId.RATER_INFLUENCE):
    """Two-sided t test of H0: mean = 0, with t = mean / (s_n / sqrt(n - 1))."""
    n = len(values)
    if n < 2:
        raise InsufficientData(f"need at least 2 observations, got {n}")
    s = SampleSummary.of(values)
    df = n - 1
    if s.var_n == 0.0:
        detail = LocationDetail(s.mean, None, 0.0)
        if s.mean == 0.0:
            return _fixed(test_id, (df,), alpha, True, "all_zero", detail, 0.0)
        return _fixed(test_id, (df,), alpha, False, "constant_offset", detail)
    se = math.sqrt(s.var_n / (n - 1))
    t = s.mean / se
    return TestOutcome(
        test_id,
        t,
        (df,),
        TailDecision.from_p(t, _t_crit(alpha, df), dist.two_sided_t_p(t, df), alpha),
        LocationDetail(s.mean, None, se),
    )


def rater_influence_test(first: Sequence[float], second: Sequence[float], alpha: float = 0.05):
    """Test equal rater influence from per-project differences ``first - second``.

    Under the measurement model the differences are N(tau_j - tau_k, 2 sigma^2),
    so H0: tau_j = tau_k is a one-sample location test with unknown variance.
    """
    _check_paired(first, second, 2)
    diffs = [a - b for a, b in zip(first, second)]
    return one_sample_t(diffs, alpha, TestId.RATER_INFLUENCE)


# --- normality gate -------------------------------------------------------


def _lilliefors_p(d, n):
    """Dallal-Wilkinson approximation to the Lilliefors p-value (good for p < 0.1)."""
    if n > 100:
        kd = d * (n / 100.0) ** 0.49
        nd = 100
    else:
        kd = d
        nd = n
    s = math.sqrt(nd + 2.78019)
    # below the vertex the approximation turns over; hold it at its maximum
    kd = max(kd, 2.99587 / (2.0 * 7.01256 * s))
    p = math.exp(
        -7.01256 * kd * kd * (nd + 2.78019)
        + 2.99587 * kd * s
        - 0.122119
        + 0.974598 / math.sqrt(nd)
        + 1.67997 / nd
    )
    return min(1.0, p)


def ks_normality(sample: Sequence[float], alpha: float = 0.05, lilliefors: bool = False):
    """One-sample Kolmogorov-Smirnov test against N(mean, s) fitted to the sample.

    ``reject`` means "not normal".  By default the p-value comes from the
    limiting Kolmogorov distribution; ``lilliefors=True`` accounts for the
    estimated parameters.
    """
    n = len(sample)
    if n < 3:
        raise InsufficientData(f"KS normality needs n >= 3, got {n}")
    s = SampleSummary.of(sample)
    sd = math.sqrt(s.var_n)
    variant = "lilliefors" if lilliefors else "kolmogorov"
    if sd == 0.0:
        detail = KSDetail(0.0, n, s.mean, 0.0, variant, False)
        return _fixed(TestId.KS_NORMALITY, (n,), alpha, False, "zero_variance", detail)
    d = kernels.ks_normal_statistic(sorted(sample), s.mean, sd)
    if lilliefors:
        p = _lilliefors_p(d, n)
        crit = _invert_decreasing(lambda x: _lilliefors_p(x, n), alpha)
    else:
        p = kernels.kolmogorov_sf(math.sqrt(n) * d)
        crit = _invert_decreasing(kernels.kolmogorov_sf, alpha)
        crit = crit / math.sqrt(n) if crit is not None else None
    decision = TailDecision.from_p(d, crit, p, alpha)
    detail = KSDetail(d, n, s.mean, sd, variant, not decision.reject)
    return TestOutcome(TestId.KS_NORMALITY, d, (n,), decision, detail)


def _invert_decreasing(f, alpha):
    if not 0.0 < alpha < 1.0:
        return None
    lo, hi = 1e-6, 1.0
    if f(lo) < alpha:
        return None
    while f(hi) > alpha:
        hi *= 2.0
    return dist._root(lambda x: f(x) - alpha, lo, hi)


# --- correlation gate -----------------------------------------------------


def _kendall(x, y):
    n = len(x)
    s = 0
    for i in range(n):
        for j in range(i + 1, n):
            a = (x[i] > x[j]) - (x[i] < x[j])
            b = (y[i] > y[j]) - (y[i] < y[j])
            s += a * b
    _, tx = kernels.midranks(list(x))
    _, ty = kernels.midranks(list(y))
    n0 = n * (n - 1) // 2
    n1 = sum(t * (t - 1) // 2 for t in tx)
    n2 = sum(t * (t - 1) // 2 for t in ty)
    if n0 == n1 or n0 == n2:
        return None, None
    tau = s / math.sqrt((n0 - n1) * (n0 - n2))
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(t * (t - 1) * (2 * t + 5) for t in ty)
    v1 = sum(t * (t - 1) for t in tx) * sum(t * (t - 1) for t in ty)
    v2 = sum(t * (t - 1) * (t - 2) for t in tx) * sum(t * (t - 1) * (t - 2) for t in ty)
    var_s = (v0 - vt - vu) / 18.0 + v1 / (2.0 * n * (n - 1))
    if n > 2:
        var_s += v2 / (9.0 * n * (n - 1) * (n - 2))
    z = s / math.sqrt(var_s)
    return max(-1.0, min(1.0, tau)), z


def correlation(x: Sequence[float], y: Sequence[float], kind=CorrelationKind.PEARSON, alpha: float = 0.05):
    """Correlation coefficient with a two-sided test of H0: no association.

    ``reject`` means the samples are treated as related.  Pearson and
    Spearman use t = r sqrt(n-2) / sqrt(1-r^2) on n-2 df; Kendall's tau-b
    uses the tie-corrected normal approximation.
    """
    kind = CorrelationKind(kind)
    _check_paired(x, y, 3)
    n = len(x)
    df = n - 2
    if kind is CorrelationKind.KENDALL:
        r, z = _kendall(x, y)
        if r is None:
            return _undefined_correlation(kind, n, alpha)
        p = dist.two_sided_normal_p(z)
        crit = _z_crit(alpha)
        stat_sizes = (n,)
    else:
        if kind is CorrelationKind.SPEARMAN:
            x = kernels.midranks(list(x))[0]
            y = kernels.midranks(list(y))[0]
        r = _pearson_r(x, y)
        if r is None:
            return _undefined_correlation(kind, n, alpha)
        if abs(r) == 1.0:
            p = 0.0
        else:
            t = r * math.sqrt(df) / math.sqrt(1.0 - r * r)
            p = dist.two_sided_t_p(t, df)
        # critical |r| equivalent to the t critical value
        tc = _t_crit(alpha, df)
        crit = tc / math.sqrt(df + tc * tc) if tc is not None else None
        stat_sizes = (df,)
    decision = TailDecision.from_p(r, crit, p, alpha)
    return TestOutcome(
        TestId.CORRELATION, r, stat_sizes, decision, CorrelationOutcome(kind.value, r, decision.p_value)
    )


def _undefined_correlation(kind, n, alpha):
    return _fixed(
        TestId.CORRELATION,
        (n,),
        alpha,
        True,
        "undefined_correlation",
        CorrelationOutcome(kind.value, None, 1.0),
        warnings=("zero variance in a series: correlation undefined, samples treated as independent",),
    )


# --- branch a: independent means -----------------------------------------


def _means_degenerate(test_id, sizes, a, b, alpha):
    detail = LocationDetail(a.mean, b.mean, 0.0)
    if a.mean == b.mean:
        return _fixed(test_id, sizes, alpha, True, "zero_variance", detail, 0.0)
    return _fixed(test_id, sizes, alpha, False, "zero_variance", detail)


def means_indep_large(a: SampleSummary, b: SampleSummary, alpha: float = 0.05):
    """Large-sample Z for equal means of independent samples (both n > 30)."""
    if a.n <= SMALL_SAMPLE_MAX or b.n <= SMALL_SAMPLE_MAX:
        raise InsufficientData(f"large-sample Z needs n1, n2 > {SMALL_SAMPLE_MAX}; got {a.n}, {b.n}")
    sizes = (a.n, b.n)
    se2 = a.var_n / (a.n - 1) + b.var_n / (b.n - 1)
    if se2 == 0.0:
        return _means_degenerate(TestId.MEANS_INDEP_Z, sizes, a, b, alpha)
    se = math.sqrt(se2)
    z = (a.mean - b.mean) / se
    return TestOutcome(
        TestId.MEANS_INDEP_Z,
        z,
        sizes,
        TailDecision.from_p(z, _z_crit(alpha), dist.two_sided_normal_p(z), alpha),
        LocationDetail(a.mean, b.mean, se),
    )


def means_indep_small(a: SampleSummary, b: SampleSummary, alpha: float = 0.05):
    """Pooled-variance Student t for equal means, df = n1 + n2 - 2."""
    if a.n < 2 or b.n < 2:
        raise InsufficientData(f"t test needs n1, n2 >= 2; got {a.n}, {b.n}")
    df = a.n + b.n - 2
    pooled = (a.n * a.var_n + b.n * b.var_n) / df
    se2 = pooled * ((a.n + b.n) / (a.n * b.n))
    if se2 == 0.0:
        return _means_degenerate(TestId.MEANS_INDEP_T, (df,), a, b, alpha)
    se = math.sqrt(se2)
    t = (a.mean - b.mean) / se
    return TestOutcome(
        TestId.MEANS_INDEP_T,
        t,
        (df,),
        TailDecision.from_p(t, _t_crit(alpha, df), dist.two_sided_t_p(t, df), alpha),
        LocationDetail(a.mean, b.mean, se),
    )


# --- branch b: independent variances -------------------------------------


def var_indep_f(a: SampleSummary, b: SampleSummary, alpha: float = 0.05):
    """F = n1 (n2-1) s1^2 / (n2 (n1-1) s2^2) on (n1-1, n2-1) df."""
    if a.n < 2 or b.n < 2:
        raise InsufficientData(f"F test needs n1, n2 >= 2; got {a.n}, {b.n}")
    d1, d2 = a.n - 1, b.n - 1
    sizes = (d1, d2)
    num = a.n * d2 * a.var_n
    den = b.n * d1 * b.var_n
    if den == 0.0:
        detail = VarianceDetail(a.var_n, b.var_n, None, None)
        return _fixed(TestId.VAR_INDEP_F, sizes, alpha, num == 0.0, "zero_variance", detail)
    f = num / den
    # p-value from the orientation with the larger ratio so that swapping
    # the samples reproduces it bit for bit
    if (num, d1) >= (den, d2):
        p = 2.0 * dist.f_sf(f, d1, d2)
    else:
        p = 2.0 * dist.f_sf(den / num, d2, d1)
    if 0.0 < alpha < 1.0:
        lower = dist.f_quantile(alpha / 2.0, d1, d2)
        upper = dist.f_quantile(1.0 - alpha / 2.0, d1, d2)
    else:
        lower = upper = None
    return TestOutcome(
        TestId.VAR_INDEP_F,
        f,
        sizes,
        TailDecision.from_p(f, upper, p, alpha),
        VarianceDetail(a.var_n, b.var_n, lower, upper),
    )


# --- branch c: related means ----------------------------------------------


def means_related_z(x: Sequence[float], y: Sequence[float], alpha: float = 0.05):
    """Z for equal means of paired samples, using the Pearson r12 of the pairs."""
    _check_paired(x, y, 3)
    n = len(x)
    a = SampleSummary.of(x)
    b = SampleSummary.of(y)
    r12 = _pearson_r(x, y)
    diffs = SampleSummary.of([u - v for u, v in zip(x, y)])
    if diffs.var_n == 0.0:
        detail = LocationDetail(a.mean, b.mean, 0.0, r12)
        if a.mean == b.mean or diffs.mean == 0.0:
            return _fixed(TestId.MEANS_RELATED_Z, (n,), alpha, True, "zero_variance", detail, 0.0)
        return _fixed(TestId.MEANS_RELATED_Z, (n,), alpha, False, "zero_variance", detail)
    s1 = math.sqrt(a.var_n)
    s2 = math.sqrt(b.var_n)
    k = math.sqrt(n - 1)
    se2 = a.var_n / (n - 1) + b.var_n / (n - 1) - 2.0 * (r12 or 0.0) * (s1 / k) * (s2 / k)
    if se2 <= 0.0:
        # rounding; the expression equals var_n(x - y) / (n - 1)
        se2 = diffs.var_n / (n - 1)
    se = math.sqrt(se2)
    z = (a.mean - b.mean) / se
    return TestOutcome(
        TestId.MEANS_RELATED_Z,
        z,
        (n,),
        TailDecision.from_p(z, _z_crit(alpha), dist.two_sided_normal_p(z), alpha),
        LocationDetail(a.mean, b.mean, se, r12),
    )


# --- branch d: related variances -------------------------------------------


def var_related_chi2(x: Sequence[float], y: Sequence[float], alpha: float = 0.05):
    """Likelihood-ratio chi-square test of equal variances for paired samples.

    With p = 2 the statistic is
    ``-(n - 2.5) * ln(|S| / ((sigma^2)^2 (1 - rho)(1 + rho)))`` on 1 df,
    where ``sigma^2 = (s11 + s22) / 2`` and ``rho = s12 / sigma^2``.  The
    variance term is squared (the p-th power) so that the ratio is
    dimensionless.  The log argument is evaluated in the algebraically equal
    form ``1 - (s11 - s22)^2 / ((s11 + s22)^2 - 4 s12^2)``, which is exactly
    1 when s11 == s22 and never exceeds 1 (or, for large deviations, as
    ``4 |S| / ((s11 + s22)^2 - 4 s12^2)``).
    """
    _check_paired(x, y, 4)
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    s11 = math.fsum((v - mx) ** 2 for v in x) / (n - 1)
    s22 = math.fsum((v - my) ** 2 for v in y) / (n - 1)
    s12 = math.fsum((u - mx) * (v - my) for u, v in zip(x, y)) / (n - 1)
    det = s11 * s22 - s12 * s12
    sigma2 = (s11 + s22) / 2.0
    rho = s12 / sigma2 if sigma2 > 0.0 else None
    p_dim = 2
    multiplier = n - 1 - p_dim * (p_dim + 1) ** 2 * (2 * p_dim - 3) / (
        6.0 * (p_dim - 1) * (p_dim * p_dim + p_dim - 4)
    )
    df = p_dim * (p_dim + 1) // 2 - 2
    detail = RelatedVarianceDetail(s11, s22, s12, det, sigma2, rho, multiplier, df)
    crit = dist.chi_square_quantile(1.0 - alpha, df) if 0.0 < alpha < 1.0 else None
    if s11 == s22:
        # equal sample variances give a zero statistic even when |S| = 0 (y = x)
        return TestOutcome(TestId.VAR_RELATED_CHI2, 0.0, (df,), TailDecision.from_p(0.0, crit, 1.0, alpha), detail)
    if det <= 1e-12 * s11 * s22 or det <= 0.0:
        return _fixed(
            TestId.VAR_RELATED_CHI2,
            (df,),
            alpha,
            True,
            "singular_covariance",
            detail,
            warnings=("covariance matrix is singular: equal-variance test not computable",),
        )
    den = (s11 + s22) ** 2 - 4.0 * s12 * s12
    ratio_dev = (s11 - s22) ** 2 / den
    if ratio_dev < 0.5:
        stat = -multiplier * math.log1p(-ratio_dev)
    else:
        # same quantity as 4 |S| / den; avoids log1p(-1) when ratio_dev rounds to 1
        stat = -multiplier * math.log(4.0 * det / den)
    if stat == 0.0:
        stat = 0.0  # normalise -0.0
    return TestOutcome(
        TestId.VAR_RELATED_CHI2,
        stat,
        (df,),
        TailDecision.from_p(stat, crit, dist.chi_square_sf(stat, df), alpha),
        detail,
    )


# --- branches e, f: Mann-Whitney --------------------------------------------


def mann_whitney(a: Sequence[float], b: Sequence[float], alpha: float = 0.05, cap: int = dist.U_CAP):
    """Mann-Whitney U test on the smaller of U_A, U_B.

    Exact null distribution when N_A <= 10 or N_B <= 10 and the data are
    tie-free; otherwise the normal approximation with
    mu_U = N_A N_B / 2 and sigma_U = sqrt(N_A N_B (N_A + N_B + 1) / 12).
    """
    n_a, n_b = len(a), len(b)
    if n_a < 1 or n_b < 1:
        raise InsufficientData("both samples need at least one value")
    ranks, ties = kernels.midranks(list(a) + list(b))
    r_a = math.fsum(ranks[:n_a])
    r_b = math.fsum(ranks[n_a:])
    u_a = n_a * n_b + n_a * (n_a + 1) / 2.0 - r_a
    u_b = n_a * n_b + n_b * (n_b + 1) / 2.0 - r_b
    u = min(u_a, u_b)
    small = n_a <= MW_EXACT_MAX or n_b <= MW_EXACT_MAX
    test_id = TestId.MANN_WHITNEY_SMALL if small else TestId.MANN_WHITNEY_LARGE
    warnings = []
    if small:
        if ties:
            warnings.append("ties present: exact U distribution invalid, normal approximation used")
        else:
            try:
                pmf = dist.exact_u_pmf(n_a, n_b, cap)
            except CapExceeded as exc:
                warnings.append(f"{exc}; normal approximation used")
            else:
                crit = pmf.critical_value(alpha) if 0.0 <= alpha < 1.0 else None
                detail = RankTestDetail(r_a, r_b, u_a, u_b, n_a, n_b, tuple(ties), "exact")
                return TestOutcome(
                    test_id,
                    u,
                    (n_a, n_b),
                    TailDecision.from_p(u, crit, pmf.two_sided_p(u), alpha),
                    detail,
                )
    mu = n_a * n_b / 2.0
    sigma = math.sqrt(n_a * n_b * (n_a + n_b + 1) / 12.0)
    z = (u - mu) / sigma
    regime = "normal-fallback" if small else "normal"
    detail = RankTestDetail(r_a, r_b, u_a, u_b, n_a, n_b, tuple(ties), regime, mu, sigma)
    return TestOutcome(
        test_id,
        z,
        (n_a, n_b),
        TailDecision.from_p(z, _z_crit(alpha), dist.two_sided_normal_p(z), alpha),
        detail,
        warnings=tuple(warnings),
    )


# --- branches g, h: Wilcoxon signed rank ------------------------------------


def signed_rank_on_differences(diffs: Sequence[float], alpha: float = 0.05, cap: int = dist.T_CAP):
    """Wilcoxon signed-rank test of H0: differences symmetric about zero."""
    nonzero = [d for d in diffs if d != 0.0]
    dropped = len(diffs) - len(nonzero)
    n = len(nonzero)
    small = n <= WILCOXON_EXACT_MAX
    test_id = TestId.WILCOXON_SMALL if small else TestId.WILCOXON_LARGE
    if n == 0:
        detail = SignedRankDetail(0.0, 0.0, 0, dropped, (), "exact")
        return _fixed(test_id, (0,), alpha, True, "all_zero", detail, 0.0)
    ranks, ties = kernels.midranks([abs(d) for d in nonzero])
    t_p = math.fsum(r for r, d in zip(ranks, nonzero) if d > 0)
    t_n = math.fsum(r for r, d in zip(ranks, nonzero) if d < 0)
    t = min(t_p, t_n)
    warnings = []
    if small:
        if ties:
            warnings.append("tied |differences|: exact T distribution invalid, normal approximation used")
        else:
            try:
                pmf = dist.exact_t_pmf(n, cap)
            except CapExceeded as exc:
                warnings.append(f"{exc}; normal approximation used")
            else:
                crit = pmf.critical_value(alpha) if 0.0 <= alpha < 1.0 else None
                detail = SignedRankDetail(t_p, t_n, n, dropped, tuple(ties), "exact")
                return TestOutcome(
                    test_id,
                    t,
                    (n,),
                    TailDecision.from_p(t, crit, pmf.two_sided_p(t), alpha),
                    detail,
                )
    mean = n * (n + 1) / 4.0
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0)
    z = (t - mean) / sigma
    regime = "normal-fallback" if small else "normal"
    detail = SignedRankDetail(t_p, t_n, n, dropped, tuple(ties), regime, mean, sigma)
    return TestOutcome(
        test_id,
        z,
        (n,),
        TailDecision.from_p(z, _z_crit(alpha), dist.two_sided_normal_p(z), alpha),
        detail,
        warnings=tuple(warnings),
    )


def wilcoxon_signed_rank(x: Sequence[float], y: Sequence[float], alpha: float = 0.05, cap: int = dist.T_CAP):
    """Wilcoxon T test for paired samples on the differences ``x - y``.

    Zero differences are discarded; ties among |differences| get midranks.
    Exact regime (T <= critical value) for n <= 30 tie-free, otherwise the
    normal approximation with mean n(n+1)/4 and sd sqrt(n(n+1)(2n+1)/24).
    """
    _check_paired(x, y, 1)
    return signed_rank_on_differences([u - v for u, v in zip(x, y)], alpha, cap)


def check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0 or math.isnan(alpha):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha
