"""Inter-method reliability: do two methods give the same sizes?

Rater influence is cancelled by averaging the per-rater method differences
(``dab``), which is then tested against zero.  When the methods differ
systematically but correlate strongly, a least-squares line maps one
method's values onto the other's scale.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

from . import stattests as st
from .config import AnalysisConfig
from .dataset import MeasurementDataset, extract_pair
from .errors import DatasetError, InsufficientData, ProjectSetMismatch
from .stattests import SampleSummary, TestId, TestOutcome


@dataclass(frozen=True)
class InterMethodSeries:
    method_a: str
    method_b: str
    projects: tuple
    d1ab: tuple
    d2ab: tuple
    dab: tuple
    summary: SampleSummary

    def to_dict(self):
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "projects": list(self.projects),
            "d1ab": list(self.d1ab),
            "d2ab": list(self.d2ab),
            "dab": list(self.dab),
            "summary": self.summary.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["method_a"], d["method_b"], tuple(d["projects"]), tuple(d["d1ab"]),
            tuple(d["d2ab"]), tuple(d["dab"]), SampleSummary(**d["summary"]),
        )


@dataclass(frozen=True)
class CalibrationFit:
    """Least-squares line ``b = slope * a + intercept`` on rater-averaged sizes."""

    method_a: str
    method_b: str
    slope: float
    intercept: float
    r: float
    r_squared: float
    residual_sd: float
    n: int

    def predict(self, value_a: float) -> float:
        return self.slope * value_a + self.intercept

    def render(self) -> str:
        return (
            f"{self.method_b} ≈ {self.slope:.6g}·{self.method_a} "
            f"{'+' if self.intercept >= 0 else '-'} {abs(self.intercept):.6g} "
            f"(r² = {self.r_squared:.6g})"
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def dab_series(ds: MeasurementDataset, a, b) -> InterMethodSeries:
    """Per-project d1ab = M1A - M1B, d2ab = M2A - M2B and dab = (d1ab + d2ab) / 2.

    Rater pairing is positional: the first rater of each method forms d1ab.
    """
    pa = ds.projects_for(a)
    pb = ds.projects_for(b)
    if set(pa) != set(pb):
        raise ProjectSetMismatch([p for p in pa if p not in set(pb)], [p for p in pb if p not in set(pa)])
    projects, a1, a2 = extract_pair(ds, a, pa)
    _, b1, b2 = extract_pair(ds, b, pa)
    d1 = tuple(x - y for x, y in zip(a1, b1))
    d2 = tuple(x - y for x, y in zip(a2, b2))
    dab = tuple((x + y) / 2.0 for x, y in zip(d1, d2))
    return InterMethodSeries(a, b, projects, d1, d2, dab, SampleSummary.of(dab))


def intermethod_equality_test(
    series: InterMethodSeries, alpha: float = 0.05, lilliefors: bool = False, gate: TestOutcome | None = None
) -> TestOutcome:
    """Test H0: dab = 0.

    Normal dab (by the KS gate, passed in or computed here) gets the t test
    t = mean / (s / sqrt(n - 1)) on n - 1 df.  Non-normal dab falls back to
    the Wilcoxon signed-rank test against zero, flagged in the warnings.
    """
    dab = list(series.dab)
    n = len(dab)
    if n < 2:
        raise InsufficientData(f"inter-method test needs at least 2 projects, got {n}")
    if series.summary.var_n == 0.0:
        return st.one_sample_t(dab, alpha, TestId.INTER_METHOD_T)
    if gate is None and n >= 3:
        gate = st.ks_normality(dab, alpha, lilliefors)
    if gate is None:
        out = st.one_sample_t(dab, alpha, TestId.INTER_METHOD_T)
        return _with_warning(out, "fewer than 3 projects: normality not checked, t test used")
    if not gate.reject and gate.degenerate is None:
        return st.one_sample_t(dab, alpha, TestId.INTER_METHOD_T)
    out = st.signed_rank_on_differences(dab, alpha)
    return _with_warning(out, "dab not normal: Wilcoxon signed-rank against zero used instead of the t test")


def _with_warning(outcome: TestOutcome, message: str) -> TestOutcome:
    return replace(outcome, warnings=outcome.warnings + (message,))


def method_means(ds: MeasurementDataset, method, projects) -> list:
    _, first, second = extract_pair(ds, method, projects)
    return [(x + y) / 2.0 for x, y in zip(first, second)]


def fit_calibration_regression(
    ds: MeasurementDataset, a, b, config: AnalysisConfig | None = None
) -> tuple[Optional[CalibrationFit], Optional[str]]:
    """Regress rater-averaged ``b`` sizes on ``a`` sizes when |r| is strong.

    Returns ``(fit, None)`` or ``(None, diagnostic)``.
    """
    config = config or AnalysisConfig()
    projects = ds.projects_for(a)
    x = method_means(ds, a, projects)
    y = method_means(ds, b, projects)
    n = len(x)
    if n < 3:
        return None, f"only {n} projects: regression not fitted"
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxx = math.fsum((v - mx) ** 2 for v in x)
    syy = math.fsum((v - my) ** 2 for v in y)
    if sxx == 0.0:
        return None, f"zero variance in {a!r} sizes: regression undefined"
    sxy = math.fsum((u - mx) * (v - my) for u, v in zip(x, y))
    r = sxy / math.sqrt(sxx * syy) if syy > 0.0 else 0.0
    r = max(-1.0, min(1.0, r))
    if abs(r) < config.strong_r:
        return None, f"correlation too weak for calibration (|r| = {abs(r):.4g} < {config.strong_r:g})"
    slope = sxy / sxx
    intercept = my - slope * mx
    sse = math.fsum((v - (slope * u + intercept)) ** 2 for u, v in zip(x, y))
    residual_sd = math.sqrt(sse / (n - 2))
    return CalibrationFit(a, b, slope, intercept, r, r * r, residual_sd, n), None


@dataclass(frozen=True)
class InterMethodResult:
    """Inter-method analysis of one pair of methods."""

    method_a: str
    method_b: str
    series: Optional[InterMethodSeries]
    gate: Optional[TestOutcome]
    outcome: Optional[TestOutcome]
    calibration: Optional[CalibrationFit]
    diagnostics: tuple = ()

    def to_dict(self):
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "series": self.series.to_dict() if self.series else None,
            "gate": self.gate.to_dict() if self.gate else None,
            "outcome": self.outcome.to_dict() if self.outcome else None,
            "calibration": self.calibration.to_dict() if self.calibration else None,
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["method_a"],
            d["method_b"],
            InterMethodSeries.from_dict(d["series"]) if d["series"] else None,
            TestOutcome.from_dict(d["gate"]) if d["gate"] else None,
            TestOutcome.from_dict(d["outcome"]) if d["outcome"] else None,
            CalibrationFit.from_dict(d["calibration"]) if d["calibration"] else None,
            tuple(d["diagnostics"]),
        )


def analyze_intermethod(ds: MeasurementDataset, a, b, config: AnalysisConfig | None = None) -> InterMethodResult:
    """dab series, KS gate, equality test and (on rejection) calibration fit."""
    config = config or AnalysisConfig()
    try:
        series = dab_series(ds, a, b)
    except DatasetError as exc:
        return InterMethodResult(a, b, None, None, None, None, (str(exc),))
    diagnostics = []
    gate = None
    if len(series.dab) >= 3 and series.summary.var_n > 0.0:
        gate = st.ks_normality(list(series.dab), config.alpha, config.lilliefors)
    try:
        outcome = intermethod_equality_test(series, config.alpha, config.lilliefors, gate)
    except InsufficientData as exc:
        return InterMethodResult(a, b, series, gate, None, None, (str(exc),))
    diagnostics.extend(outcome.warnings)
    fit = None
    if outcome.reject:
        fit, why = fit_calibration_regression(ds, a, b, config)
        if why:
            diagnostics.append(why)
    return InterMethodResult(a, b, series, gate, outcome, fit, tuple(diagnostics))
