"""CA2 consistency statistic and the inter-rater comparison of two methods.

For every project measured twice with a method, CA2 is the absolute
difference of the two measurements divided by their average; lower values
mean a more consistent method.  :func:`compare_methods_interrater` runs the
full decision procedure on the CA2 samples of two methods:

1. equal rater influence within each method (abort when rejected);
2. Kolmogorov-Smirnov normality gate per CA2 sample;
3. correlation gate deciding independent vs related samples;
4. the matching equality test(s): means then variances for normal data
   (branches a/b or c/d), Mann-Whitney (e/f) or Wilcoxon (g/h) otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from . import stattests as st
from .config import AnalysisConfig
from .dataset import MeasurementDataset, extract_pair
from .errors import DatasetError, InsufficientData, NonPositiveInput
from .stattests import CorrelationKind, SampleSummary, TestId, TestOutcome


def ca2(m1: float, m2: float) -> float:
    """|m1 - m2| / ((m1 + m2) / 2); lies in [0, 2)."""
    if not (m1 > 0 and m2 > 0) or math.isinf(m1) or math.isinf(m2):
        raise NonPositiveInput(f"measurements must be positive and finite, got {m1!r}, {m2!r}")
    return abs(m1 - m2) / ((m1 + m2) / 2.0)


@dataclass(frozen=True)
class ConsistencySample:
    method_id: str
    projects: tuple
    values: tuple
    summary: SampleSummary
    normal: Optional[bool] = None

    def to_dict(self):
        return {
            "method": self.method_id,
            "projects": list(self.projects),
            "values": list(self.values),
            "summary": self.summary.to_dict(),
            "normal": self.normal,
        }


def consistency_sample(ds: MeasurementDataset, method, projects=None) -> ConsistencySample:
    projects, first, second = extract_pair(ds, method, projects)
    values = tuple(ca2(a, b) for a, b in zip(first, second))
    if not values:
        raise InsufficientData(f"method {method!r} has no measured projects")
    return ConsistencySample(method, projects, values, SampleSummary.of(values))


class VerdictKind(str, Enum):
    MORE_CONSISTENT = "MoreConsistent"
    NO_DIFFERENCE = "NoDifference"
    INCONCLUSIVE = "Inconclusive"


_BRANCH_OF = {
    TestId.MEANS_INDEP_Z: "a",
    TestId.MEANS_INDEP_T: "a",
    TestId.VAR_INDEP_F: "b",
    TestId.MEANS_RELATED_Z: "c",
    TestId.VAR_RELATED_CHI2: "d",
    TestId.MANN_WHITNEY_SMALL: "e",
    TestId.MANN_WHITNEY_LARGE: "f",
    TestId.WILCOXON_SMALL: "g",
    TestId.WILCOXON_LARGE: "h",
}


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Result of comparing the consistency of two methods.

    ``gates`` summarises the routing decisions and points into ``evidence``
    (by index) for the outcomes behind them; ``evidence`` lists every test
    that ran, once, in execution order.
    """

    method_a: str
    method_b: str
    kind: VerdictKind
    method: Optional[str] = None
    branch_taken: Optional[str] = None
    decided_by: Optional[str] = None
    gates: dict = field(default_factory=dict)
    evidence: tuple = ()
    diagnostics: tuple = ()

    def to_dict(self):
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "kind": self.kind.value,
            "method": self.method,
            "branch_taken": self.branch_taken,
            "decided_by": self.decided_by,
            "gates": self.gates,
            "evidence": [o.to_dict() for o in self.evidence],
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            method_a=d["method_a"],
            method_b=d["method_b"],
            kind=VerdictKind(d["kind"]),
            method=d["method"],
            branch_taken=d["branch_taken"],
            decided_by=d["decided_by"],
            gates=d["gates"],
            evidence=tuple(TestOutcome.from_dict(o) for o in d["evidence"]),
            diagnostics=tuple(d["diagnostics"]),
        )


class _Run:
    """Accumulates evidence while the decision tree executes."""

    def __init__(self, a, b):
        self.a = a
        self.b = b
        self.evidence = []
        self.gates = {}
        self.diagnostics = []

    def add(self, outcome: TestOutcome) -> int:
        self.evidence.append(outcome)
        self.diagnostics.extend(outcome.warnings)
        return len(self.evidence) - 1

    def verdict(self, kind, method=None, branch=None, decided_by=None, diagnostic=None):
        if diagnostic:
            self.diagnostics.append(diagnostic)
        return ConsistencyVerdict(
            self.a,
            self.b,
            kind,
            method,
            branch,
            decided_by,
            self.gates,
            tuple(self.evidence),
            tuple(self.diagnostics),
        )


def _lower(values_a: float, values_b: float, a, b):
    if values_a < values_b:
        return a
    if values_b < values_a:
        return b
    return None


def compare_methods_interrater(
    ds: MeasurementDataset, a, b, config: AnalysisConfig | None = None
) -> ConsistencyVerdict:
    """Decide whether method ``a`` or ``b`` is more consistent between raters."""
    if a == b:
        raise ValueError(f"cannot compare method {a!r} with itself")
    config = config or AnalysisConfig()
    alpha = config.alpha
    run = _Run(a, b)

    # 1. rater influence within each method
    pairs = {}
    for m in (a, b):
        try:
            pairs[m] = extract_pair(ds, m)
        except DatasetError as exc:
            return run.verdict(VerdictKind.INCONCLUSIVE, diagnostic=str(exc))
    influence = {}
    failed = []
    for m in (a, b):
        _, first, second = pairs[m]
        try:
            outcome = st.rater_influence_test(first, second, alpha)
        except InsufficientData as exc:
            return run.verdict(VerdictKind.INCONCLUSIVE, diagnostic=f"method {m!r}: {exc}")
        influence[m] = run.add(outcome)
        if outcome.reject:
            failed.append((m, outcome))
    if failed:
        run.gates["rater_influence"] = influence
        for m, outcome in failed:
            r1, r2 = ds.raters(m)
            run.diagnostics.append(
                f"method {m!r}: raters {r1!r} and {r2!r} differ in influence "
                f"(p = {outcome.p_value:.6g}); resolve the anomalous rater first"
            )
        return run.verdict(VerdictKind.INCONCLUSIVE)
    run.gates["rater_influence"] = influence

    # 2. normality gate on the CA2 samples
    samples = {m: consistency_sample(ds, m) for m in (a, b)}
    ks_idx = {}
    normal = {}
    for m in (a, b):
        try:
            outcome = st.ks_normality(samples[m].values, alpha, config.lilliefors)
        except InsufficientData as exc:
            return run.verdict(VerdictKind.INCONCLUSIVE, diagnostic=f"method {m!r}: {exc}")
        ks_idx[m] = run.add(outcome)
        normal[m] = not outcome.reject and outcome.degenerate is None
    run.gates["ks"] = ks_idx
    run.gates["normal"] = dict(normal)
    both_normal = normal[a] and normal[b]
    run.gates["mixed_normality"] = normal[a] != normal[b]
    sa, sb = samples[a], samples[b]

    # 3. independence gate on the projects both methods measured
    same_projects = set(sa.projects) == set(sb.projects)
    shared = [p for p in sa.projects if p in set(sb.projects)]
    related = False
    if config.correlation is not None:
        kind = CorrelationKind(config.correlation)
    else:
        kind = CorrelationKind.PEARSON if both_normal else CorrelationKind.SPEARMAN
    run.gates["correlation_kind"] = kind.value
    if len(shared) >= 3:
        xa = _aligned(sa, shared)
        xb = _aligned(sb, shared)
        corr = st.correlation(xa, xb, kind, alpha)
        run.gates["correlation"] = run.add(corr)
        related = corr.reject
    else:
        run.gates["correlation"] = None
        run.diagnostics.append(
            f"only {len(shared)} shared projects: correlation gate skipped, samples treated as independent"
        )
    run.gates["related"] = related
    if related and not same_projects:
        return run.verdict(
            VerdictKind.INCONCLUSIVE,
            diagnostic="samples are related but the methods measured different project sets",
        )

    # 4. equality tests
    if related:
        xa = list(sa.values)
        xb = _aligned(sb, sa.projects)
    if both_normal and not related:
        if sa.summary.n > st.SMALL_SAMPLE_MAX and sb.summary.n > st.SMALL_SAMPLE_MAX:
            means = st.means_indep_large(sa.summary, sb.summary, alpha)
        else:
            means = st.means_indep_small(sa.summary, sb.summary, alpha)
        return _cascade(run, means, lambda: st.var_indep_f(sa.summary, sb.summary, alpha), sa, sb)
    if both_normal and related:
        means = st.means_related_z(xa, xb, alpha)
        return _cascade(run, means, lambda: st.var_related_chi2(xa, xb, alpha), sa, sb)
    if not related:
        outcome = st.mann_whitney(list(sa.values), list(sb.values), alpha)
    else:
        outcome = st.wilcoxon_signed_rank(xa, xb, alpha)
    run.add(outcome)
    branch = _BRANCH_OF[outcome.test_id]
    if outcome.reject:
        winner = _lower(sa.summary.mean, sb.summary.mean, a, b)
        if winner is None and outcome.test_id in (TestId.MANN_WHITNEY_SMALL, TestId.MANN_WHITNEY_LARGE):
            # equal means: fall back to the mean rank (higher U_A means lower A ranks)
            winner = a if outcome.detail.u_a > outcome.detail.u_b else b
        if winner is None:
            return run.verdict(VerdictKind.INCONCLUSIVE, branch=branch, decided_by="distribution",
                               diagnostic="test rejected but CA2 means are equal")
        return run.verdict(VerdictKind.MORE_CONSISTENT, winner, branch, "distribution")
    return run.verdict(VerdictKind.NO_DIFFERENCE, branch=branch, decided_by="distribution")


def _aligned(sample: ConsistencySample, projects: Sequence) -> list:
    index = dict(zip(sample.projects, sample.values))
    return [index[p] for p in projects]


def _cascade(run: _Run, means: TestOutcome, variance_test, sa, sb) -> ConsistencyVerdict:
    """Means first; the variance test runs only when the means test accepts."""
    a, b = run.a, run.b
    run.add(means)
    if means.reject:
        winner = _lower(sa.summary.mean, sb.summary.mean, a, b)
        return run.verdict(VerdictKind.MORE_CONSISTENT, winner, _BRANCH_OF[means.test_id], "means")
    variances = variance_test()
    run.add(variances)
    branch = _BRANCH_OF[variances.test_id]
    if variances.degenerate == "singular_covariance":
        return run.verdict(VerdictKind.INCONCLUSIVE, branch=branch, decided_by="variances")
    if variances.reject:
        winner = _lower(sa.summary.var_n, sb.summary.var_n, a, b)
        return run.verdict(VerdictKind.MORE_CONSISTENT, winner, branch, "variances")
    return run.verdict(VerdictKind.NO_DIFFERENCE, branch=branch, decided_by="variances")
