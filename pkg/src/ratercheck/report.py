"""Full analysis of a dataset and its JSON / text renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

from . import stattests as st
from .config import AnalysisConfig
from .consistency import ConsistencyVerdict, VerdictKind, compare_methods_interrater
from .dataset import MeasurementDataset, extract_pair
from .errors import DatasetError, InsufficientData
from .intermethod import InterMethodResult, analyze_intermethod
from .stattests import TestOutcome

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AnalysisReport:
    """Everything ``analyze`` found; ``rater_influence`` maps method to outcome (or None)."""

    digest: dict
    config: dict
    rater_influence: dict
    verdicts: tuple = ()
    intermethod: tuple = ()
    warnings: tuple = ()
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "digest": self.digest,
            "config": self.config,
            "rater_influence": {m: o.to_dict() if o else None for m, o in self.rater_influence.items()},
            "verdicts": [v.to_dict() for v in self.verdicts],
            "intermethod": [r.to_dict() for r in self.intermethod],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            digest=d["digest"],
            config=d["config"],
            rater_influence={m: TestOutcome.from_dict(o) if o else None for m, o in d["rater_influence"].items()},
            verdicts=tuple(ConsistencyVerdict.from_dict(v) for v in d["verdicts"]),
            intermethod=tuple(InterMethodResult.from_dict(r) for r in d["intermethod"]),
            warnings=tuple(d["warnings"]),
            schema_version=d["schema_version"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @property
    def any_more_consistent(self) -> bool:
        return any(v.kind is VerdictKind.MORE_CONSISTENT for v in self.verdicts)

    def render_text(self) -> str:
        return _render(self)


def analyze(ds: MeasurementDataset, config: AnalysisConfig | None = None) -> AnalysisReport:
    """Rater influence per method, then both reliability analyses for every method pair."""
    config = config or AnalysisConfig()
    warnings = []
    influence = {}
    for m in ds.methods:
        try:
            _, first, second = extract_pair(ds, m)
            influence[m] = st.rater_influence_test(first, second, config.alpha)
        except (DatasetError, InsufficientData) as exc:
            influence[m] = None
            warnings.append(f"method {m!r}: {exc}")
    verdicts = []
    inter = []
    for a, b in combinations(ds.methods, 2):
        verdicts.append(compare_methods_interrater(ds, a, b, config))
        inter.append(analyze_intermethod(ds, a, b, config))
    return AnalysisReport(ds.digest(), config.to_dict(), influence, tuple(verdicts), tuple(inter), tuple(warnings))


# --- text rendering -------------------------------------------------------


def _g(x) -> str:
    return "n/a" if x is None else format(x, ".6g")


def _outcome_line(o: TestOutcome) -> str:
    parts = [f"{o.test_id.value}: statistic = {_g(o.statistic)}", f"p = {_g(o.p_value)}",
             "reject" if o.reject else "accept"]
    if o.degenerate:
        parts.append(f"degenerate: {o.degenerate}")
    return ", ".join(parts)


def _render(rep: AnalysisReport) -> str:
    d = rep.digest
    out = [
        f"ratercheck report (schema {rep.schema_version})",
        f"dataset: {d['records']} records, {d['projects']} projects, methods {', '.join(map(str, d['methods']))}",
        f"alpha = {_g(rep.config['alpha'])}",
        "",
        "Rater influence",
    ]
    for m, o in rep.rater_influence.items():
        out.append(f"  {m}: " + (_outcome_line(o) if o else "not tested"))
    for v in rep.verdicts:
        out += ["", f"Inter-rater reliability: {v.method_a} vs {v.method_b}"]
        for o in v.evidence:
            out.append("  " + _outcome_line(o))
        if v.branch_taken:
            out.append(f"  branch {v.branch_taken} (decided by {v.decided_by})")
        if v.kind is VerdictKind.MORE_CONSISTENT:
            out.append(f"  verdict: {v.method} is more consistent")
        elif v.kind is VerdictKind.NO_DIFFERENCE:
            out.append("  verdict: no difference in consistency")
        else:
            out.append("  verdict: inconclusive")
        for msg in v.diagnostics:
            out.append(f"  note: {msg}")
    for r in rep.intermethod:
        out += ["", f"Inter-method reliability: {r.method_a} vs {r.method_b}"]
        if r.series is not None:
            s = r.series.summary
            out.append(f"  dab: n = {s.n}, mean = {_g(s.mean)}, sd = {_g(s.var_n ** 0.5)}")
        for o in (r.gate, r.outcome):
            if o is not None:
                out.append("  " + _outcome_line(o))
        if r.outcome is not None:
            out.append("  verdict: " + ("methods differ" if r.outcome.reject else "no systematic difference"))
        if r.calibration is not None:
            out.append("  calibration: " + r.calibration.render())
        for msg in r.diagnostics:
            out.append(f"  note: {msg}")
    if rep.warnings:
        out += ["", "Warnings"] + [f"  {w}" for w in rep.warnings]
    return "\n".join(out) + "\n"
