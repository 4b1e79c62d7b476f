import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import SIZES, build, consistent_vs_noisy, identical_methods
from ratercheck.config import AnalysisConfig
from ratercheck.consistency import (
    ConsistencyVerdict,
    VerdictKind,
    ca2,
    compare_methods_interrater,
    consistency_sample,
)
from ratercheck.errors import IncompleteDesign, NonPositiveInput
from ratercheck.stattests import TestId

positive = st.floats(1e-6, 1e9)


def test_ca2_examples():
    assert ca2(100.0, 100.0) == 0.0
    assert ca2(100.0, 120.0) == pytest.approx(2 / 11, rel=1e-15)
    assert ca2(7 * 100.0, 7 * 120.0) == pytest.approx(ca2(100.0, 120.0), rel=1e-15)


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.0, 2.0), (1.0, float("inf")), (float("nan"), 1.0)])
def test_ca2_rejects_nonpositive(bad):
    with pytest.raises(NonPositiveInput):
        ca2(*bad)


@settings(max_examples=300)
@given(positive, positive)
def test_ca2_properties(a, b):
    v = ca2(a, b)
    assert 0.0 <= v < 2.0
    assert v == ca2(b, a)
    assert (v == 0.0) == (a == b)


def test_consistency_sample_examples():
    ds = build({"A": [(x, x) for x in SIZES[:5]]})
    assert consistency_sample(ds, "A").values == (0.0,) * 5
    ds = build({"A": [(x, 1.2 * x) for x in SIZES[:4]]})
    for v in consistency_sample(ds, "A").values:
        assert v == pytest.approx(2 / 11, rel=1e-14)
    pairs = [(100.0, 110.0), (50.0, 45.0), (300.0, 300.0)]
    s = consistency_sample(build({"A": pairs}), "A")
    assert s.values == tuple(ca2(a, b) for a, b in pairs)
    assert s.projects == ("p01", "p02", "p03") and s.summary.n == 3


def test_consistency_sample_propagates_design_errors():
    ds = build({"A": [(1.0, 2.0)]})
    ds = ds.from_records([r for r in ds.records if r.rater_id == "r1"] + list(build({"B": [(1.0, 1.0)]}).records))
    with pytest.raises(IncompleteDesign):
        consistency_sample(ds, "A")


def test_perfect_versus_noisy():
    v = compare_methods_interrater(consistent_vs_noisy(), "A", "B")
    assert v.kind is VerdictKind.MORE_CONSISTENT and v.method == "A"
    assert v.branch_taken in ("e", "f")
    decisive = v.evidence[-1]
    assert decisive.test_id in (TestId.MANN_WHITNEY_SMALL, TestId.MANN_WHITNEY_LARGE)
    assert min(decisive.detail.u_a, decisive.detail.u_b) == 0.0
    assert v.gates["normal"] == {"A": False, "B": v.gates["normal"]["B"]}


def test_identical_methods_no_difference():
    v = compare_methods_interrater(identical_methods(), "A", "B")
    assert v.kind is VerdictKind.NO_DIFFERENCE


def test_rater_influence_aborts():
    pairs = [(x, x + 20.0 + i) for i, x in enumerate(SIZES)]
    ds = build({"A": pairs, "B": [(x, x + (-1) ** i * 3.0) for i, x in enumerate(SIZES)]})
    v = compare_methods_interrater(ds, "A", "B")
    assert v.kind is VerdictKind.INCONCLUSIVE
    assert "'A'" in v.diagnostics[-1] and "r1" in v.diagnostics[-1]
    # both methods are checked so the verdict does not depend on argument order
    assert [o.test_id for o in v.evidence] == [TestId.RATER_INFLUENCE] * 2
    assert v.evidence[0].reject and not v.evidence[1].reject


def test_self_comparison_rejected():
    with pytest.raises(ValueError):
        compare_methods_interrater(identical_methods(), "A", "A")


def _random_dataset(seed, n=20, sigma_b=8.0):
    rng = random.Random(seed)
    cells = {"A": [], "B": []}
    for _ in range(n):
        x = rng.uniform(400, 1000)
        cells["A"].append((x + rng.gauss(0, 8), x + rng.gauss(0, 8)))
        cells["B"].append((x + rng.gauss(0, sigma_b), x + rng.gauss(0, sigma_b)))
    return build(cells)


@pytest.mark.parametrize("seed", range(25))
def test_verdict_symmetry(seed):
    ds = _random_dataset(seed, n=15 + seed, sigma_b=8.0 + seed)
    ab = compare_methods_interrater(ds, "A", "B")
    ba = compare_methods_interrater(ds, "B", "A")
    assert ab.kind is ba.kind and ab.method == ba.method and ab.branch_taken == ba.branch_taken
    pa = sorted(o.p_value for o in ab.evidence)
    pb = sorted(o.p_value for o in ba.evidence)
    assert pa == pb


@pytest.mark.parametrize("seed", range(10))
def test_scale_invariance(seed):
    ds = _random_dataset(seed, sigma_b=20.0)
    base = compare_methods_interrater(ds, "A", "B")
    for factor in (2.0, 0.125):
        # power-of-two scaling is exact, so every CA2 value is bit-identical
        scaled = compare_methods_interrater(ds.scaled("A", factor), "A", "B").to_dict()
        # rater-influence details are in size units; everything after is CA2-based
        assert scaled["evidence"][2:] == base.to_dict()["evidence"][2:]
        assert (scaled["kind"], scaled["method"], scaled["branch_taken"]) == (base.kind.value, base.method, base.branch_taken)
    seven = compare_methods_interrater(ds.scaled("B", 7.0), "A", "B")
    assert seven.kind is base.kind and seven.method == base.method
    for a, b in zip(consistency_sample(ds.scaled("B", 7.0), "B").values, consistency_sample(ds, "B").values):
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("seed", range(40))
def test_audit_trail(seed):
    ds = _random_dataset(seed, n=8 + seed, sigma_b=4.0 + seed)
    v = compare_methods_interrater(ds, "A", "B")
    ids = [o.test_id for o in v.evidence]
    # every index in the gates points at a distinct evidence entry
    idx = []
    for key in ("rater_influence", "ks"):
        idx += list(v.gates.get(key, {}).values())
    if v.gates.get("correlation") is not None:
        idx.append(v.gates["correlation"])
    assert len(idx) == len(set(idx))
    assert all(0 <= i < len(v.evidence) for i in idx)
    assert ids[:2] == [TestId.RATER_INFLUENCE, TestId.RATER_INFLUENCE]
    if v.kind is VerdictKind.INCONCLUSIVE and v.branch_taken is None:
        return
    assert ids[2:4] == [TestId.KS_NORMALITY, TestId.KS_NORMALITY]
    assert ids[4] is TestId.CORRELATION
    tail = ids[5:]
    if len(tail) == 2:
        # the variance test only follows an accepted means test
        assert not v.evidence[5].reject
        assert v.decided_by == "variances"
    else:
        assert len(tail) == 1
    if v.kind is VerdictKind.MORE_CONSISTENT:
        assert v.evidence[-1].reject
    if v.kind is VerdictKind.NO_DIFFERENCE:
        assert not v.evidence[-1].reject


def test_related_with_different_projects_is_inconclusive():
    rng = random.Random(1)
    a, b = [], []
    for i, x in enumerate(SIZES * 2):
        e = rng.uniform(0.01, 0.2)
        a.append((x, x * (1 + e * (-1) ** i)))
        b.append((x, x * (1 + (e + rng.uniform(0, 0.01)) * (-1) ** i)))
    ds = build({"A": a, "B": b})
    # drop one project from B
    ds = ds.from_records([r for r in ds.records if not (r.method_id == "B" and r.project_id == "p24")])
    v = compare_methods_interrater(ds, "A", "B")
    assert v.gates["related"]
    assert v.kind is VerdictKind.INCONCLUSIVE
    assert "different project sets" in v.diagnostics[-1]


def test_config_correlation_override():
    v = compare_methods_interrater(_random_dataset(3), "A", "B", AnalysisConfig(correlation="kendall"))
    assert v.gates["correlation_kind"] == "Kendall"


def test_verdict_round_trip():
    v = compare_methods_interrater(_random_dataset(4), "A", "B")
    assert ConsistencyVerdict.from_dict(v.to_dict()) == v
