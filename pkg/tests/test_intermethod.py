import random

import numpy as np
import pytest
import scipy.stats as ss

from builders import SIZES, build
from ratercheck.config import AnalysisConfig
from ratercheck.errors import ProjectSetMismatch
from ratercheck.intermethod import (
    CalibrationFit,
    InterMethodResult,
    analyze_intermethod,
    dab_series,
    fit_calibration_regression,
    intermethod_equality_test,
)
from ratercheck.stattests import TestId


def _noisy_pairs(seed, n=12, bias=0.0):
    rng = random.Random(seed)
    out = []
    for x in (SIZES * 3)[:n]:
        out.append((x + rng.gauss(bias, 6), x + rng.gauss(bias, 6)))
    return out


def test_dab_identical_methods():
    pairs = _noisy_pairs(1)
    s = dab_series(build({"A": pairs, "B": pairs}), "A", "B")
    assert s.dab == (0.0,) * len(pairs)
    o = intermethod_equality_test(s)
    assert not o.reject and o.p_value == 1.0


def test_dab_constant_offset():
    pairs = _noisy_pairs(2)
    s = dab_series(build({"A": pairs, "B": [(a - 5, b - 5) for a, b in pairs]}), "A", "B")
    assert all(v == pytest.approx(5.0, abs=1e-12) for v in s.dab)


def test_constant_offset_rejects():
    pairs = [(float(2 ** k), float(2 ** k + 8)) for k in range(4, 10)]
    s = dab_series(build({"A": pairs, "B": [(a - 4, b - 4) for a, b in pairs]}), "A", "B")
    assert s.dab == (4.0,) * 6
    o = intermethod_equality_test(s)
    assert o.reject and o.p_value == 0.0 and o.degenerate == "constant_offset"


def test_dab_hand_values():
    a = [(100.0, 110.0), (200.0, 190.0), (50.0, 52.0)]
    b = [(90.0, 100.0), (205.0, 200.0), (49.0, 47.0)]
    s = dab_series(build({"A": a, "B": b}), "A", "B")
    assert s.d1ab == (10.0, -5.0, 1.0)
    assert s.d2ab == (10.0, -10.0, 5.0)
    assert s.dab == (10.0, -7.5, 3.0)


def test_dab_antisymmetry():
    ds = build({"A": _noisy_pairs(3), "B": _noisy_pairs(4, bias=3.0)})
    ab = dab_series(ds, "A", "B")
    ba = dab_series(ds, "B", "A")
    assert ab.dab == tuple(-v for v in ba.dab)
    assert intermethod_equality_test(ab).p_value == intermethod_equality_test(ba).p_value


def test_project_mismatch():
    ds = build({"A": _noisy_pairs(3), "B": _noisy_pairs(4)[:-1]})
    with pytest.raises(ProjectSetMismatch) as exc:
        dab_series(ds, "A", "B")
    assert exc.value.only_a == ["p12"]


def test_t_statistic_matches_scipy():
    ds = build({"A": _noisy_pairs(5, n=20), "B": _noisy_pairs(6, n=20, bias=2.0)})
    s = dab_series(ds, "A", "B")
    o = intermethod_equality_test(s)
    ref = ss.ttest_1samp(s.dab, 0.0)
    assert o.test_id is TestId.INTER_METHOD_T
    assert o.statistic == pytest.approx(ref.statistic, rel=1e-10)
    assert o.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_non_normal_falls_back_to_wilcoxon():
    a = [(x, x) for x in SIZES * 2]
    b = [(x, x) for x in SIZES * 2]
    # heavy outliers make dab clearly non-normal
    b = [(p - (100.0 if i % 8 == 0 else 0.5), q - (100.0 if i % 8 == 0 else 0.5)) for i, (p, q) in enumerate(b)]
    s = dab_series(build({"A": a, "B": b}), "A", "B")
    o = intermethod_equality_test(s)
    assert o.test_id in (TestId.WILCOXON_SMALL, TestId.WILCOXON_LARGE)
    assert any("Wilcoxon" in w for w in o.warnings)


def test_regression_exact_line():
    a = [(x, x + 4.0) for x in SIZES]
    b = [(1.1 * p + 3.0, 1.1 * q + 3.0) for p, q in a]
    fit, why = fit_calibration_regression(build({"A": a, "B": b}), "A", "B")
    assert why is None
    assert fit.slope == pytest.approx(1.1, rel=1e-12)
    assert fit.intercept == pytest.approx(3.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.residual_sd == pytest.approx(0.0, abs=1e-9)
    for p, q in a:
        m = (p + q) / 2
        assert abs(fit.predict(m) - (1.1 * m + 3.0)) < 1e-9
    assert "≈" in fit.render() and "r² =" in fit.render()


def test_regression_weak_correlation():
    rng = np.random.default_rng(0)
    x = rng.uniform(100, 1000, 40)
    # target |r| of about 0.5
    y = x + rng.normal(0, np.std(x) * 1.7, 40) + 3000
    a = [(float(v), float(v)) for v in x]
    b = [(float(v), float(v)) for v in y]
    fit, why = fit_calibration_regression(build({"A": a, "B": b}), "A", "B")
    assert fit is None and "too weak" in why
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.8


def test_regression_matches_normal_equations():
    rng = np.random.default_rng(1)
    x = rng.uniform(100, 1000, 30)
    y = 0.9 * x + 12 + rng.normal(0, 15, 30)
    a = [(float(v), float(v)) for v in x]
    b = [(float(v), float(v)) for v in y]
    fit, _ = fit_calibration_regression(build({"A": a, "B": b}), "A", "B")
    X = np.column_stack([x, np.ones_like(x)])
    slope, intercept = np.linalg.solve(X.T @ X, X.T @ y)
    assert fit.slope == pytest.approx(slope, abs=1e-10)
    assert fit.intercept == pytest.approx(intercept, abs=1e-8)
    resid = y - (slope * x + intercept)
    assert fit.residual_sd == pytest.approx(np.sqrt(resid @ resid / 28), rel=1e-9)
    assert fit.r == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)
    assert CalibrationFit.from_dict(fit.to_dict()) == fit


def test_regression_zero_variance_predictor():
    a = [(100.0, 100.0)] * 5
    b = [(float(i + 90), float(i + 90)) for i in range(5)]
    fit, why = fit_calibration_regression(build({"A": a, "B": b}), "A", "B")
    assert fit is None and "zero variance" in why


def test_analyze_intermethod_fits_on_rejection():
    a = _noisy_pairs(7, n=24)
    b = [(1.2 * p + 10.0, 1.2 * q + 10.0) for p, q in a]
    r = analyze_intermethod(build({"A": a, "B": b}), "A", "B", AnalysisConfig())
    assert r.outcome.reject and r.calibration is not None
    assert r.calibration.slope == pytest.approx(1.2, rel=1e-9)
    assert InterMethodResult.from_dict(r.to_dict()) == r


def test_analyze_intermethod_mismatch_is_diagnostic():
    ds = build({"A": _noisy_pairs(3), "B": _noisy_pairs(4)[:-1]})
    r = analyze_intermethod(ds, "A", "B")
    assert r.outcome is None and "project sets differ" in r.diagnostics[0]
