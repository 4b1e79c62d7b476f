"""Synthetic measurement data and Monte Carlo calibration.

Measurements follow ``M_ji = X_i + e_ji`` with ``e_ji ~ N(tau_j, sigma^2)``:
``X_i`` is the unknown true size of project i, ``tau_j`` rater j's bias.

Every replication draws from its own Philox substream keyed by
``(seed, replication index)``, so serial and parallel runs give identical
numbers.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import stattests as st
from .config import AnalysisConfig
from .consistency import VerdictKind, compare_methods_interrater
from .dataset import MeasurementDataset, MeasurementRecord
from .errors import ImpossiblePositivity, SpecError
from .stattests import SampleSummary, TestId

PIPELINE = "Pipeline"


@dataclass(frozen=True)
class SizeDistribution:
    """Distribution of true project sizes X_i.

    ``uniform`` uses ``low``/``high``; ``lognormal`` uses ``mu``/``sigma`` on
    the log scale.
    """

    kind: str = "uniform"
    low: float = 100.0
    high: float = 1000.0
    mu: float = 6.0
    sigma: float = 0.5

    def __post_init__(self):
        if self.kind == "uniform":
            if not 0.0 < self.low < self.high:
                raise SpecError(f"uniform sizes need 0 < low < high, got {self.low}, {self.high}")
        elif self.kind == "lognormal":
            if not self.sigma > 0.0:
                raise SpecError("lognormal sizes need sigma > 0")
        else:
            raise SpecError(f"unknown size distribution {self.kind!r}")

    @property
    def mean(self) -> float:
        if self.kind == "uniform":
            return (self.low + self.high) / 2.0
        return math.exp(self.mu + self.sigma**2 / 2.0)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.low, self.high, n)
        return rng.lognormal(self.mu, self.sigma, n)


@dataclass(frozen=True)
class MethodModel:
    tau: tuple = (0.0, 0.0)
    sigma: float = 27.5

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise SpecError(f"noise sigma must be > 0, got {self.sigma}")
        if len(self.tau) < 1:
            raise SpecError("a method needs at least one rater bias")
        object.__setattr__(self, "tau", tuple(float(t) for t in self.tau))


@dataclass(frozen=True)
class SimulationSpec:
    n_projects: int = 30
    sizes: SizeDistribution = field(default_factory=SizeDistribution)
    methods: dict = field(default_factory=lambda: {"A": MethodModel(), "B": MethodModel()})
    seed: int = 0
    max_resamples: int = 1000

    def __post_init__(self):
        if self.n_projects < 1:
            raise SpecError("n_projects must be >= 1")
        if not self.methods:
            raise SpecError("at least one method is required")
        if not 0 <= self.seed < 2**64:
            raise SpecError("seed must be a 64-bit unsigned integer")

    @classmethod
    def default(cls, n_projects=30, seed=0, noise_fraction=0.05) -> "SimulationSpec":
        sizes = SizeDistribution()
        sigma = noise_fraction * sizes.mean
        return cls(n_projects, sizes, {"A": MethodModel((0.0, 0.0), sigma), "B": MethodModel((0.0, 0.0), sigma)}, seed)

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationSpec":
        try:
            sizes = SizeDistribution(**d.get("sizes", {}))
            methods = {
                name: MethodModel(tuple(m.get("tau", (0.0, 0.0))), float(m.get("sigma", 0.05 * sizes.mean)))
                for name, m in d.get("methods", {"A": {}, "B": {}}).items()
            }
            return cls(
                int(d.get("n_projects", 30)),
                sizes,
                methods,
                int(d.get("seed", 0)),
                int(d.get("max_resamples", 1000)),
            )
        except (TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"invalid simulation spec: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "SimulationSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"simulation spec is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise SpecError("simulation spec must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self):
        return {
            "n_projects": self.n_projects,
            "sizes": asdict(self.sizes),
            "methods": {k: {"tau": list(m.tau), "sigma": m.sigma} for k, m in self.methods.items()},
            "seed": self.seed,
            "max_resamples": self.max_resamples,
        }


def make_rng(seed: int, stream: Optional[int] = None) -> np.random.Generator:
    """Philox generator for ``seed``, or for its replication substream ``stream``."""
    if stream is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def draw_measurements(spec: SimulationSpec, rng: np.random.Generator):
    """Draw true sizes and every rater's measurements.

    Returns ``(sizes, {method: [values per rater]}, resamples)``.  Cells that
    come out non-positive are redrawn until positive.
    """
    n = spec.n_projects
    x = spec.sizes.draw(rng, n)
    out = {}
    resamples = 0
    for name, model in spec.methods.items():
        per_rater = []
        for tau in model.tau:
            values = x + rng.normal(tau, model.sigma, n)
            for i in np.flatnonzero(values <= 0.0):
                tries = 0
                while values[i] <= 0.0:
                    tries += 1
                    if tries > spec.max_resamples:
                        raise ImpossiblePositivity(
                            f"method {name!r}: no positive draw for project {i} after "
                            f"{spec.max_resamples} resamples (sigma too large for the sizes)"
                        )
                    values[i] = x[i] + rng.normal(tau, model.sigma)
                resamples += tries
            per_rater.append(values)
        out[name] = per_rater
    return x, out, resamples


def generate_dataset_with_stats(spec: SimulationSpec, rng: Optional[np.random.Generator] = None):
    """Like :func:`generate_dataset`, also returning the number of resampled cells."""
    rng = rng if rng is not None else make_rng(spec.seed)
    _, values, resamples = draw_measurements(spec, rng)
    width = len(str(spec.n_projects))
    records = []
    for i in range(spec.n_projects):
        pid = f"p{i + 1:0{width}d}"
        for name, per_rater in values.items():
            for j, v in enumerate(per_rater):
                records.append(MeasurementRecord(pid, name, f"r{j + 1}", float(v[i])))
    return MeasurementDataset.from_records(records), resamples


def generate_dataset(spec: SimulationSpec, rng: Optional[np.random.Generator] = None) -> MeasurementDataset:
    ds, resamples = generate_dataset_with_stats(spec, rng)
    cells = spec.n_projects * sum(len(m.tau) for m in spec.methods.values())
    if resamples > 0.01 * cells:
        warnings.warn(
            f"{resamples} of {cells} cells resampled for positivity; "
            "noise is no longer exactly normal",
            stacklevel=2,
        )
    return ds


# --- per-test null scenarios ----------------------------------------------

DEFAULT_SIZES = {
    TestId.RATER_INFLUENCE: 20,
    TestId.KS_NORMALITY: 30,
    TestId.CORRELATION: 30,
    TestId.MEANS_INDEP_Z: 40,
    TestId.MEANS_INDEP_T: 12,
    TestId.VAR_INDEP_F: 20,
    TestId.MEANS_RELATED_Z: 40,
    TestId.VAR_RELATED_CHI2: 40,
    TestId.MANN_WHITNEY_SMALL: 8,
    TestId.MANN_WHITNEY_LARGE: 20,
    TestId.WILCOXON_SMALL: 15,
    TestId.WILCOXON_LARGE: 40,
    TestId.INTER_METHOD_T: 20,
}

PAIR_CORRELATION = 0.5


def _bivariate(rng, n, rho, sd_y=1.0, shift=0.0):
    x = rng.standard_normal(n)
    z = rng.standard_normal(n)
    y = shift + sd_y * (rho * x + math.sqrt(1.0 - rho * rho) * z)
    return x.tolist(), y.tolist()


def _scenario(test_id: TestId, rng, n: int, effect: float, alpha: float, spec: SimulationSpec):
    """One replication of ``test_id`` at ``effect`` (0 is the null).

    Location effects are mean shifts in sd units; scale effects multiply the
    second sample's sd by ``1 + effect``; for the rater-influence test the
    second rater's bias is ``effect * sigma``; for the correlation test the
    effect is the population correlation.
    """
    if test_id is TestId.RATER_INFLUENCE:
        model = next(iter(spec.methods.values()))
        x = spec.sizes.draw(rng, n)
        first = x + rng.normal(0.0, model.sigma, n)
        second = x + rng.normal(effect * model.sigma, model.sigma, n)
        return st.rater_influence_test(first.tolist(), second.tolist(), alpha)
    if test_id is TestId.KS_NORMALITY:
        return st.ks_normality(rng.standard_normal(n).tolist(), alpha)
    if test_id is TestId.CORRELATION:
        x, y = _bivariate(rng, n, effect)
        return st.correlation(x, y, st.CorrelationKind.PEARSON, alpha)
    if test_id in (TestId.MEANS_INDEP_Z, TestId.MEANS_INDEP_T):
        a = SampleSummary.of(rng.standard_normal(n).tolist())
        b = SampleSummary.of((rng.standard_normal(n) + effect).tolist())
        fn = st.means_indep_large if test_id is TestId.MEANS_INDEP_Z else st.means_indep_small
        return fn(a, b, alpha)
    if test_id is TestId.VAR_INDEP_F:
        a = SampleSummary.of(rng.standard_normal(n).tolist())
        b = SampleSummary.of((rng.standard_normal(n) * (1.0 + effect)).tolist())
        return st.var_indep_f(a, b, alpha)
    if test_id is TestId.MEANS_RELATED_Z:
        x, y = _bivariate(rng, n, PAIR_CORRELATION, shift=effect)
        return st.means_related_z(x, y, alpha)
    if test_id is TestId.VAR_RELATED_CHI2:
        x, y = _bivariate(rng, n, PAIR_CORRELATION, sd_y=1.0 + effect)
        return st.var_related_chi2(x, y, alpha)
    if test_id in (TestId.MANN_WHITNEY_SMALL, TestId.MANN_WHITNEY_LARGE):
        a = rng.standard_normal(n).tolist()
        b = (rng.standard_normal(n) + effect).tolist()
        return st.mann_whitney(a, b, alpha)
    if test_id in (TestId.WILCOXON_SMALL, TestId.WILCOXON_LARGE):
        x, y = _bivariate(rng, n, PAIR_CORRELATION, shift=effect)
        return st.wilcoxon_signed_rank(x, y, alpha)
    if test_id is TestId.INTER_METHOD_T:
        dab = (rng.standard_normal(n) + effect).tolist()
        return st.one_sample_t(dab, alpha, TestId.INTER_METHOD_T)
    raise SpecError(f"no calibration scenario for {test_id!r}")


def _pipeline_rep(spec: SimulationSpec, rng, alpha: float) -> bool:
    ds = generate_dataset_with_stats(spec, rng)[0]
    a, b = list(spec.methods)[:2]
    verdict = compare_methods_interrater(ds, a, b, AnalysisConfig(alpha=alpha))
    return verdict.kind is VerdictKind.MORE_CONSISTENT


@dataclass(frozen=True)
class CalibrationResult:
    test_id: str
    replications: int
    rejections: int
    rejection_rate: float
    alpha: float
    standard_error: float
    n: Optional[int] = None
    effect: float = 0.0
    seed: int = 0

    def to_dict(self):
        return asdict(self)


def _run_chunk(args):
    test_id, start, stop, n, effect, alpha, spec = args
    hits = 0
    for rep in range(start, stop):
        rng = make_rng(spec.seed, rep)
        if test_id == PIPELINE:
            hits += _pipeline_rep(spec, rng, alpha)
        else:
            hits += _scenario(test_id, rng, n, effect, alpha, spec).reject
    return hits


def _count(test_id, replications, n, effect, alpha, spec, jobs) -> int:
    if jobs <= 1 or replications < 2 * jobs:
        return _run_chunk((test_id, 0, replications, n, effect, alpha, spec))
    bounds = np.linspace(0, replications, jobs + 1).astype(int)
    chunks = [(test_id, int(lo), int(hi), n, effect, alpha, spec) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return sum(pool.map(_run_chunk, chunks))


def _resolve(test_id):
    if test_id == PIPELINE:
        return PIPELINE
    try:
        return TestId(test_id)
    except ValueError:
        raise SpecError(f"unknown test id {test_id!r}") from None


def calibrate(
    test_id,
    replications: int = 5000,
    alpha: float = 0.05,
    *,
    effect: float = 0.0,
    n: Optional[int] = None,
    spec: Optional[SimulationSpec] = None,
    jobs: int = 1,
) -> CalibrationResult:
    """Empirical rejection rate of ``test_id`` at ``effect`` over ``replications`` draws.

    ``test_id`` may also be ``"Pipeline"``: the rate at which the full
    inter-rater comparison of the first two methods in ``spec`` reports a
    more consistent method.
    """
    test_id = _resolve(test_id)
    if replications < 1:
        raise SpecError("replications must be >= 1")
    st.check_alpha(alpha)
    spec = spec or SimulationSpec.default()
    if test_id == PIPELINE:
        if len(spec.methods) < 2:
            raise SpecError("pipeline calibration needs two methods in the simulation spec")
        n = spec.n_projects
    elif n is None:
        n = DEFAULT_SIZES[test_id]
    hits = _count(test_id, replications, n, effect, alpha, spec, jobs)
    rate = hits / replications
    name = test_id if test_id == PIPELINE else test_id.value
    return CalibrationResult(
        name, replications, hits, rate, alpha, math.sqrt(rate * (1.0 - rate) / replications), n, effect, spec.seed
    )


def calibrate_type1(test_id, null_spec: Optional[SimulationSpec] = None, replications: int = 5000,
                    alpha: float = 0.05, *, n: Optional[int] = None, jobs: int = 1) -> CalibrationResult:
    """Rejection rate under the null hypothesis of ``test_id``."""
    return calibrate(test_id, replications, alpha, effect=0.0, n=n, spec=null_spec, jobs=jobs)


def power_curve(test_id, effect_grid: Sequence[float], replications: int = 1000, alpha: float = 0.05,
                *, n: Optional[int] = None, spec: Optional[SimulationSpec] = None, jobs: int = 1):
    """Rejection rate at each effect size; returns a list of CalibrationResult."""
    grid = [float(e) for e in effect_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise SpecError("effect grid must be nondecreasing")
    return [calibrate(test_id, replications, alpha, effect=e, n=n, spec=spec, jobs=jobs) for e in grid]
