"""Inter-rater and inter-method reliability analysis of size measurement methods."""

from .config import AnalysisConfig
from .consistency import ConsistencyVerdict, VerdictKind, ca2, compare_methods_interrater, consistency_sample
from .dataset import MeasurementDataset, MeasurementRecord, extract_pair, parse_csv, read_csv
from .intermethod import analyze_intermethod, dab_series, fit_calibration_regression, intermethod_equality_test
from .kernels import BACKEND
from .report import AnalysisReport, analyze
from .simulate import SimulationSpec, calibrate_type1, generate_dataset, power_curve
from .stattests import TestId, TestOutcome

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AnalysisReport",
    "BACKEND",
    "ConsistencyVerdict",
    "MeasurementDataset",
    "MeasurementRecord",
    "SimulationSpec",
    "TestId",
    "TestOutcome",
    "VerdictKind",
    "analyze",
    "analyze_intermethod",
    "ca2",
    "calibrate_type1",
    "compare_methods_interrater",
    "consistency_sample",
    "dab_series",
    "extract_pair",
    "fit_calibration_regression",
    "generate_dataset",
    "intermethod_equality_test",
    "parse_csv",
    "power_curve",
    "read_csv",
]
