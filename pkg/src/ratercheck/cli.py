"""Command-line interface: ``ratercheck analyze | simulate | dist``.

Exit codes: 0 when the command completed (verdicts are findings, not
failures), 1 only with ``--fail-on-inconsistent`` and a MoreConsistent
verdict, 2 on input or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import distributions as dist
from .config import AnalysisConfig
from .dataset import read_csv
from .errors import RatercheckError
from .report import analyze
from .simulate import PIPELINE, SimulationSpec, calibrate, generate_dataset, power_curve

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_INPUT = 2


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- analyze --------------------------------------------------------------


def cmd_analyze(args) -> int:
    config = AnalysisConfig.from_json_file(args.config) if args.config else AnalysisConfig()
    config = config.with_overrides(
        alpha=args.alpha,
        format=args.format,
        correlation=args.correlation,
        strong_r=args.strong_r,
        lilliefors=True if args.lilliefors else None,
    )
    ds = read_csv(args.csv)
    report = analyze(ds, config)
    text = report.to_json() if config.format == "json" else report.render_text()
    sys.stdout.write(text)
    if args.fail_on_inconsistent and report.any_more_consistent:
        return EXIT_INCONSISTENT
    return EXIT_OK


# --- simulate -------------------------------------------------------------


def _load_spec(args) -> SimulationSpec:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                spec = SimulationSpec.from_json(fh.read())
        except OSError as exc:
            raise RatercheckError(f"cannot read spec {args.config}: {exc}") from None
    else:
        spec = SimulationSpec.default()
    d = spec.to_dict()
    if args.seed is not None:
        d["seed"] = args.seed
    if args.n_projects is not None:
        d["n_projects"] = args.n_projects
    return SimulationSpec.from_dict(d)


def _parse_grid(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise RatercheckError(f"--power expects comma-separated numbers, got {text!r}") from None


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    if args.emit_dataset:
        ds = generate_dataset(spec)
        with open(args.emit_dataset, "w", encoding="utf-8", newline="") as fh:
            fh.write(ds.to_csv())
    if args.calibrate:
        test_id = args.calibrate
        if args.power:
            rows = power_curve(test_id, _parse_grid(args.power), args.replications, args.alpha,
                               n=args.n, spec=spec, jobs=args.jobs)
            sys.stdout.write(_dumps([r.to_dict() for r in rows]))
        else:
            r = calibrate(test_id, args.replications, args.alpha, n=args.n, spec=spec, jobs=args.jobs)
            sys.stdout.write(_dumps(r.to_dict()))
    elif args.power:
        raise RatercheckError("--power needs --calibrate TEST_ID")
    elif not args.emit_dataset:
        sys.stdout.write(generate_dataset(spec).to_csv())
    return EXIT_OK


# --- dist -----------------------------------------------------------------

_DIST = {
    "normal-cdf": (("x",), dist.std_normal_cdf),
    "normal-quantile": (("p",), dist.std_normal_quantile),
    "t-cdf": (("x", "df"), dist.student_t_cdf),
    "t-quantile": (("p", "df"), dist.student_t_quantile),
    "f-cdf": (("x", "d1", "d2"), dist.f_cdf),
    "f-quantile": (("p", "d1", "d2"), dist.f_quantile),
    "chi2-cdf": (("x", "df"), dist.chi_square_cdf),
    "chi2-quantile": (("p", "df"), dist.chi_square_quantile),
    "u-pmf": (("na", "nb", "k"), lambda na, nb, k: dist.exact_u_pmf(na, nb).pmf(k)),
    "u-critical": (("na", "nb", "alpha"), dist.u_critical),
    "w-pmf": (("n", "k"), lambda n, k: dist.exact_t_pmf(n).pmf(k)),
    "w-critical": (("n", "alpha"), dist.t_critical),
}
_INT_PARAMS = {"na", "nb", "n", "k"}


def cmd_dist(args) -> int:
    names, fn = _DIST[args.query]
    values = []
    for name in names:
        v = getattr(args, name)
        if v is None:
            raise RatercheckError(f"dist {args.query} needs --{name}")
        values.append(v)
    result = fn(*values)
    if result is None:
        print("none")
    elif isinstance(result, int):
        print(result)
    else:
        print(format(result, ".12g"))
    return EXIT_OK


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratercheck", description="Inter-rater and inter-method reliability of size measurement methods.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a measurement CSV")
    p.add_argument("csv", help="CSV with columns project,method,rater,value")
    p.add_argument("--config", help="JSON analysis config")
    p.add_argument("--alpha", type=float)
    p.add_argument("--format", choices=("text", "json"))
    p.add_argument("--correlation", choices=("pearson", "spearman", "kendall"), help="override the correlation gate")
    p.add_argument("--strong-r", type=float, dest="strong_r", help="minimum |r| for a calibration fit")
    p.add_argument("--lilliefors", action="store_true", help="Lilliefors p-values for the normality gate")
    p.add_argument("--fail-on-inconsistent", action="store_true",
                   help="exit 1 when some method is found more consistent than another")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="synthetic data and Monte Carlo calibration")
    p.add_argument("--config", help="JSON simulation spec")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-projects", type=int, dest="n_projects")
    p.add_argument("--emit-dataset", metavar="PATH", help="write a generated dataset CSV")
    p.add_argument("--calibrate", metavar="TEST_ID", help=f"test id to calibrate, or {PIPELINE}")
    p.add_argument("--power", metavar="GRID", help="comma-separated effect sizes for a power curve")
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n", type=int, help="sample size per replication (default depends on the test)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dist", help="distribution functions and exact rank tables")
    p.add_argument("query", choices=sorted(_DIST))
    for name in ("x", "p", "df", "d1", "d2", "alpha"):
        p.add_argument(f"--{name}", type=float)
    for name in sorted(_INT_PARAMS):
        p.add_argument(f"--{name}", type=int)
    p.set_defaults(func=cmd_dist)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RatercheckError, ValueError, OSError) as exc:
        print(f"ratercheck: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
