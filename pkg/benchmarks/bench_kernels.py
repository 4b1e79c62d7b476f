"""Time the compiled and pure-Python kernel backends side by side.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

from ratercheck.kernels import available_backends


def workloads(rng):
    sample = [rng.gauss(500.0, 80.0) for _ in range(200)]
    tied = [float(rng.randint(0, 50)) for _ in range(500)]
    return {
        "betainc": lambda k: k.betainc(7.5, 12.0, 0.37, 0.63),
        "gammainc_p": lambda k: k.gammainc_p(15.0, 11.2),
        "kolmogorov_sf": lambda k: k.kolmogorov_sf(0.83),
        "ks_normal_statistic(200)": lambda k: k.ks_normal_statistic(sample, 500.0, 80.0),
        "midranks(500)": lambda k: k.midranks(tied),
        "u_counts(20, 20)": lambda k: k.u_counts(20, 20),
        "signed_rank_counts(40)": lambda k: k.signed_rank_counts(40),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=200)
    args = parser.parse_args()

    backends = available_backends()
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n + ' (us)':>16s}" for n in names) + (f"{'speedup':>10s}" if len(names) > 1 else ""))
    for label, fn in workloads(random.Random(1)).items():
        times = {}
        for name in names:
            mod = backends[name]
            best = min(timeit.repeat(lambda: fn(mod), number=args.number, repeat=args.repeat))
            times[name] = best / args.number * 1e6
        row = f"{label:28s}" + "".join(f"{times[n]:16.2f}" for n in names)
        if "cython" in times and "python" in times:
            row += f"{times['python'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
