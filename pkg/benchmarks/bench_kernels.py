"""Compare the compiled and pure-Python kernels on the pricing hot paths.

    python benchmarks/bench_kernels.py [--repeat N]

Each row reports the best-of-N wall time per call for both backends and the
speed-up. Results from the two backends are checked for agreement first.
"""
import argparse
import timeit

import numpy as np

from conic_mfbm import JumpParams, ModelParams, build_law
from conic_mfbm import _pykernels as py

try:
    from conic_mfbm import _ckernels as cy
except ImportError:  # pragma: no cover
    cy = None

MODEL = ModelParams(100.0, 0.05, 0.2, 0.1, 0.8, 1.0)
JUMPS = JumpParams(1.0, -0.05, 0.02)


def cases(law):
    args = (law.weights, law.log_means, law.log_sds, law.log_s0)
    xs = np.linspace(20.0, 300.0, 10_000)
    return {
        "distorted_integral put": lambda k: k.distorted_integral(
            False, -0.25, 0.0, 100.0, *args, 1e-8, 500)[0],
        "distorted_integral call": lambda k: k.distorted_integral(
            True, -0.25, 100.0, 600.0, *args, 1e-8, 500)[0],
        "mix_cdf scalar x1000": lambda k: sum(k.mix_cdf(float(x), *args) for x in xs[:1000]),
        "mix_cdf_many 1e4": lambda k: k.mix_cdf_many(xs, *args),
        "wang scalar x1000": lambda k: sum(k.wang(float(u), 0.3) for u in np.linspace(0, 1, 1000)),
        "lstat_weights 1e6": lambda k: k.lstat_weights(1_000_000, 0.25),
    }


def best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if cy is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    law = build_law(MODEL, JUMPS)
    print(f"{'kernel':<26}{'python':>12}{'compiled':>12}{'speed-up':>10}")
    for name, run in cases(law).items():
        a, b = np.asarray(run(py)), np.asarray(run(cy))
        if not np.allclose(a, b, rtol=1e-9, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        tp, tc = best(lambda: run(py), args.repeat), best(lambda: run(cy), args.repeat)
        print(f"{name:<26}{tp * 1e3:>10.3f}ms{tc * 1e3:>10.3f}ms{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
