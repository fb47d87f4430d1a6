"""Time the compiled and numpy kernels on random distributions.

    python3 benchmarks/bench_kernel.py --shapes 2x2x2,4x4x4,8x8x8,16x16x16

Prints one row per shape with the best per-call time of each backend, the
speedup, and the largest atom difference between the two backends.
"""
import argparse
import timeit

import numpy as np

from dopid import kernel
from dopid.atoms import result_from_terms


def parse_shape(text):
    return tuple(int(v) for v in text.lower().split("x"))


def best_time(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shapes", default="2x2x2,3x3x3,4x4x4,8x8x8,16x16x16")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=0, help="calls per repeat (0 picks automatically)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    backends = sorted(kernel.BACKENDS)
    print(f"backends available: {', '.join(backends)} (default {kernel.BACKEND})")
    header = f"{'shape':>12}" + "".join(f"{name + ' [us]':>16}" for name in backends)
    header += f"{'speedup':>10}{'max |d atom|':>16}"
    print(header)
    for text in args.shapes.split(","):
        shape = parse_shape(text)
        p = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
        times, atoms = {}, {}
        for name in backends:
            fn = lambda: kernel.compute_terms(p, 1.0, name)  # noqa: E731
            number = args.number or max(1, int(0.2 / max(best_time(fn, 1, 1), 1e-7)))
            times[name] = best_time(fn, args.repeat, number)
            atoms[name] = np.array(result_from_terms(fn(), "e").atoms)
        row = f"{text:>12}" + "".join(f"{times[n] * 1e6:>16.1f}" for n in backends)
        if "cython" in times:
            diff = float(np.max(np.abs(atoms["cython"] - atoms["python"])))
            row += f"{times['python'] / times['cython']:>10.1f}{diff:>16.3g}"
        else:
            row += f"{'n/a':>10}{'n/a':>16}"
        print(row)


if __name__ == "__main__":
    main()
