"""Compare the Cython kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernel.py [--repeat N] [--instance Z4] [--window 6]

Micro benchmarks call both implementations directly; the end-to-end run checks
a corpus instance in a subprocess with and without IOALG_PURE_PYTHON=1.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from ioalg import _pykernel

try:
    from ioalg import _ckernel
except ImportError:  # pragma: no cover - depends on the build
    _ckernel = None


def conv_case(rng, terms, nvars):
    ea = [rng.randint(-20, 20) for _ in range(terms * nvars)]
    eb = [rng.randint(-20, 20) for _ in range(terms * nvars)]
    return ea, eb, nvars, [-10] * nvars, [10] * nvars


def mulmod_case(rng, d):
    a = [rng.randint(-10**6, 10**6) for _ in range(d)]
    b = [rng.randint(-10**6, 10**6) for _ in range(d)]
    red = [[rng.randint(-1, 1) for _ in range(d)] for _ in range(d - 1)]
    return a, b, red


def best(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


END_TO_END = ("import time; from ioalg.examples import corpus; from ioalg.cli import run_suites; "
              "inst = corpus()[{name!r}]; t = time.perf_counter(); "
              "run_suites(inst, ('ioa', 'jacobi', 'duality-formal'), {window}); "
              "print(time.perf_counter() - t)")


def end_to_end(name, window, pure):
    env = dict(os.environ, IOALG_PURE_PYTHON="1" if pure else "0")
    code = END_TO_END.format(name=name, window=window)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--instance", default="Z4")
    ap.add_argument("--window", type=int, default=6)
    args = ap.parse_args()
    if _ckernel is None:
        sys.exit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    rng = random.Random(0)
    rows = []
    for terms, nvars in ((50, 2), (200, 2), (200, 3)):
        case = conv_case(rng, terms, nvars)
        rows.append((f"conv_pairs {terms}x{terms} terms, {nvars} vars",
                     best(_pykernel.conv_pairs, case, args.repeat),
                     best(_ckernel.conv_pairs, case, args.repeat)))
    for d in (8, 16, 32):
        case = mulmod_case(rng, d)
        rows.append((f"poly_mulmod degree {d}",
                     best(_pykernel.poly_mulmod, case, args.repeat),
                     best(_ckernel.poly_mulmod, case, args.repeat)))
    py = min(end_to_end(args.instance, args.window, True) for _ in range(2))
    cy = min(end_to_end(args.instance, args.window, False) for _ in range(2))
    rows.append((f"check {args.instance} ioa+jacobi+duality, window {args.window}", py, cy))
    print(f"{'benchmark':48} {'python':>12} {'cython':>12} {'speedup':>8}")
    for name, tp, tc in rows:
        print(f"{name:48} {tp * 1e3:10.3f}ms {tc * 1e3:10.3f}ms {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
