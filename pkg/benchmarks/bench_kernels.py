"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is timed on both backends at a few sizes; the best of
``--repeat`` runs is reported together with the largest disagreement
between the two results.
"""
import argparse
import json
import sys
import time

import numpy as np

from fracbound._kernels import _pykernels

try:
    from fracbound._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    for n in (257, 1025, 2049):
        x = np.linspace(0.0, 1.0, n)
        v = np.sqrt(x) + 0.01 * rng.standard_normal(n) + 1j * np.sin(3 * x)
        yield ("holder_pair_max", n,
               lambda k, x=x, v=v: k.holder_pair_max(x, v, 0.5, np.inf, True))
        yield ("holder_pair_max[delta=0.05]", n,
               lambda k, x=x, v=v: k.holder_pair_max(x, v, 0.5, 0.05, True))
    for n in (1024, 4096):
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        q = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        yield ("causal_convolve", n, lambda k, c=c, q=q: k.causal_convolve(c, q))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels are not built; only the fallback can run", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    rows = []
    print(f"{'kernel':30s} {'n':>6s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for name, n, fn in cases(rng):
        tp, yp = best_time(lambda: fn(_pykernels), args.repeat)
        row = {"kernel": name, "n": n, "python_s": tp}
        if _ckernels is not None:
            tc, yc = best_time(lambda: fn(_ckernels), args.repeat)
            diff = float(np.max(np.abs(np.asarray(yp) - np.asarray(yc))))
            row.update(cython_s=tc, speedup=tp / tc, max_diff=diff)
            print(f"{name:30s} {n:6d} {tp:12.5f} {tc:12.5f} {tp / tc:8.1f} {diff:10.2e}")
        else:
            print(f"{name:30s} {n:6d} {tp:12.5f} {'-':>12s}")
        rows.append(row)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
