"""Compare the compiled kernels with the numpy fallback.

Times each kernel on random inputs and prints CSV with one row per
(kernel, P): seconds per call for each backend and the speedup.

    python benchmarks/bench_backends.py [--batch 200] [--p 25,100]
"""
import argparse
import csv
import sys
import time

import numpy as np

from lognnet import kernels
from lognnet.chaos import ReservoirParams, materialize_w1
from lognnet.classifier import init_stack, pack


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(k, P, y, H, labels):
    params = ReservoirParams(P=P)
    c = params.form_code
    wt = materialize_w1(params).wt
    scratch = np.empty(785)
    flat, dims = pack(init_stack(P, (10,), 1))
    return {
        "project_alg1": lambda: k.project_alg1(y, params.r, params.A, params.B, P, c),
        "project_alg2": lambda: k.project_alg2(y, params.r, params.A, params.B, P, c, scratch),
        "project_alg3": lambda: k.project_alg3(y, wt),
        "materialize": lambda: k.materialize(params.r, params.A, params.B, P, c),
        "sgd_epoch": lambda: k.sgd_epoch(H, labels, flat.copy(), dims, 0.3, 0),
        "lyapunov_1e5": lambda: k.lyapunov(params.r, 0.1, 1000, 100_000, c),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=200, help="input vectors per call")
    ap.add_argument("--p", default="25,100", help="hidden widths")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)

    if "compiled" not in kernels.available():
        sys.exit("compiled extension is not built; run pip install -e . first")
    rng = np.random.default_rng(0)
    y = rng.random((args.batch, 785))
    y[:, 0] = 1.0
    labels = rng.integers(0, 10, args.batch).astype(np.uint8)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["kernel", "P", "compiled_s", "python_s", "speedup"])
    for P in (int(p) for p in args.p.split(",")):
        H = rng.uniform(-0.5, 0.5, (args.batch, P + 1))
        H[:, 0] = 1.0
        fast = cases(kernels.get("compiled"), P, y, H, labels)
        slow = cases(kernels.get("python"), P, y, H, labels)
        for name in fast:
            tc = best_of(fast[name], args.repeats)
            tp = best_of(slow[name], args.repeats)
            out.writerow([name, P, f"{tc:.6g}", f"{tp:.6g}", f"{tp / tc:.1f}"])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
