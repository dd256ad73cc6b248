"""Throughput comparison of the compiled kernels against the NumPy reference.

Runs both backends on identical inputs, checks they agree, and prints
samples/sec (integrand batches) and masks/sec (orientation counting).

    python benchmarks/bench_kernels.py --samples 200000 --k 2
"""

import argparse
import time

import numpy as np

from chromahqd._kernels import _core, _pyref
from chromahqd.fixtures import fixture
from chromahqd.graphs import augment_k
from chromahqd.integral import _dense_form
from chromahqd.orientations import _dense_arrays


def bench_integrand(name, k, samples, repeat):
    g, _ = fixture(name)
    _, _, n_int, tails, heads, bvals = _dense_form(g, k, None)
    m = len(tails)
    rng = np.random.default_rng(0)
    raw = rng.exponential(size=(samples, m))
    conduct = raw / raw.sum(axis=1, keepdims=True)
    tails32 = np.ascontiguousarray(tails, dtype=np.int32)
    heads32 = np.ascontiguousarray(heads, dtype=np.int32)
    bvals64 = np.ascontiguousarray(bvals, dtype=np.float64)

    results = {}
    for label, fn in backends("integrand_batch"):
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            out = fn(n_int, tails32, heads32, bvals64, conduct)
            best = min(best, time.perf_counter() - t0)
        results[label] = (best, out)
    report(f"integrand_batch  {name} k={k} (m={m}, n={samples})",
           results, samples, "samples")
    if len(results) == 2:
        a, b = (r[1] for r in results.values())
        worst = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"  agreement: max rel diff {worst:.2e}")


def bench_orientations(name, k, repeat):
    g, _ = fixture(name)
    g_k, bmap = augment_k(g, k)
    n, tails, heads, interior, higher = _dense_arrays(g_k, bmap)
    total = 1 << len(tails)

    results = {}
    for label, fn in backends("count_compatible_masks"):
        best = float("inf")
        count = None
        for _ in range(repeat):
            t0 = time.perf_counter()
            count = fn(
                n,
                np.ascontiguousarray(tails, dtype=np.int32),
                np.ascontiguousarray(heads, dtype=np.int32),
                np.ascontiguousarray(interior, dtype=np.uint8),
                np.ascontiguousarray(higher, dtype=np.uint64),
                0,
                total,
            )
            best = min(best, time.perf_counter() - t0)
        results[label] = (best, count)
    report(f"count_compatible_masks  {name} k={k} (2^{len(tails)} masks)",
           results, total, "masks")
    counts = {r[1] for r in results.values()}
    if len(counts) > 1:
        raise SystemExit(f"backends disagree: {counts}")
    print(f"  count: {counts.pop()}")


def backends(fn_name):
    out = [("python", getattr(_pyref, fn_name))]
    if _core is not None:
        out.insert(0, ("compiled", getattr(_core, fn_name)))
    return out


def report(title, results, work, unit):
    print(title)
    base = results.get("python", (None,))[0]
    for label, (secs, _) in results.items():
        rate = work / secs
        speedup = f"  ({base / secs:5.1f}x)" if base and label != "python" else ""
        print(f"  {label:9s} {secs * 1e3:10.2f} ms   {rate:12.3e} {unit}/s{speedup}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        print("compiled kernels not available; timing the reference only\n")
    bench_integrand("triangle", args.k, args.samples, args.repeat)
    print()
    bench_orientations("path3", min(args.k, 2), args.repeat)


if __name__ == "__main__":
    main()
