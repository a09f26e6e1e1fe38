#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Synthetic workloads sized like a real collection (tens of thousands of
documents): BM25 term accumulation over postings, top-k selection over a full
score array, and an end-to-end BM25 query. Results also double-check that
both implementations return identical output.

    python3 benchmarks/bench_kernels.py [--docs 50000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from humrank.kernels import _fallback

try:
    from humrank.kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_bm25(n_docs, repeats, rng):
    n_terms = 20
    doc_len = rng.integers(5, 60, size=n_docs).astype(np.float64)
    avgdl = float(doc_len.mean())
    postings = []
    for _ in range(n_terms):
        df = int(rng.integers(n_docs // 20, n_docs // 2))
        rows = np.sort(rng.choice(n_docs, size=df, replace=False)).astype(np.int32)
        tfs = rng.integers(1, 8, size=df).astype(np.float64)
        postings.append((rows, tfs, float(rng.uniform(0.2, 2.5))))

    def run(impl):
        scores = np.zeros(n_docs)
        for rows, tfs, weight in postings:
            impl.bm25_accumulate(scores, rows, tfs, doc_len, weight, 1.5, 0.75, avgdl)
        return scores

    results = {"numpy": timeit(lambda: run(_fallback), repeats)}
    if _native is not None:
        results["native"] = timeit(lambda: run(_native), repeats)
        assert np.array_equal(run(_native), run(_fallback)), "kernel outputs diverged"
    return results


def bench_topk(n_docs, k, repeats, rng):
    scores = rng.standard_normal(n_docs)
    scores[rng.choice(n_docs, size=n_docs // 10, replace=False)] = scores[0]  # tie block
    tie = rng.permutation(n_docs).astype(np.int64)
    results = {"numpy": timeit(lambda: _fallback.topk(scores, tie, k, False), repeats)}
    if _native is not None:
        results["native"] = timeit(lambda: _native.topk(scores, tie, k, False), repeats)
        assert np.array_equal(
            _native.topk(scores, tie, k, False), _fallback.topk(scores, tie, k, False)
        ), "kernel outputs diverged"
    return results


def print_row(name, results):
    numpy_t = results["numpy"]
    if "native" in results:
        native_t = results["native"]
        speedup = numpy_t / native_t if native_t > 0 else float("inf")
        print(f"{name:<28} numpy {numpy_t * 1e3:8.3f} ms   native {native_t * 1e3:8.3f} ms   x{speedup:5.2f}")
    else:
        print(f"{name:<28} numpy {numpy_t * 1e3:8.3f} ms   native unavailable")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=50_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"collection size: {args.docs} docs, best of {args.repeats} runs")
    if _native is None:
        print("note: compiled kernels not built; run `python3 setup.py build_ext --inplace`")
    print_row("bm25 accumulate (20 terms)", bench_bm25(args.docs, args.repeats, rng))
    for k in (10, 100, 1000):
        print_row(f"topk k={k}", bench_topk(args.docs, k, args.repeats, rng))


if __name__ == "__main__":
    main()
