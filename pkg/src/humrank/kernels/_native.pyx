# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels: BM25 posting accumulation and top-k selection.

Mirrors humrank.kernels._fallback exactly; compiled with -ffp-contract=off
so floating-point results are bit-identical to the numpy path.
"""

from libc.stdint cimport int32_t, int64_t

import numpy as np


def bm25_accumulate(
    double[::1] scores,
    const int32_t[::1] rows,
    const double[::1] tfs,
    const double[::1] doc_len,
    double weight,
    double k1,
    double b,
    double avgdl,
):
    cdef Py_ssize_t i, n = rows.shape[0]
    cdef double k1p1 = k1 + 1.0
    cdef double tf, dl
    cdef int32_t r
    for i in range(n):
        r = rows[i]
        tf = tfs[i]
        dl = doc_len[r]
        scores[r] += weight * (tf * k1p1) / (tf + k1 * (1.0 - b + b * dl / avgdl))


cdef inline bint _worse(double sa, int64_t ta, double sb, int64_t tb) noexcept:
    # (sa, ta) ranks strictly below (sb, tb) under (score desc, tie asc)
    if sa != sb:
        return sa < sb
    return ta > tb


def topk(const double[::1] scores, const int64_t[::1] tie, Py_ssize_t k, bint positive_only=False):
    """Bounded selection: min-heap of size k keyed by (score asc, tie desc),
    so the root is the worst entry currently kept."""
    cdef Py_ssize_t n = scores.shape[0]
    if k > n:
        k = n
    if k <= 0 or n == 0:
        return np.empty(0, dtype=np.int64)

    cdef double[::1] hs = np.empty(k, dtype=np.float64)
    cdef int64_t[::1] ht = np.empty(k, dtype=np.int64)
    cdef int64_t[::1] hi = np.empty(k, dtype=np.int64)
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t i, pos, parent, child, right
    cdef double s, cs
    cdef int64_t t, ci, cidx

    for i in range(n):
        s = scores[i]
        if positive_only and s <= 0.0:
            continue
        t = tie[i]
        if size < k:
            # push and sift up
            pos = size
            size += 1
            while pos > 0:
                parent = (pos - 1) >> 1
                if _worse(s, t, hs[parent], ht[parent]):
                    hs[pos] = hs[parent]
                    ht[pos] = ht[parent]
                    hi[pos] = hi[parent]
                    pos = parent
                else:
                    break
            hs[pos] = s
            ht[pos] = t
            hi[pos] = i
        elif _worse(hs[0], ht[0], s, t):
            # replace root and sift down
            pos = 0
            while True:
                child = 2 * pos + 1
                if child >= k:
                    break
                right = child + 1
                if right < k and _worse(hs[right], ht[right], hs[child], ht[child]):
                    child = right
                if _worse(hs[child], ht[child], s, t):
                    hs[pos] = hs[child]
                    ht[pos] = ht[child]
                    hi[pos] = hi[child]
                    pos = child
                else:
                    break
            hs[pos] = s
            ht[pos] = t
            hi[pos] = i

    out = np.empty(size, dtype=np.int64)
    cdef int64_t[::1] out_view = out
    cdef Py_ssize_t remaining = size
    # repeatedly pop the worst, filling the output back to front
    while remaining > 0:
        out_view[remaining - 1] = hi[0]
        remaining -= 1
        if remaining == 0:
            break
        s = hs[remaining]
        t = ht[remaining]
        cidx = hi[remaining]
        pos = 0
        while True:
            child = 2 * pos + 1
            if child >= remaining:
                break
            right = child + 1
            if right < remaining and _worse(hs[right], ht[right], hs[child], ht[child]):
                child = right
            if _worse(hs[child], ht[child], s, t):
                hs[pos] = hs[child]
                ht[pos] = ht[child]
                hi[pos] = hi[child]
                pos = child
            else:
                break
        hs[pos] = s
        ht[pos] = t
        hi[pos] = cidx
    return out
