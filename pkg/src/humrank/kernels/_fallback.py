"""Pure numpy implementations of the scoring kernels.

Selected automatically when the compiled extension is unavailable (or when
HUMRANK_NO_NATIVE is set). Must stay bit-identical to the Cython versions:
the expressions below are written with the exact same association order.
"""

from __future__ import annotations

import numpy as np


def bm25_accumulate(
    scores: np.ndarray,
    rows: np.ndarray,
    tfs: np.ndarray,
    doc_len: np.ndarray,
    weight: float,
    k1: float,
    b: float,
    avgdl: float,
) -> None:
    """Add one query term's BM25 contribution to ``scores`` in place.

    ``rows``/``tfs`` are the term's postings; ``weight`` is idf times the
    query term frequency. Each row appears at most once per call, so fancy
    indexing cannot collide.
    """
    if rows.shape[0] == 0:
        return
    dl = doc_len[rows]
    k1p1 = k1 + 1.0
    scores[rows] += weight * (tfs * k1p1) / (tfs + k1 * (1.0 - b + b * dl / avgdl))


def topk(scores: np.ndarray, tie: np.ndarray, k: int, positive_only: bool = False) -> np.ndarray:
    """Indices of the top-k entries under (score desc, tie asc).

    With positive_only, entries with score <= 0 are dropped first. Exact
    under the strict total order, so results match the native kernel
    element for element.
    """
    n = scores.shape[0]
    if positive_only:
        cand = np.nonzero(scores > 0.0)[0]
    else:
        cand = np.arange(n)
    m = cand.shape[0]
    kk = min(k, m)
    if kk <= 0:
        return np.empty(0, dtype=np.int64)
    if kk < m:
        # Partial select by score, then widen to everything tied with the
        # k-th score so the doc-id rule can resolve the boundary exactly.
        part = np.argpartition(-scores[cand], kk - 1)
        threshold = scores[cand[part[kk - 1]]]
        cand = cand[scores[cand] >= threshold]
    order = np.lexsort((tie[cand], -scores[cand]))
    return cand[order][:kk].astype(np.int64, copy=False)
