"""Exact cosine-similarity retrieval over an embedding store.

Scoring is brute force: every document row is scored for every topic, in
float64 regardless of the stored precision, then the top-k is selected under
the canonical (score desc, doc_id asc) order. Document matrices are walked in
fixed-size chunks so memory-mapped stores never need to fit in RAM; the chunk
size is a constant, which keeps scores independent of corpus size and makes
repeated runs byte-identical.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from humrank import kernels
from humrank.errors import DataError
from humrank.ranking import RankedList, ScoredDoc
from humrank.store import EmbeddingMatrix

_CHUNK_ROWS = 8192


def cosine_sim(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1].

    Raises DataError on dimension mismatch or zero-norm input.
    """
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.ndim != 1 or vb.ndim != 1:
        raise DataError("cosine_sim expects 1-dimensional vectors")
    if va.shape[0] != vb.shape[0]:
        raise DataError(f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise DataError("cosine similarity is undefined for zero-norm vectors")
    value = float(va @ vb) / (na * nb)
    return min(1.0, max(-1.0, value))


def _doc_norms(docs: EmbeddingMatrix) -> np.ndarray:
    norms = np.empty(docs.count, dtype=np.float64)
    for start in range(0, docs.count, _CHUNK_ROWS):
        block = np.asarray(docs.data[start : start + _CHUNK_ROWS], dtype=np.float64)
        norms[start : start + block.shape[0]] = np.linalg.norm(block, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise DataError(f"document {docs.ids[int(zero[0])]!r} has zero norm; cosine is undefined")
    return norms


def _score_all(topic_vec: np.ndarray, docs: EmbeddingMatrix, doc_norms: np.ndarray | None) -> np.ndarray:
    """Cosine of one query against every document row, clamped to [-1, 1]."""
    qnorm = float(np.linalg.norm(topic_vec))
    if qnorm == 0.0:
        raise DataError("topic vector has zero norm; cosine is undefined")
    scores = np.empty(docs.count, dtype=np.float64)
    for start in range(0, docs.count, _CHUNK_ROWS):
        block = np.asarray(docs.data[start : start + _CHUNK_ROWS], dtype=np.float64)
        scores[start : start + block.shape[0]] = block @ topic_vec
    if doc_norms is None:
        scores /= qnorm
    else:
        scores /= doc_norms * qnorm
    np.clip(scores, -1.0, 1.0, out=scores)
    return scores


def retrieve_dense(
    topic_vec: Sequence[float] | np.ndarray,
    docs: EmbeddingMatrix,
    k: int,
    topic_id: str = "q",
) -> RankedList:
    """Rank all documents against one topic vector and keep the top k.

    Returns min(k, count) entries; an empty store yields an empty list.
    Normalized stores skip the per-document norm (cosine reduces to the dot
    product with the query direction).
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    q = np.asarray(topic_vec, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != docs.dim:
        raise DataError(f"topic vector has dim {q.shape}, store has dim {docs.dim}")
    if docs.count == 0:
        return RankedList(topic_id, [])
    norms = None if docs.manifest.normalized else _doc_norms(docs)
    scores = _score_all(q, docs, norms)
    top = kernels.topk(scores, docs.tie_ranks(), min(k, docs.count), False)
    entries = [ScoredDoc(docs.ids[int(i)], float(scores[int(i)])) for i in top]
    return RankedList(topic_id, entries)


def retrieve_dense_batch(topics: EmbeddingMatrix, docs: EmbeddingMatrix, k: int) -> list[RankedList]:
    """One RankedList per topic row, each identical to the single-query path.

    The per-topic scoring is already a vectorised matrix operation; looping
    topics keeps batch results trivially equal to retrieve_dense.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    if topics.count and topics.dim != docs.dim:
        raise DataError(f"topic store dim {topics.dim} != doc store dim {docs.dim}")
    if docs.count == 0:
        return [RankedList(tid, []) for tid in topics.ids]
    norms = None if docs.manifest.normalized else _doc_norms(docs)
    tie = docs.tie_ranks()
    out: list[RankedList] = []
    for row, topic_id in enumerate(topics.ids):
        q = np.asarray(topics.data[row], dtype=np.float64)
        scores = _score_all(q, docs, norms)
        top = kernels.topk(scores, tie, min(k, docs.count), False)
        entries = [ScoredDoc(docs.ids[int(i)], float(scores[int(i)])) for i in top]
        out.append(RankedList(topic_id, entries))
    return out
