"""Independent brute-force oracles for the test suite.

Everything here is written straight from the metric/scoring definitions with
plain loops and no reuse of package code, so the tests compare two genuinely
different computations.
"""

from __future__ import annotations

import math


def ap(ranked_ids: list[str], relevant: set[str]) -> float:
    hits = 0
    total = 0.0
    for pos, doc in enumerate(ranked_ids, start=1):
        if doc in relevant:
            hits += 1
            total += hits / pos
    return total / len(relevant)


def r_prec(ranked_ids: list[str], relevant: set[str]) -> float:
    r = len(relevant)
    return sum(1 for doc in ranked_ids[:r] if doc in relevant) / r


def rr(ranked_ids: list[str], relevant: set[str]) -> float:
    for pos, doc in enumerate(ranked_ids, start=1):
        if doc in relevant:
            return 1.0 / pos
    return 0.0


def p_at(ranked_ids: list[str], relevant: set[str], k: int) -> float:
    return sum(1 for doc in ranked_ids[:k] if doc in relevant) / k


def ndcg_at(ranked_ids: list[str], relevant: set[str], k: int) -> float:
    dcg = 0.0
    for pos, doc in enumerate(ranked_ids[:k], start=1):
        if doc in relevant:
            dcg += 1.0 / math.log2(pos + 1)
    ideal = 0.0
    for pos in range(1, min(k, len(relevant)) + 1):
        ideal += 1.0 / math.log2(pos + 1)
    return dcg / ideal


def gmap(aps: list[float], epsilon: float = 1e-5) -> float:
    # product form, deliberately different from the exp-mean-log identity
    product = 1.0
    for value in aps:
        product *= max(value, epsilon)
    return product ** (1.0 / len(aps))


def bm25_score(
    doc_tokens: list[list[str]],
    query_tokens: list[str],
    doc_idx: int,
    k1: float = 1.5,
    b: float = 0.75,
) -> float:
    """Direct formula evaluation over tokenized docs, statistics recomputed
    from scratch."""
    n = len(doc_tokens)
    avgdl = sum(len(toks) for toks in doc_tokens) / n
    dl = len(doc_tokens[doc_idx])
    score = 0.0
    for term in query_tokens:
        df = sum(1 for toks in doc_tokens if term in toks)
        if df == 0:
            continue
        tf = doc_tokens[doc_idx].count(term)
        if tf == 0:
            continue
        idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
        score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl))
    return score


def bm25_full_ranking(
    doc_ids: list[str],
    doc_tokens: list[list[str]],
    query_tokens: list[str],
    k1: float = 1.5,
    b: float = 0.75,
) -> list[tuple[str, float]]:
    """All docs with positive score, sorted by (score desc, doc_id asc)."""
    scored = []
    for idx, doc_id in enumerate(doc_ids):
        s = bm25_score(doc_tokens, query_tokens, idx, k1, b)
        if s > 0.0:
            scored.append((doc_id, s))
    return sorted(scored, key=lambda pair: (-pair[1], pair[0]))


def cosine(a, b) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += float(x) * float(y)
        na += float(x) * float(x)
        nb += float(y) * float(y)
    value = dot / math.sqrt(na * nb)
    return min(1.0, max(-1.0, value))


def dense_full_ranking(doc_ids: list[str], doc_vectors, query) -> list[tuple[str, float]]:
    """Every document scored by cosine, full sort under the canonical rule."""
    scored = [(doc_id, cosine(vec, query)) for doc_id, vec in zip(doc_ids, doc_vectors)]
    return sorted(scored, key=lambda pair: (-pair[1], pair[0]))
