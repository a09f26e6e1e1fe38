"""Evaluation suite with trec_eval-compatible conventions.

Metrics over binary relevance: average precision, GMAP, R-precision,
reciprocal rank, precision at 5/10/100, nDCG at 5/10. Topics with no
relevant documents are excluded from aggregates by default (the trec_eval
convention); pass include_zero_relevant=True to score them as zeros instead.
Topics judged in the qrels but missing from the run contribute zeros.

All values are fractions in [0, 1]; report formatting additionally shows
them as percentages.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from humrank.corpus import QrelSet
from humrank.errors import DataError
from humrank.ranking import RankedList

P_CUTOFFS = (5, 10, 100)
NDCG_CUTOFFS = (5, 10)
GMAP_EPSILON = 1e-5


def _relevant_set(qrels: QrelSet, topic_id: str) -> frozenset[str]:
    return qrels.relevant_docs(topic_id)


def average_precision(ranking: RankedList, qrels: QrelSet) -> float:
    """AP = (1/R) * sum of precision at each relevant retrieved position.

    Relevant documents that were never retrieved contribute zero. Requires
    at least one relevant document in the qrels for this topic.
    """
    relevant = _relevant_set(qrels, ranking.topic_id)
    if not relevant:
        raise DataError(f"topic {ranking.topic_id!r} has no relevant documents")
    hits = 0
    total = 0.0
    for pos, entry in enumerate(ranking.entries, start=1):
        if entry.doc_id in relevant:
            hits += 1
            total += hits / pos
    return total / len(relevant)


def gmap(aps: Sequence[float], epsilon: float = GMAP_EPSILON) -> float:
    """Geometric mean of APs, flooring each at epsilon (trec_eval style)."""
    if not aps:
        raise DataError("gmap needs at least one AP value")
    return math.exp(sum(math.log(max(ap, epsilon)) for ap in aps) / len(aps))


def r_precision(ranking: RankedList, qrels: QrelSet) -> float:
    """Precision at rank R where R is the topic's relevant count; positions
    past the end of the ranking count as non-relevant."""
    relevant = _relevant_set(qrels, ranking.topic_id)
    if not relevant:
        raise DataError(f"topic {ranking.topic_id!r} has no relevant documents")
    r = len(relevant)
    hits = sum(1 for entry in ranking.entries[:r] if entry.doc_id in relevant)
    return hits / r


def reciprocal_rank(ranking: RankedList, qrels: QrelSet) -> float:
    """1 / rank of the first relevant retrieved document; 0 if none."""
    relevant = _relevant_set(qrels, ranking.topic_id)
    for pos, entry in enumerate(ranking.entries, start=1):
        if entry.doc_id in relevant:
            return 1.0 / pos
    return 0.0


def precision_at_k(ranking: RankedList, qrels: QrelSet, k: int) -> float:
    """Relevant in the top k divided by k (fixed denominator, even when
    fewer than k documents were retrieved)."""
    if k <= 0:
        raise DataError(f"precision cutoff must be positive, got {k}")
    relevant = _relevant_set(qrels, ranking.topic_id)
    hits = sum(1 for entry in ranking.entries[:k] if entry.doc_id in relevant)
    return hits / k


def ndcg_at_k(ranking: RankedList, qrels: QrelSet, k: int) -> float:
    """Binary-gain nDCG with 1/log2(rank+1) discount, ranks starting at 1.

    The ideal DCG places min(k, R) relevant documents at the top.
    """
    if k <= 0:
        raise DataError(f"nDCG cutoff must be positive, got {k}")
    relevant = _relevant_set(qrels, ranking.topic_id)
    if not relevant:
        raise DataError(f"topic {ranking.topic_id!r} has no relevant documents")
    dcg = sum(
        1.0 / math.log2(pos + 1)
        for pos, entry in enumerate(ranking.entries[:k], start=1)
        if entry.doc_id in relevant
    )
    ideal = sum(1.0 / math.log2(pos + 1) for pos in range(1, min(k, len(relevant)) + 1))
    return dcg / ideal


@dataclass
class PerQueryResult:
    topic_id: str
    num_ret: int
    num_rel: int
    num_rel_ret: int
    ap: float
    r_prec: float
    rr: float
    p_at: dict[int, float]
    ndcg_at: dict[int, float]


@dataclass
class MetricReport:
    per_query: list[PerQueryResult]
    map: float
    gmap: float
    r_prec: float
    mrr: float
    p_at: dict[int, float]
    ndcg_at: dict[int, float]
    evaluated_topics: int
    num_ret: int = 0
    num_rel: int = 0
    num_rel_ret: int = 0
    flags: dict[str, bool] = field(default_factory=dict)


def _zero_result(topic_id: str, num_rel: int) -> PerQueryResult:
    return PerQueryResult(
        topic_id=topic_id,
        num_ret=0,
        num_rel=num_rel,
        num_rel_ret=0,
        ap=0.0,
        r_prec=0.0,
        rr=0.0,
        p_at={k: 0.0 for k in P_CUTOFFS},
        ndcg_at={k: 0.0 for k in NDCG_CUTOFFS},
    )


def evaluate_run(
    run: Sequence[RankedList],
    qrels: QrelSet,
    include_zero_relevant: bool = False,
) -> MetricReport:
    """Score a run against qrels and aggregate over evaluated topics.

    Evaluated topics are those present in the qrels (all of them with
    include_zero_relevant, otherwise only those with R >= 1, in which case
    zero-relevant topics are dropped entirely). Run topics missing from the
    qrels are ignored; qrels topics missing from the run score zero.
    """
    if not qrels.judgements:
        raise DataError("cannot evaluate against empty qrels")
    by_topic: dict[str, RankedList] = {}
    for ranked in run:
        if ranked.topic_id in by_topic:
            raise DataError(f"run contains topic {ranked.topic_id!r} twice")
        by_topic[ranked.topic_id] = ranked

    per_query: list[PerQueryResult] = []
    for topic_id in qrels.topic_ids():
        relevant = qrels.relevant_docs(topic_id)
        if not relevant and not include_zero_relevant:
            continue
        ranked = by_topic.get(topic_id)
        if ranked is None or not relevant:
            # Absent from the run, or nothing relevant exists: all zeros.
            per_query.append(_zero_result(topic_id, len(relevant)))
            if ranked is not None:
                per_query[-1].num_ret = len(ranked.entries)
            continue
        hits = sum(1 for e in ranked.entries if e.doc_id in relevant)
        per_query.append(
            PerQueryResult(
                topic_id=topic_id,
                num_ret=len(ranked.entries),
                num_rel=len(relevant),
                num_rel_ret=hits,
                ap=average_precision(ranked, qrels),
                r_prec=r_precision(ranked, qrels),
                rr=reciprocal_rank(ranked, qrels),
                p_at={k: precision_at_k(ranked, qrels, k) for k in P_CUTOFFS},
                ndcg_at={k: ndcg_at_k(ranked, qrels, k) for k in NDCG_CUTOFFS},
            )
        )

    n = len(per_query)
    if n == 0:
        raise DataError("no evaluable topics (every qrels topic has zero relevant documents)")

    def mean(values: list[float]) -> float:
        return sum(values) / n

    return MetricReport(
        per_query=per_query,
        map=mean([q.ap for q in per_query]),
        gmap=gmap([q.ap for q in per_query]),
        r_prec=mean([q.r_prec for q in per_query]),
        mrr=mean([q.rr for q in per_query]),
        p_at={k: mean([q.p_at[k] for q in per_query]) for k in P_CUTOFFS},
        ndcg_at={k: mean([q.ndcg_at[k] for q in per_query]) for k in NDCG_CUTOFFS},
        evaluated_topics=n,
        num_ret=sum(q.num_ret for q in per_query),
        num_rel=sum(q.num_rel for q in per_query),
        num_rel_ret=sum(q.num_rel_ret for q in per_query),
        flags={"include_zero_relevant": include_zero_relevant},
    )


_COLUMNS = ["MAP", "GMAP", "R-Prec", "MRR", "P@5", "P@10", "P@100", "nDCG@5", "nDCG@10"]


def _metric_values(report: MetricReport) -> list[float]:
    return [
        report.map,
        report.gmap,
        report.r_prec,
        report.mrr,
        report.p_at[5],
        report.p_at[10],
        report.p_at[100],
        report.ndcg_at[5],
        report.ndcg_at[10],
    ]


def compare_runs(reports: Sequence[MetricReport], names: Sequence[str]) -> str:
    """Render an aligned comparison table, percentages with two decimals.

    Rows are sorted by MAP descending (ties by name ascending). A topic-set
    mismatch between reports is a warning, not an error.
    """
    if len(reports) != len(names):
        raise DataError(f"{len(reports)} reports but {len(names)} names")
    if not reports:
        raise DataError("compare_runs needs at least one report")
    topic_sets = [frozenset(q.topic_id for q in r.per_query) for r in reports]
    if len(set(topic_sets)) > 1:
        warnings.warn("compared runs cover different topic sets", stacklevel=2)

    rows = sorted(zip(reports, names), key=lambda rn: (-rn[0].map, rn[1]))
    header = ["Run", "#ret", "#rel", *_COLUMNS]
    table = [header]
    for report, name in rows:
        table.append(
            [
                name,
                str(report.num_ret),
                str(report.num_rel_ret),
                *[f"{100.0 * v:.2f}" for v in _metric_values(report)],
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    out_lines = []
    for row in table:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        out_lines.append("  ".join(cells).rstrip())
    return "\n".join(out_lines) + "\n"


def format_report(report: MetricReport, name: str) -> str:
    """Single-run summary showing each aggregate as fraction and percent."""
    lines = [
        f"run: {name}",
        f"topics evaluated: {report.evaluated_topics}",
        f"retrieved: {report.num_ret}   relevant: {report.num_rel}   relevant retrieved: {report.num_rel_ret}",
    ]
    for label, value in zip(_COLUMNS, _metric_values(report)):
        lines.append(f"{label:<8} {value:.6f}  ({100.0 * value:.2f})")
    return "\n".join(lines) + "\n"


def write_per_query_tsv(report: MetricReport, path: str | Path) -> None:
    """Machine-readable per-topic metrics, one row per evaluated topic."""
    header = [
        "topic_id",
        "num_ret",
        "num_rel",
        "num_rel_ret",
        "ap",
        "r_prec",
        "rr",
        *[f"p_at_{k}" for k in P_CUTOFFS],
        *[f"ndcg_at_{k}" for k in NDCG_CUTOFFS],
    ]
    lines = ["\t".join(header)]
    for q in report.per_query:
        lines.append(
            "\t".join(
                [
                    q.topic_id,
                    str(q.num_ret),
                    str(q.num_rel),
                    str(q.num_rel_ret),
                    f"{q.ap:.6f}",
                    f"{q.r_prec:.6f}",
                    f"{q.rr:.6f}",
                    *[f"{q.p_at[k]:.6f}" for k in P_CUTOFFS],
                    *[f"{q.ndcg_at[k]:.6f}" for k in NDCG_CUTOFFS],
                ]
            )
        )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
