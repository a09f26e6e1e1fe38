"""Second-stage re-ranking and reciprocal rank fusion.

Re-ranking takes the head of a first-stage run, has an external scorer judge
each (query, document) pair, and reorders those candidates by the new scores.
Fusion combines several runs for the same topic by summed reciprocal ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from humrank.errors import DataError
from humrank.ranking import RankedList, ScoredDoc, sort_scored

DEFAULT_RRF_K = 60.0

# A scorer maps (pair_id, query_text, doc_text) triples to pair_id -> score.
Scorer = Callable[[Sequence[tuple[str, str, str]]], Mapping[str, float]]


@dataclass
class CandidateSet:
    topic_id: str
    candidates: list[ScoredDoc]
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise DataError(f"depth must be >= 1, got {self.depth}")
        if len(self.candidates) > self.depth:
            raise DataError(f"{len(self.candidates)} candidates exceed depth {self.depth}")
        ids = [c.doc_id for c in self.candidates]
        if len(set(ids)) != len(ids):
            raise DataError(f"topic {self.topic_id!r}: duplicate candidate doc_ids")


def select_candidates(run: RankedList, depth: int) -> CandidateSet:
    """Keep the first min(depth, |run|) entries, order preserved."""
    if depth < 1:
        raise DataError(f"depth must be >= 1, got {depth}")
    return CandidateSet(run.topic_id, list(run.entries[:depth]), depth)


def rerank_with_scorer(
    cands: CandidateSet,
    scorer: Scorer,
    topic_text: str,
    doc_text: Mapping[str, str] | Callable[[str], str],
) -> RankedList:
    """Re-score candidates and reorder by scorer score (ties by doc_id).

    The output is a permutation of the candidate doc_ids carrying the scorer
    scores; first-stage scores are discarded. Missing document text or a
    misbehaving scorer is a hard error.
    """
    lookup = doc_text if callable(doc_text) else doc_text.__getitem__
    requests: list[tuple[str, str, str]] = []
    for cand in cands.candidates:
        try:
            text = lookup(cand.doc_id)
        except KeyError:
            raise DataError(f"no text available for candidate doc {cand.doc_id!r}") from None
        requests.append((f"{cands.topic_id}::{cand.doc_id}", topic_text, text))

    scores = scorer(requests)

    pairs: list[tuple[str, float]] = []
    for cand in cands.candidates:
        pair_id = f"{cands.topic_id}::{cand.doc_id}"
        if pair_id not in scores:
            raise DataError(f"scorer returned no score for pair_id {pair_id!r}")
        pairs.append((cand.doc_id, float(scores[pair_id])))
    return RankedList(cands.topic_id, sort_scored(pairs))


def rrf_fuse(runs: Sequence[RankedList], k_rrf: float = DEFAULT_RRF_K) -> RankedList:
    """Reciprocal rank fusion of runs for one topic.

    score(d) = sum over runs containing d of 1 / (k_rrf + rank), ranks
    starting at 1. All runs must share the topic_id.
    """
    if not runs:
        raise DataError("rrf_fuse needs at least one run")
    if k_rrf <= 0:
        raise DataError(f"k_rrf must be > 0, got {k_rrf}")
    topic_id = runs[0].topic_id
    for run in runs[1:]:
        if run.topic_id != topic_id:
            raise DataError(f"rrf_fuse got mixed topics {topic_id!r} and {run.topic_id!r}")
    fused: dict[str, float] = {}
    for run in runs:
        for rank, entry in enumerate(run.entries, start=1):
            fused[entry.doc_id] = fused.get(entry.doc_id, 0.0) + 1.0 / (k_rrf + rank)
    return RankedList(topic_id, sort_scored(fused.items()))
