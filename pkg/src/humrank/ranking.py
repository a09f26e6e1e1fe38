"""Shared ranking containers and the deterministic ordering rule.

Every ranked list in the toolkit is ordered by score descending with ties
broken by doc_id ascending (codepoint order). The rule is centralised here so
dense retrieval, BM25, re-ranking and fusion cannot drift apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from humrank.errors import DataError


class ScoredDoc(NamedTuple):
    doc_id: str
    score: float


@dataclass
class RankedList:
    """Per-topic ranking. Construction does not validate; call validate()."""

    topic_id: str
    entries: list[ScoredDoc] = field(default_factory=list)

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def validate(self, check_tie_rule: bool = True) -> None:
        """Check the list invariants, raising DataError on the first violation.

        With check_tie_rule, equal-score runs must also be in ascending
        doc_id order (the toolkit's canonical ordering).
        """
        seen: set[str] = set()
        prev: ScoredDoc | None = None
        for entry in self.entries:
            if not math.isfinite(entry.score):
                raise DataError(f"topic {self.topic_id!r}: non-finite score for doc {entry.doc_id!r}")
            if entry.doc_id in seen:
                raise DataError(f"topic {self.topic_id!r}: duplicate doc_id {entry.doc_id!r}")
            seen.add(entry.doc_id)
            if prev is not None:
                if entry.score > prev.score:
                    raise DataError(
                        f"topic {self.topic_id!r}: score increases from doc "
                        f"{prev.doc_id!r} to {entry.doc_id!r}"
                    )
                if check_tie_rule and entry.score == prev.score and entry.doc_id < prev.doc_id:
                    raise DataError(
                        f"topic {self.topic_id!r}: tied docs {prev.doc_id!r}, "
                        f"{entry.doc_id!r} not in ascending id order"
                    )
            prev = entry


def sort_scored(pairs: Iterable[tuple[str, float]]) -> list[ScoredDoc]:
    """Order (doc_id, score) pairs by the canonical rule."""
    return [
        ScoredDoc(doc_id, float(score))
        for doc_id, score in sorted(pairs, key=lambda p: (-p[1], p[0]))
    ]


def id_tie_ranks(ids: Sequence[str]) -> np.ndarray:
    """Rank of each position under ascending id order; the numeric stand-in
    for the doc_id tie rule inside the scoring kernels."""
    order = sorted(range(len(ids)), key=ids.__getitem__)
    ranks = np.empty(len(ids), dtype=np.int64)
    for pos, idx in enumerate(order):
        ranks[idx] = pos
    return ranks
