"""Okapi BM25 lexical baseline: tokenizer, inverted index, scoring.

The scoring function is the smoothed-IDF Okapi variant:

    score(q, d) = sum over query occurrences of t:
        idf(t) * f(t,d) * (k1 + 1) / (f(t,d) + k1 * (1 - b + b * |d| / avgdl))
    idf(t) = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5))

The tokenizer is deliberately minimal (Unicode lowercase, split on
non-alphanumeric codepoints, no stemming or stopwords) and is shared between
documents and queries; wordplay is too fragile for aggressive analysis.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from humrank import kernels
from humrank.corpus import Document, Topic
from humrank.errors import DataError
from humrank.ranking import RankedList, ScoredDoc, id_tie_ranks

# \w minus underscore = Unicode letters and digits
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

INDEX_FORMAT = "humrank-bm25-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class Bm25Params:
    """Okapi hyperparameters; defaults follow the usual baseline settings."""

    k1: float = 1.5
    b: float = 0.75

    def __post_init__(self) -> None:
        if not self.k1 > 0:
            raise DataError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise DataError(f"b must be in [0, 1], got {self.b}")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric codepoints, dropping empties."""
    return _TOKEN_RE.findall(text.lower())


class InvertedIndex:
    """Term -> postings arrays plus document length statistics.

    Postings are kept as parallel numpy arrays (row ids int32, term
    frequencies float64) sorted by row, ready for the scoring kernels.
    """

    def __init__(
        self,
        doc_ids: list[str],
        doc_lengths: np.ndarray,
        postings: dict[str, tuple[np.ndarray, np.ndarray]],
    ):
        self.doc_ids = doc_ids
        self.doc_lengths = doc_lengths.astype(np.float64, copy=False)
        self.postings = postings
        self.N = len(doc_ids)
        self.avgdl = float(self.doc_lengths.mean()) if self.N else 0.0
        self._tie_ranks: np.ndarray | None = None
        self._row_of = {doc_id: row for row, doc_id in enumerate(doc_ids)}

    def df(self, term: str) -> int:
        post = self.postings.get(term)
        return 0 if post is None else int(post[0].shape[0])

    def idf(self, term: str) -> float:
        df = self.df(term)
        return math.log(1.0 + (self.N - df + 0.5) / (df + 0.5))

    def row_of(self, doc_id: str) -> int:
        try:
            return self._row_of[doc_id]
        except KeyError:
            raise DataError(f"doc_id {doc_id!r} not in index") from None

    def tf(self, term: str, doc_row: int) -> float:
        post = self.postings.get(term)
        if post is None:
            return 0.0
        rows, tfs = post
        pos = int(np.searchsorted(rows, doc_row))
        if pos < rows.shape[0] and int(rows[pos]) == doc_row:
            return float(tfs[pos])
        return 0.0

    def tie_ranks(self) -> np.ndarray:
        if self._tie_ranks is None:
            self._tie_ranks = id_tie_ranks(self.doc_ids)
        return self._tie_ranks


def build_index(docs: Sequence[Document]) -> InvertedIndex:
    """Tokenize documents and build the postings arrays (rows ascending)."""
    doc_ids = [d.doc_id for d in docs]
    if len(set(doc_ids)) != len(doc_ids):
        raise DataError("duplicate doc_ids in corpus")
    lengths = np.zeros(len(docs), dtype=np.float64)
    acc: dict[str, tuple[list[int], list[float]]] = {}
    for row, doc in enumerate(docs):
        tokens = tokenize(doc.text)
        lengths[row] = len(tokens)
        for term, tf in Counter(tokens).items():
            rows_tfs = acc.setdefault(term, ([], []))
            rows_tfs[0].append(row)
            rows_tfs[1].append(float(tf))
    postings = {
        term: (np.asarray(rows, dtype=np.int32), np.asarray(tfs, dtype=np.float64))
        for term, (rows, tfs) in acc.items()
    }
    return InvertedIndex(doc_ids, lengths, postings)


def bm25_score(
    idx: InvertedIndex,
    params: Bm25Params,
    topic_tokens: Iterable[str],
    doc_row: int,
) -> float:
    """Score one document for a token sequence; 0 when nothing matches.

    Repeated query tokens contribute once per occurrence.
    """
    if not 0 <= doc_row < idx.N:
        raise DataError(f"doc_row {doc_row} out of range for index of size {idx.N}")
    k1, b = params.k1, params.b
    k1p1 = k1 + 1.0
    dl = float(idx.doc_lengths[doc_row])
    score = 0.0
    for term, qtf in Counter(topic_tokens).items():
        tf = idx.tf(term, doc_row)
        if tf == 0.0:
            continue
        weight = float(qtf) * idx.idf(term)
        score += weight * (tf * k1p1) / (tf + k1 * (1.0 - b + b * dl / idx.avgdl))
    return score


def retrieve_bm25(idx: InvertedIndex, params: Bm25Params, topic: Topic, k: int) -> RankedList:
    """Rank the corpus for a topic, excluding zero-score documents.

    Accumulates term-at-a-time over the postings (kernel call per query
    term), then selects the top k under the canonical order.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    if idx.N == 0:
        return RankedList(topic.topic_id, [])
    scores = np.zeros(idx.N, dtype=np.float64)
    for term, qtf in Counter(tokenize(topic.text)).items():
        post = idx.postings.get(term)
        if post is None:
            continue
        rows, tfs = post
        weight = float(qtf) * idx.idf(term)
        kernels.bm25_accumulate(scores, rows, tfs, idx.doc_lengths, weight, params.k1, params.b, idx.avgdl)
    top = kernels.topk(scores, idx.tie_ranks(), min(k, idx.N), True)
    entries = [ScoredDoc(idx.doc_ids[int(i)], float(scores[int(i)])) for i in top]
    return RankedList(topic.topic_id, entries)


def save_index(idx: InvertedIndex, path: str | Path) -> None:
    """Serialise the index to a single .npz file with a versioned header."""
    terms = sorted(idx.postings)
    offsets = np.zeros(len(terms) + 1, dtype=np.int64)
    for i, term in enumerate(terms):
        offsets[i + 1] = offsets[i] + idx.postings[term][0].shape[0]
    total = int(offsets[-1])
    rows = np.empty(total, dtype=np.int32)
    tfs = np.empty(total, dtype=np.float64)
    for i, term in enumerate(terms):
        rows[offsets[i] : offsets[i + 1]] = idx.postings[term][0]
        tfs[offsets[i] : offsets[i + 1]] = idx.postings[term][1]
    header = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "doc_ids": idx.doc_ids,
        "terms": terms,
    }
    with open(path, "wb") as fh:
        np.savez(
            fh,
            header=np.frombuffer(json.dumps(header, ensure_ascii=False).encode("utf-8"), dtype=np.uint8),
            doc_lengths=idx.doc_lengths,
            offsets=offsets,
            rows=rows,
            tfs=tfs,
        )


def load_index(path: str | Path) -> InvertedIndex:
    """Load an index written by save_index, checking format and version."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing index file {path}")
    try:
        with np.load(path, allow_pickle=False) as npz:
            header = json.loads(bytes(npz["header"]).decode("utf-8"))
            doc_lengths = npz["doc_lengths"]
            offsets = npz["offsets"]
            rows = npz["rows"]
            tfs = npz["tfs"]
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"{path} is not a readable index file: {exc}") from exc
    if header.get("format") != INDEX_FORMAT:
        raise DataError(f"{path}: not a {INDEX_FORMAT} file")
    if header.get("version") != INDEX_VERSION:
        raise DataError(f"{path}: unsupported index version {header.get('version')!r}")
    terms = header["terms"]
    postings = {
        term: (rows[offsets[i] : offsets[i + 1]], tfs[offsets[i] : offsets[i + 1]])
        for i, term in enumerate(terms)
    }
    return InvertedIndex([str(d) for d in header["doc_ids"]], doc_lengths, postings)
