"""Collection data model: documents, topics, and binary relevance judgements.

File formats:
  * corpus/topics TSV: ``id<TAB>text`` -- only the first tab separates the id
    from the text, so texts may themselves contain tabs.
  * corpus/topics JSONL: one object per line with ``id``, ``text`` and an
    optional ``meta`` string map (corpus only).
  * qrels: TREC 4-column whitespace format ``topic_id iter doc_id rel``;
    the ``iter`` column is ignored and grades are binarised at ``rel > 0``.

All files are strict UTF-8; invalid bytes are a hard error rather than
replaced, since wordplay texts are sensitive to exact characters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from humrank.errors import DataError

Pathish = str | Path

CORPUS_FORMATS = ("tsv", "jsonl")


@dataclass(frozen=True)
class Document:
    """A collection document. ``meta`` may carry humour type, source, etc."""

    doc_id: str
    text: str
    meta: Mapping[str, str] | None = None


@dataclass(frozen=True)
class Topic:
    """A query. Topics are humorous texts in this task, but any UTF-8 works."""

    topic_id: str
    text: str


@dataclass
class QrelSet:
    """Binary relevance judgements keyed by (topic_id, doc_id).

    Values are strictly 0 or 1; graded input is binarised by the loader.
    """

    judgements: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for pair, rel in self.judgements.items():
            if rel not in (0, 1):
                raise DataError(f"qrel value for {pair} is {rel!r}, must be 0 or 1")

    def relevance(self, topic_id: str, doc_id: str) -> int:
        return self.judgements.get((topic_id, doc_id), 0)

    def relevant_docs(self, topic_id: str) -> frozenset[str]:
        return frozenset(
            d for (t, d), rel in self.judgements.items() if t == topic_id and rel == 1
        )

    def num_relevant(self, topic_id: str) -> int:
        return sum(
            1 for (t, _), rel in self.judgements.items() if t == topic_id and rel == 1
        )

    def topic_ids(self) -> list[str]:
        """Topic ids in first-appearance order."""
        seen: dict[str, None] = {}
        for (t, _) in self.judgements:
            seen.setdefault(t)
        return list(seen)


def _check_id(value: str, kind: str, where: str) -> None:
    if not value or any(ch.isspace() for ch in value):
        raise DataError(f"{where}: {kind} {value!r} must be a non-empty token without whitespace")


def _read_lines(path: Pathish) -> list[str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}") from exc
    # Normalise line endings; a lone trailing \r would otherwise leak into text.
    return text.split("\n")


def _strip_record(line: str) -> str:
    return line[:-1] if line.endswith("\r") else line


def _load_tsv(path: Pathish, kind: str) -> list[tuple[str, str]]:
    records: list[tuple[str, str]] = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = _strip_record(raw)
        if not line:
            continue
        ident, sep, text = line.partition("\t")
        if not sep:
            raise DataError(f"{path}:{lineno}: expected '{kind}_id<TAB>text'")
        _check_id(ident, f"{kind}_id", f"{path}:{lineno}")
        if not text:
            raise DataError(f"{path}:{lineno}: empty text for {kind} {ident!r}")
        records.append((ident, text))
    return records


def _load_jsonl(path: Pathish, kind: str) -> list[tuple[str, str, dict[str, str] | None]]:
    records = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = _strip_record(raw)
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
            raise DataError(f"{path}:{lineno}: object must have 'id' and 'text' fields")
        ident, text = obj["id"], obj["text"]
        if not isinstance(ident, str) or not isinstance(text, str):
            raise DataError(f"{path}:{lineno}: 'id' and 'text' must be strings")
        _check_id(ident, f"{kind}_id", f"{path}:{lineno}")
        if not text:
            raise DataError(f"{path}:{lineno}: empty text for {kind} {ident!r}")
        meta = obj.get("meta")
        if meta is not None:
            if not isinstance(meta, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
            ):
                raise DataError(f"{path}:{lineno}: 'meta' must map strings to strings")
        records.append((ident, text, meta))
    return records


def load_corpus(path: Pathish, format: str = "tsv") -> list[Document]:
    """Load a document collection, preserving file order.

    Raises DataError on duplicate ids (naming the id), malformed lines
    (naming the line number), empty texts, or invalid UTF-8.
    """
    if format not in CORPUS_FORMATS:
        raise DataError(f"unknown corpus format {format!r}, expected one of {CORPUS_FORMATS}")
    if format == "tsv":
        docs = [Document(i, t) for i, t in _load_tsv(path, "doc")]
    else:
        docs = [Document(i, t, meta) for i, t, meta in _load_jsonl(path, "doc")]
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise DataError(f"{path}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
    return docs


def load_topics(path: Pathish, format: str = "tsv") -> list[Topic]:
    """Load topics, preserving file order. Errors as in load_corpus."""
    if format not in CORPUS_FORMATS:
        raise DataError(f"unknown topics format {format!r}, expected one of {CORPUS_FORMATS}")
    if format == "tsv":
        topics = [Topic(i, t) for i, t in _load_tsv(path, "topic")]
    else:
        topics = [Topic(i, t) for i, t, _ in _load_jsonl(path, "topic")]
    seen: set[str] = set()
    for topic in topics:
        if topic.topic_id in seen:
            raise DataError(f"{path}: duplicate topic_id {topic.topic_id!r}")
        seen.add(topic.topic_id)
    return topics


def load_qrels(path: Pathish) -> QrelSet:
    """Load TREC-format qrels, binarising grades at rel > 0.

    Duplicate (topic, doc) pairs are tolerated when they binarise to the
    same value and are an error when they conflict.
    """
    judgements: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = _strip_record(raw)
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 columns 'topic iter doc rel', got {len(parts)}")
        topic_id, _iter, doc_id, rel_str = parts
        _check_id(topic_id, "topic_id", f"{path}:{lineno}")
        _check_id(doc_id, "doc_id", f"{path}:{lineno}")
        try:
            rel_raw = int(rel_str)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-integer relevance {rel_str!r}") from exc
        rel = 1 if rel_raw > 0 else 0
        key = (topic_id, doc_id)
        if key in judgements and judgements[key] != rel:
            raise DataError(
                f"{path}:{lineno}: conflicting judgements for topic {topic_id!r} doc {doc_id!r}"
            )
        judgements[key] = rel
    return QrelSet(judgements)


def save_corpus(docs: Iterable[Document], path: Pathish, format: str = "tsv") -> None:
    """Serialise documents; TSV refuses texts containing newlines."""
    if format not in CORPUS_FORMATS:
        raise DataError(f"unknown corpus format {format!r}, expected one of {CORPUS_FORMATS}")
    lines: list[str] = []
    for doc in docs:
        if format == "tsv":
            if "\n" in doc.text or "\r" in doc.text:
                raise DataError(f"doc {doc.doc_id!r}: text with newlines is not representable in tsv")
            lines.append(f"{doc.doc_id}\t{doc.text}")
        else:
            obj: dict = {"id": doc.doc_id, "text": doc.text}
            if doc.meta is not None:
                obj["meta"] = dict(doc.meta)
            lines.append(json.dumps(obj, ensure_ascii=False))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def save_topics(topics: Iterable[Topic], path: Pathish, format: str = "tsv") -> None:
    """Serialise topics; same rules as save_corpus."""
    save_corpus([Document(t.topic_id, t.text) for t in topics], path, format)


def save_qrels(qrels: QrelSet, path: Pathish) -> None:
    """Serialise qrels in TREC 4-column format (iter column written as 0)."""
    lines = [f"{t} 0 {d} {rel}" for (t, d), rel in qrels.judgements.items()]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
