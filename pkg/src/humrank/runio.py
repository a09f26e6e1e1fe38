"""TREC run-file exchange: six whitespace-separated columns

    topic_id Q0 doc_id rank score run_tag

Ranks are 1..n contiguous per topic, scores are printed with six decimal
places and must be non-increasing with rank. Parsing is strict by default;
lenient mode re-sorts sloppy third-party runs by (score desc, doc_id asc)
and assigns fresh ranks.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from humrank.errors import DataError
from humrank.ranking import RankedList, ScoredDoc, sort_scored


def _check_token(value: str, what: str, where: str) -> None:
    if not value or any(ch.isspace() for ch in value):
        raise DataError(f"{where}: {what} {value!r} must be a non-empty token without whitespace")


def emit_run(lists: Sequence[RankedList], run_tag: str, path: str | Path) -> int:
    """Write ranked lists in TREC format; returns the number of lines.

    All lists are validated before anything is written, so a failed emit
    never leaves a partial file.
    """
    _check_token(run_tag, "run_tag", "emit_run")
    lines: list[str] = []
    for ranked in lists:
        _check_token(ranked.topic_id, "topic_id", "emit_run")
        ranked.validate(check_tie_rule=False)
        for entry in ranked.entries:
            _check_token(entry.doc_id, "doc_id", f"emit_run topic {ranked.topic_id!r}")
        lines.extend(
            f"{ranked.topic_id} Q0 {entry.doc_id} {rank} {entry.score:.6f} {run_tag}"
            for rank, entry in enumerate(ranked.entries, start=1)
        )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return len(lines)


def parse_run(path: str | Path, lenient: bool = False) -> list[RankedList]:
    """Parse a TREC run file into RankedLists, topics in first-seen order.

    Strict mode rejects rank gaps, out-of-order ranks, and score inversions
    with the offending line number. Lenient mode ignores the rank column and
    ordering, then re-sorts and re-ranks; malformed columns and duplicate
    doc_ids are errors in both modes.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing run file {path}")
    per_topic: dict[str, list[ScoredDoc]] = {}
    seen_docs: dict[str, set[str]] = {}
    next_rank: dict[str, int] = {}
    last_score: dict[str, float] = {}
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}") from exc
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise DataError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
        topic_id, _q0, doc_id, rank_str, score_str, _tag = parts
        try:
            rank = int(rank_str)
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer rank {rank_str!r}") from None
        try:
            score = float(score_str)
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric score {score_str!r}") from None
        if not math.isfinite(score):
            raise DataError(f"{path}:{lineno}: non-finite score {score_str!r}")
        docs = seen_docs.setdefault(topic_id, set())
        if doc_id in docs:
            raise DataError(f"{path}:{lineno}: duplicate doc_id {doc_id!r} for topic {topic_id!r}")
        docs.add(doc_id)
        if not lenient:
            expected = next_rank.get(topic_id, 1)
            if rank != expected:
                raise DataError(f"{path}:{lineno}: rank {rank} for topic {topic_id!r}, expected {expected}")
            next_rank[topic_id] = expected + 1
            if topic_id in last_score and score > last_score[topic_id]:
                raise DataError(
                    f"{path}:{lineno}: score {score} increases over previous "
                    f"{last_score[topic_id]} for topic {topic_id!r}"
                )
            last_score[topic_id] = score
        per_topic.setdefault(topic_id, []).append(ScoredDoc(doc_id, score))
    if lenient:
        return [RankedList(t, sort_scored((e.doc_id, e.score) for e in entries))
                for t, entries in per_topic.items()]
    return [RankedList(t, entries) for t, entries in per_topic.items()]


def run_tag_of(path: str | Path) -> str | None:
    """The run_tag on the first data line, or None for an empty file."""
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            parts = raw.split()
            if parts:
                if len(parts) != 6:
                    raise DataError(f"{path}: malformed first line")
                return parts[5]
    return None
