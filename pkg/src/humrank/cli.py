"""Command-line pipeline: ingest -> embed -> index -> search -> rerank/fuse
-> emit -> eval -> compare.

Every stage reads and writes plain files (embedding stores, index files, TREC
runs, reports), so stages can be re-run independently and experiments stay
reproducible. Exit codes: 0 success, 1 usage, 2 data error, 3 external
process error.

The embedding stage talks to an encoder bridge subprocess over the line
protocol; pass one with --bridge (or the HUMRANK_BRIDGE environment
variable), or use --stub for the built-in deterministic hash encoder.
"""

from __future__ import annotations

import argparse
import os
import shlex
import shutil
import sys
from pathlib import Path

from humrank import bm25, dense, metrics, rerank, runio, store
from humrank.corpus import load_corpus, load_qrels, load_topics, save_corpus, save_qrels, save_topics
from humrank.errors import BridgeError, DataError, HumrankError
from humrank.wire import ProcessEncoder, ProcessScorer

BRIDGE_ENV = "HUMRANK_BRIDGE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to 1."""

    def error(self, message):  # noqa: A002 - argparse API
        raise UsageError(f"{self.prog}: {message}")


def _corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="document collection file")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv", help="corpus file format")


def _topics_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topics", required=True, help="topics file")
    p.add_argument("--topics-format", choices=("tsv", "jsonl"), default="tsv")


def build_parser() -> _Parser:
    parser = _Parser(prog="humrank", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a data file and convert between formats")
    p.add_argument("--kind", choices=("corpus", "topics", "qrels"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv", help="input format (corpus/topics)")
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=("tsv", "jsonl"), default=None, help="defaults to the input format")

    p = sub.add_parser("embed", help="encode texts through a bridge and write an embedding store")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="encode a document collection")
    src.add_argument("--topics", help="encode a topics file")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--store", required=True, help="output store directory")
    p.add_argument("--bridge", default=None, help=f"bridge command line (overridden by ${BRIDGE_ENV})")
    p.add_argument("--stub", action="store_true", help="use the built-in deterministic stub bridge")
    p.add_argument("--dim", type=int, default=32, help="stub vector dimension")
    p.add_argument("--seed", type=int, default=0, help="stub seed")
    p.add_argument("--max-length", type=int, default=256, help="token truncation length (recorded; stub applies it too)")
    p.add_argument("--model", default="unspecified", help="encoder name recorded in the manifest")
    p.add_argument("--pooling", default="first_token", help="pooling mode recorded in the manifest")
    p.add_argument("--normalize", action="store_true", help="L2-normalize rows before writing")
    p.add_argument("--timeout", type=float, default=120.0, help="seconds of bridge silence tolerated")

    p = sub.add_parser("index", help="build and save a BM25 inverted index")
    _corpus_args(p)
    p.add_argument("--out", required=True, help="output index file (.npz)")

    p = sub.add_parser("search", help="produce a TREC run with dense or BM25 retrieval")
    p.add_argument("--mode", choices=("dense", "bm25"), required=True)
    p.add_argument("--doc-store", help="document embedding store (dense)")
    p.add_argument("--topic-store", help="topic embedding store (dense)")
    p.add_argument("--index", help="BM25 index file (bm25)")
    p.add_argument("--topics", help="topics file (bm25)")
    p.add_argument("--topics-format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--depth", type=int, default=100, help="documents retrieved per topic")
    p.add_argument("--k1", type=float, default=1.5)
    p.add_argument("--b", type=float, default=0.75)
    p.add_argument("--run-tag", default="humrank")
    p.add_argument("--out", required=True)

    p = sub.add_parser("rerank", help="re-score the head of a run with an external scorer")
    p.add_argument("--run", required=True, help="input run file")
    p.add_argument("--scorer", required=True, help="scorer command line")
    _corpus_args(p)
    _topics_args(p)
    p.add_argument("--depth", type=int, default=100, help="candidates re-scored per topic; the tail is dropped")
    p.add_argument("--run-tag", default="humrank")
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fuse", help="reciprocal-rank-fuse several runs")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--k-rrf", type=float, default=rerank.DEFAULT_RRF_K)
    p.add_argument("--run-tag", default="humrank")
    p.add_argument("--out", required=True)

    p = sub.add_parser("emit", help="validate (optionally repair) a run file and rewrite it canonically")
    p.add_argument("--input", required=True)
    p.add_argument("--lenient", action="store_true", help="re-sort and re-rank instead of rejecting sloppy input")
    p.add_argument("--run-tag", default=None, help="defaults to the input file's tag")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="evaluate a run against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--include-empty-topics", action="store_true",
                   help="score zero-relevant topics as 0 instead of excluding them")
    p.add_argument("--per-query", default=None, help="per-topic TSV path (default: <run>.perquery.tsv)")

    p = sub.add_parser("compare", help="evaluate several runs and print a comparison table")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--names", nargs="+", default=None, help="row labels (default: run tags)")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--include-empty-topics", action="store_true")

    return parser


def _effective_tag(base: str, stage: str, depth: int | None = None) -> str:
    tag = f"{base}.{stage}"
    if depth is not None:
        tag = f"{tag}.d{depth}"
    return tag


def _ensure_distinct(out_path, *in_paths) -> None:
    """Refuse configurations where an output would overwrite an input."""
    out = Path(out_path).resolve()
    for path in in_paths:
        if path and Path(path).resolve() == out:
            raise UsageError(f"output {out_path} would overwrite input {path}")


def cmd_ingest(args) -> int:
    _ensure_distinct(args.out, args.input)
    out_format = args.out_format or args.format
    if args.kind == "corpus":
        docs = load_corpus(args.input, args.format)
        save_corpus(docs, args.out, out_format)
        print(f"ingested {len(docs)} documents -> {args.out}")
    elif args.kind == "topics":
        topics = load_topics(args.input, args.format)
        save_topics(topics, args.out, out_format)
        print(f"ingested {len(topics)} topics -> {args.out}")
    else:
        qrels = load_qrels(args.input)
        save_qrels(qrels, args.out)
        print(f"ingested {len(qrels.judgements)} judgements -> {args.out}")
    return 0


def _bridge_command(args) -> tuple[list[str], dict[str, str]]:
    env_cmd = os.environ.get(BRIDGE_ENV)
    if args.stub and not env_cmd:
        cmd = [
            sys.executable, "-m", "humrank.stub_bridge",
            "--dim", str(args.dim), "--seed", str(args.seed), "--max-length", str(args.max_length),
        ]
        meta = {"model": f"stub-sha256(seed={args.seed})", "pooling": "hash"}
    else:
        raw = env_cmd or args.bridge
        if not raw:
            raise UsageError(f"embed needs --bridge, --stub, or ${BRIDGE_ENV}")
        cmd = shlex.split(raw)
        meta = {"model": args.model, "pooling": args.pooling}
    meta["max_length"] = str(args.max_length)
    return cmd, meta


def cmd_embed(args) -> int:
    _ensure_distinct(args.store, args.corpus, args.topics)
    if args.corpus:
        items = [(d.doc_id, d.text) for d in load_corpus(args.corpus, args.format)]
    else:
        items = [(t.topic_id, t.text) for t in load_topics(args.topics, args.format)]
    cmd, meta = _bridge_command(args)

    encoder = ProcessEncoder(cmd, timeout=args.timeout)
    dim, vectors = encoder.encode(items)
    ordered = [(vec_id, vectors[vec_id]) for vec_id, _ in items]

    # Build in a scratch directory and swap in atomically, so a failure never
    # leaves a partial store and an existing store survives until success.
    target = Path(args.store)
    scratch = target.with_name(target.name + ".partial")
    if scratch.exists():
        shutil.rmtree(scratch)
    try:
        manifest = store.write_store(ordered, scratch, metadata=meta)
        if args.normalize:
            matrix = store.normalize_rows(store.open_store(scratch))
            manifest = store.write_store(
                zip(matrix.ids, matrix.data), scratch, normalized=True, metadata=meta
            )
        if target.exists():
            shutil.rmtree(target)
        os.replace(scratch, target)
    except Exception:
        if scratch.exists():
            shutil.rmtree(scratch)
        raise
    print(f"embedded {manifest.count} texts (dim {dim}) -> {target}")
    return 0


def cmd_index(args) -> int:
    _ensure_distinct(args.out, args.corpus)
    docs = load_corpus(args.corpus, args.format)
    idx = bm25.build_index(docs)
    bm25.save_index(idx, args.out)
    print(f"indexed {idx.N} documents ({len(idx.postings)} terms) -> {args.out}")
    return 0


def cmd_search(args) -> int:
    _ensure_distinct(args.out, args.doc_store, args.topic_store, args.index, args.topics)
    if args.depth < 1:
        raise UsageError("--depth must be >= 1")
    tag = _effective_tag(args.run_tag, args.mode, args.depth)
    if args.mode == "dense":
        if not args.doc_store or not args.topic_store:
            raise UsageError("dense search needs --doc-store and --topic-store")
        docs = store.open_store(args.doc_store)
        topics = store.open_store(args.topic_store)
        lists = dense.retrieve_dense_batch(topics, docs, args.depth)
    else:
        if not args.index or not args.topics:
            raise UsageError("bm25 search needs --index and --topics")
        idx = bm25.load_index(args.index)
        params = bm25.Bm25Params(k1=args.k1, b=args.b)
        topics = load_topics(args.topics, args.topics_format)
        lists = [bm25.retrieve_bm25(idx, params, t, args.depth) for t in topics]
    count = runio.emit_run(lists, tag, args.out)
    print(f"wrote {count} lines for {len(lists)} topics -> {args.out}")
    return 0


def cmd_rerank(args) -> int:
    _ensure_distinct(args.out, args.run, args.corpus, args.topics)
    if args.depth < 1:
        raise UsageError("--depth must be >= 1")
    runs = runio.parse_run(args.run)
    topics = {t.topic_id: t.text for t in load_topics(args.topics, args.topics_format)}
    doc_text = {d.doc_id: d.text for d in load_corpus(args.corpus, args.format)}

    candidate_sets = []
    requests: list[tuple[str, str, str]] = []
    for ranked in runs:
        if ranked.topic_id not in topics:
            raise DataError(f"run topic {ranked.topic_id!r} not present in the topics file")
        cands = rerank.select_candidates(ranked, args.depth)
        candidate_sets.append(cands)
        for cand in cands.candidates:
            if cand.doc_id not in doc_text:
                raise DataError(f"no text available for candidate doc {cand.doc_id!r}")
            requests.append((f"{cands.topic_id}::{cand.doc_id}", topics[cands.topic_id], doc_text[cand.doc_id]))

    # One scorer process for the whole run; per-topic reordering then reads
    # from the precomputed scores.
    all_scores = ProcessScorer(shlex.split(args.scorer), timeout=args.timeout)(requests)
    lookup = lambda reqs: {rid: all_scores[rid] for rid, _, _ in reqs}  # noqa: E731

    reranked = [
        rerank.rerank_with_scorer(cands, lookup, topics[cands.topic_id], doc_text)
        for cands in candidate_sets
    ]
    tag = _effective_tag(args.run_tag, "rerank", args.depth)
    count = runio.emit_run(reranked, tag, args.out)
    print(f"reranked {len(reranked)} topics ({count} lines) -> {args.out}")
    return 0


def cmd_fuse(args) -> int:
    _ensure_distinct(args.out, *args.runs)
    parsed = [runio.parse_run(path) for path in args.runs]
    topic_order: list[str] = []
    by_topic: dict[str, list] = {}
    for run in parsed:
        for ranked in run:
            if ranked.topic_id not in by_topic:
                topic_order.append(ranked.topic_id)
                by_topic[ranked.topic_id] = []
            by_topic[ranked.topic_id].append(ranked)
    fused = [rerank.rrf_fuse(by_topic[t], args.k_rrf) for t in topic_order]
    tag = _effective_tag(args.run_tag, "rrf")
    count = runio.emit_run(fused, tag, args.out)
    print(f"fused {len(args.runs)} runs over {len(fused)} topics ({count} lines) -> {args.out}")
    return 0


def cmd_emit(args) -> int:
    _ensure_distinct(args.out, args.input)
    lists = runio.parse_run(args.input, lenient=args.lenient)
    tag = args.run_tag or runio.run_tag_of(args.input) or "humrank"
    count = runio.emit_run(lists, tag, args.out)
    print(f"emitted {count} lines -> {args.out}")
    return 0


def _evaluate(run_path: str, qrels_path: str, lenient: bool, include_empty: bool):
    run = runio.parse_run(run_path, lenient=lenient)
    qrels = load_qrels(qrels_path)
    return metrics.evaluate_run(run, qrels, include_zero_relevant=include_empty)


def cmd_eval(args) -> int:
    report = _evaluate(args.run, args.qrels, args.lenient, args.include_empty_topics)
    name = runio.run_tag_of(args.run) or Path(args.run).name
    print(metrics.format_report(report, name))
    print(metrics.compare_runs([report], [name]))
    per_query = args.per_query or f"{args.run}.perquery.tsv"
    metrics.write_per_query_tsv(report, per_query)
    print(f"per-query metrics -> {per_query}")
    return 0


def cmd_compare(args) -> int:
    reports = [
        _evaluate(path, args.qrels, args.lenient, args.include_empty_topics)
        for path in args.runs
    ]
    if args.names:
        if len(args.names) != len(args.runs):
            raise UsageError("--names must match --runs in length")
        names = args.names
    else:
        names = [runio.run_tag_of(path) or Path(path).name for path in args.runs]
    print(metrics.compare_runs(reports, names), end="")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "embed": cmd_embed,
    "index": cmd_index,
    "search": cmd_search,
    "rerank": cmd_rerank,
    "fuse": cmd_fuse,
    "emit": cmd_emit,
    "eval": cmd_eval,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BridgeError as exc:
        print(f"external process error: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except HumrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
