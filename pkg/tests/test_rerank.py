import numpy as np
import pytest

from humrank.errors import DataError
from humrank.ranking import RankedList, ScoredDoc
from humrank.rerank import CandidateSet, rerank_with_scorer, rrf_fuse, select_candidates


def make_run(topic_id, pairs):
    return RankedList(topic_id, [ScoredDoc(d, s) for d, s in pairs])


def run_of_size(n, topic_id="q1"):
    return make_run(topic_id, [(f"d{i:03d}", float(n - i)) for i in range(n)])


def scorer_from(mapping):
    """Test scorer: answers each pair_id from a prepared dict."""
    return lambda requests: {rid: mapping[rid] for rid, _, _ in requests}


def test_select_candidates_truncates():
    cands = select_candidates(run_of_size(300), 100)
    assert len(cands.candidates) == 100
    assert cands.candidates == run_of_size(300).entries[:100]


def test_select_candidates_short_run():
    assert len(select_candidates(run_of_size(10), 100).candidates) == 10


def test_select_candidates_depth_one():
    cands = select_candidates(run_of_size(5), 1)
    assert [c.doc_id for c in cands.candidates] == ["d000"]


def test_candidate_set_validates():
    with pytest.raises(DataError):
        CandidateSet("q", [ScoredDoc("a", 1.0), ScoredDoc("a", 0.5)], 5)
    with pytest.raises(DataError):
        CandidateSet("q", [ScoredDoc("a", 1.0)] * 3, 2)


def docs_lookup(cands):
    return {c.doc_id: f"text of {c.doc_id}" for c in cands.candidates}


def test_identity_scorer_preserves_order():
    cands = select_candidates(run_of_size(8), 8)
    scores = {f"q1::{c.doc_id}": c.score for c in cands.candidates}
    out = rerank_with_scorer(cands, scorer_from(scores), "query text", docs_lookup(cands))
    assert out.doc_ids() == [c.doc_id for c in cands.candidates]


def test_constant_scorer_sorts_by_doc_id():
    run = make_run("q1", [("zz", 3.0), ("mm", 2.0), ("aa", 1.0)])
    cands = select_candidates(run, 3)
    scores = {f"q1::{d}": 7.0 for d in ["zz", "mm", "aa"]}
    out = rerank_with_scorer(cands, scorer_from(scores), "q", docs_lookup(cands))
    assert out.doc_ids() == ["aa", "mm", "zz"]


def test_reversal_scorer_reverses():
    cands = select_candidates(run_of_size(10), 10)
    scores = {f"q1::{c.doc_id}": -c.score for c in cands.candidates}
    out = rerank_with_scorer(cands, scorer_from(scores), "q", docs_lookup(cands))
    assert out.doc_ids() == [c.doc_id for c in reversed(cands.candidates)]


def test_rerank_is_permutation_and_discards_first_stage_scores():
    rng = np.random.default_rng(5)
    cands = select_candidates(run_of_size(20), 20)
    scores = {f"q1::{c.doc_id}": float(rng.standard_normal()) for c in cands.candidates}
    out = rerank_with_scorer(cands, scorer_from(scores), "q", docs_lookup(cands))
    assert sorted(out.doc_ids()) == sorted(c.doc_id for c in cands.candidates)
    for entry in out.entries:
        assert entry.score == scores[f"q1::{entry.doc_id}"]
    out.validate()


def test_rerank_missing_doc_text_errors():
    cands = select_candidates(run_of_size(3), 3)
    with pytest.raises(DataError, match="d000"):
        rerank_with_scorer(cands, scorer_from({}), "q", {})


def test_rerank_missing_score_errors():
    cands = select_candidates(run_of_size(3), 3)
    partial = {f"q1::d000": 1.0, "q1::d001": 0.5}
    scorer = lambda requests: partial  # noqa: E731
    with pytest.raises(DataError, match="d002"):
        rerank_with_scorer(cands, scorer, "q", docs_lookup(cands))


def test_rerank_deterministic():
    cands = select_candidates(run_of_size(15), 15)
    scores = {f"q1::{c.doc_id}": (hash(c.doc_id) % 7) * 1.0 for c in cands.candidates}
    a = rerank_with_scorer(cands, scorer_from(scores), "q", docs_lookup(cands))
    b = rerank_with_scorer(cands, scorer_from(scores), "q", docs_lookup(cands))
    assert a == b


def test_rrf_both_rank_one():
    run_a = make_run("q1", [("top", 9.0), ("x", 1.0)])
    run_b = make_run("q1", [("top", 4.0), ("y", 2.0)])
    fused = rrf_fuse([run_a, run_b], 60.0)
    assert fused.entries[0].doc_id == "top"
    assert fused.entries[0].score == pytest.approx(2.0 / 61.0, abs=1e-9)
    assert fused.entries[0].score == pytest.approx(0.032787, abs=1e-6)


def test_rrf_single_run_preserves_order():
    run = run_of_size(12)
    fused = rrf_fuse([run])
    assert fused.doc_ids() == run.doc_ids()


def test_rrf_consistency_beats_single_first_place():
    # lone rank-1 appearance: 1/61 = 0.0164; rank-2 in both runs: 2/62 = 0.0323
    run_a = make_run("q1", [("solo", 5.0), ("both", 4.0)])
    run_b = make_run("q1", [("zzz", 5.0), ("both", 4.0)])
    fused = rrf_fuse([run_a, run_b], 60.0)
    assert fused.entries[0].doc_id == "both"


def test_rrf_identical_runs_preserve_order():
    run = run_of_size(9)
    fused = rrf_fuse([run, run, run])
    assert fused.doc_ids() == run.doc_ids()


def test_rrf_mixed_topics_error():
    with pytest.raises(DataError, match="mixed topics"):
        rrf_fuse([make_run("q1", [("a", 1.0)]), make_run("q2", [("a", 1.0)])])


def test_rrf_needs_positive_constant():
    with pytest.raises(DataError):
        rrf_fuse([run_of_size(2)], k_rrf=0.0)


def test_rrf_tie_rule_doc_id():
    run_a = make_run("q1", [("zz", 2.0), ("aa", 1.0)])
    run_b = make_run("q1", [("aa", 2.0), ("zz", 1.0)])
    fused = rrf_fuse([run_a, run_b])
    # both docs score 1/61 + 1/62; tie resolved by id
    assert fused.doc_ids() == ["aa", "zz"]
