import math
import random

import pytest

import oracles
from humrank.corpus import QrelSet
from humrank.errors import DataError
from humrank.metrics import (
    average_precision,
    compare_runs,
    evaluate_run,
    format_report,
    gmap,
    ndcg_at_k,
    precision_at_k,
    r_precision,
    reciprocal_rank,
    write_per_query_tsv,
)
from humrank.ranking import RankedList, ScoredDoc


def make_run(topic_id, doc_ids):
    n = len(doc_ids)
    return RankedList(topic_id, [ScoredDoc(d, float(n - i)) for i, d in enumerate(doc_ids)])


def qrels_for(topic_id, relevant, non_relevant=()):
    judgements = {(topic_id, d): 1 for d in relevant}
    judgements.update({(topic_id, d): 0 for d in non_relevant})
    return QrelSet(judgements)


def test_ap_worked_example():
    run = make_run("q", ["d1", "d2", "d3"])
    qrels = qrels_for("q", ["d1", "d3"])
    assert average_precision(run, qrels) == pytest.approx((1.0 + 2.0 / 3.0) / 2.0, abs=1e-12)
    assert average_precision(run, qrels) == pytest.approx(0.833333, abs=1e-5)


def test_ap_perfect_prefix_is_one():
    run = make_run("q", ["a", "b", "c", "x", "y"])
    assert average_precision(run, qrels_for("q", ["a", "b", "c"])) == 1.0


def test_ap_no_relevant_retrieved_is_zero():
    run = make_run("q", ["x", "y"])
    assert average_precision(run, qrels_for("q", ["a"])) == 0.0


def test_ap_unretrieved_relevant_contribute_zero():
    run = make_run("q", ["a"])
    assert average_precision(run, qrels_for("q", ["a", "never1", "never2"])) == pytest.approx(1.0 / 3.0)


def test_gmap_symmetric_values():
    assert gmap([0.5, 0.5]) == pytest.approx(0.5, abs=1e-12)


def test_gmap_epsilon_floor():
    assert gmap([1.0, 0.0], epsilon=1e-5) == pytest.approx(math.sqrt(1e-5), abs=1e-12)
    assert gmap([1.0, 0.0]) == pytest.approx(0.0031623, abs=1e-5)


def test_gmap_single_topic():
    assert gmap([0.25]) == pytest.approx(0.25, abs=1e-12)


def test_r_precision_half():
    run = make_run("q", ["rel", "non"])
    assert r_precision(run, qrels_for("q", ["rel", "other"], ["non"])) == 0.5


def test_r_precision_short_ranking_counts_missing_as_nonrelevant():
    run = make_run("q", ["rel"])
    assert r_precision(run, qrels_for("q", ["rel", "m1", "m2"])) == pytest.approx(1.0 / 3.0)


def test_r_precision_perfect():
    run = make_run("q", ["a", "b"])
    assert r_precision(run, qrels_for("q", ["a", "b"])) == 1.0


def test_reciprocal_rank_cases():
    assert reciprocal_rank(make_run("q", ["rel", "x"]), qrels_for("q", ["rel"])) == 1.0
    assert reciprocal_rank(make_run("q", ["a", "b", "c", "rel"]), qrels_for("q", ["rel"])) == 0.25
    assert reciprocal_rank(make_run("q", ["a", "b"]), qrels_for("q", ["rel"])) == 0.0


def test_precision_at_k_cases():
    qrels = qrels_for("q", ["rel"])
    assert precision_at_k(make_run("q", ["rel", "a", "b", "c", "d"]), qrels, 5) == 0.2
    assert precision_at_k(make_run("q", ["rel", "a", "b"]), qrels, 10) == pytest.approx(0.1)
    assert precision_at_k(make_run("q", ["rel"]), qrels, 1) == 1.0
    with pytest.raises(DataError):
        precision_at_k(make_run("q", ["rel"]), qrels, 0)


def test_ndcg_ideal_at_rank_one():
    assert ndcg_at_k(make_run("q", ["rel", "x"]), qrels_for("q", ["rel"]), 5) == 1.0


def test_ndcg_single_relevant_at_rank_two():
    got = ndcg_at_k(make_run("q", ["x", "rel"]), qrels_for("q", ["rel"]), 5)
    assert got == pytest.approx(1.0 / math.log2(3.0), abs=1e-12)
    assert got == pytest.approx(0.63093, abs=1e-5)


def test_ndcg_none_in_cutoff_is_zero():
    run = make_run("q", ["a", "b", "c", "d", "e", "rel"])
    assert ndcg_at_k(run, qrels_for("q", ["rel"]), 5) == 0.0


def test_evaluate_perfect_single_topic():
    run = [make_run("q", ["a", "b"])]
    report = evaluate_run(run, qrels_for("q", ["a", "b"]))
    assert report.map == 1.0
    assert report.mrr == 1.0
    assert report.r_prec == 1.0
    assert report.evaluated_topics == 1


def test_evaluate_two_perfect_topics_all_ones():
    qrels = QrelSet({("q1", "a"): 1, ("q2", "b"): 1})
    run = [make_run("q1", ["a"]), make_run("q2", ["b"])]
    report = evaluate_run(run, qrels)
    assert report.map == report.gmap == report.mrr == report.r_prec == 1.0
    assert report.ndcg_at[5] == report.ndcg_at[10] == 1.0


def test_evaluate_missing_topic_contributes_zeros():
    qrels = QrelSet({("q1", "a"): 1, ("q2", "b"): 1})
    report = evaluate_run([make_run("q1", ["a"])], qrels)
    assert report.evaluated_topics == 2
    assert report.map == pytest.approx(0.5)
    missing = [q for q in report.per_query if q.topic_id == "q2"][0]
    assert missing.num_ret == 0 and missing.ap == 0.0


def test_evaluate_zero_relevant_topics_excluded_by_default():
    qrels = QrelSet({("q1", "a"): 1, ("q2", "b"): 0})
    report = evaluate_run([make_run("q1", ["a"]), make_run("q2", ["b"])], qrels)
    assert report.evaluated_topics == 1
    assert report.map == 1.0


def test_evaluate_zero_relevant_topics_included_on_flag():
    qrels = QrelSet({("q1", "a"): 1, ("q2", "b"): 0})
    report = evaluate_run(
        [make_run("q1", ["a"]), make_run("q2", ["b"])], qrels, include_zero_relevant=True
    )
    assert report.evaluated_topics == 2
    assert report.map == pytest.approx(0.5)


def test_evaluate_extra_run_topics_ignored():
    qrels = qrels_for("q1", ["a"])
    report = evaluate_run([make_run("q1", ["a"]), make_run("phantom", ["x"])], qrels)
    assert report.evaluated_topics == 1


def test_evaluate_empty_qrels_errors():
    with pytest.raises(DataError, match="empty qrels"):
        evaluate_run([make_run("q", ["a"])], QrelSet({}))


def test_evaluate_duplicate_topic_in_run_errors():
    qrels = qrels_for("q", ["a"])
    with pytest.raises(DataError, match="twice"):
        evaluate_run([make_run("q", ["a"]), make_run("q", ["b"])], qrels)


def test_map_recomputable_from_per_query():
    rng = random.Random(4)
    collection, runs = _random_mini_collection(rng)
    report = evaluate_run(runs, collection)
    assert report.map == pytest.approx(
        sum(q.ap for q in report.per_query) / len(report.per_query), abs=1e-12
    )


def _random_mini_collection(rng, n_docs=20, n_topics=6):
    doc_ids = [f"d{i:02d}" for i in range(n_docs)]
    judgements = {}
    runs = []
    for t in range(n_topics):
        topic_id = f"q{t}"
        relevant = rng.sample(doc_ids, rng.randint(1, 5))
        for d in relevant:
            judgements[(topic_id, d)] = 1
        for d in rng.sample(sorted(set(doc_ids) - set(relevant)), 3):
            judgements[(topic_id, d)] = 0
        retrieved = rng.sample(doc_ids, rng.randint(1, n_docs))
        runs.append(make_run(topic_id, retrieved))
    return QrelSet(judgements), runs


def test_evaluate_matches_oracle_on_random_collections():
    rng = random.Random(123)
    for _ in range(20):
        qrels, runs = _random_mini_collection(rng)
        report = evaluate_run(runs, qrels)
        oracle_aps = []
        for ranked in runs:
            relevant = set(qrels.relevant_docs(ranked.topic_id))
            ids = ranked.doc_ids()
            q = [r for r in report.per_query if r.topic_id == ranked.topic_id][0]
            assert q.ap == pytest.approx(oracles.ap(ids, relevant), abs=1e-9)
            assert q.r_prec == pytest.approx(oracles.r_prec(ids, relevant), abs=1e-9)
            assert q.rr == pytest.approx(oracles.rr(ids, relevant), abs=1e-9)
            for k in (5, 10, 100):
                assert q.p_at[k] == pytest.approx(oracles.p_at(ids, relevant, k), abs=1e-9)
            for k in (5, 10):
                assert q.ndcg_at[k] == pytest.approx(oracles.ndcg_at(ids, relevant, k), abs=1e-9)
            oracle_aps.append(oracles.ap(ids, relevant))
        assert report.map == pytest.approx(sum(oracle_aps) / len(oracle_aps), abs=1e-9)
        assert report.gmap == pytest.approx(oracles.gmap(oracle_aps), abs=1e-9)


def test_swapping_relevant_upward_never_hurts():
    rng = random.Random(9)
    for _ in range(50):
        qrels, runs = _random_mini_collection(rng, n_docs=15, n_topics=1)
        ranked = runs[0]
        relevant = qrels.relevant_docs(ranked.topic_id)
        ids = ranked.doc_ids()
        rel_positions = [i for i, d in enumerate(ids) if d in relevant]
        nonrel_positions = [i for i, d in enumerate(ids) if d not in relevant]
        movable = [(i, j) for i in rel_positions for j in nonrel_positions if j < i]
        if not movable:
            continue
        i, j = rng.choice(movable)
        swapped = ids[:]
        swapped[i], swapped[j] = swapped[j], swapped[i]
        better = make_run(ranked.topic_id, swapped)
        for fn in (average_precision, r_precision, reciprocal_rank):
            assert fn(better, qrels) >= fn(ranked, qrels) - 1e-12
        for k in (5, 10, 100):
            assert precision_at_k(better, qrels, k) >= precision_at_k(ranked, qrels, k) - 1e-12
        for k in (5, 10):
            assert ndcg_at_k(better, qrels, k) >= ndcg_at_k(ranked, qrels, k) - 1e-12


def test_permuting_tail_nonrelevant_leaves_metrics_unchanged():
    qrels = qrels_for("q", ["r1", "r2"], ["n1", "n2", "n3"])
    base = make_run("q", ["r1", "n1", "r2", "n2", "n3"])
    shuffled = make_run("q", ["r1", "n1", "r2", "n3", "n2"])
    assert average_precision(base, qrels) == average_precision(shuffled, qrels)
    assert reciprocal_rank(base, qrels) == reciprocal_rank(shuffled, qrels)
    assert r_precision(base, qrels) == r_precision(shuffled, qrels)
    assert ndcg_at_k(base, qrels, 3) == ndcg_at_k(shuffled, qrels, 3)


def test_all_metrics_within_unit_interval():
    rng = random.Random(77)
    qrels, runs = _random_mini_collection(rng)
    report = evaluate_run(runs, qrels)
    for q in report.per_query:
        values = [q.ap, q.r_prec, q.rr, *q.p_at.values(), *q.ndcg_at.values()]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert q.num_rel_ret <= min(q.num_ret, q.num_rel)


def _report_with_aps(aps, name="r"):
    qrels = QrelSet({(f"q{i}", "rel"): 1 for i in range(len(aps))})
    # one-doc rankings cannot hit arbitrary APs, so patch per-query values
    report = evaluate_run([make_run(f"q{i}", ["rel"]) for i in range(len(aps))], qrels)
    for q, ap in zip(report.per_query, aps):
        q.ap = ap
    report.map = sum(aps) / len(aps)
    return report


def test_compare_runs_percentages_and_order():
    high = _report_with_aps([0.0138, 0.0138])
    low = _report_with_aps([0.0042, 0.0042])
    table = compare_runs([low, high], ["low", "high"])
    lines = table.splitlines()
    assert "MAP" in lines[0]
    assert lines[1].startswith("high")
    assert "1.38" in lines[1]
    assert lines[2].startswith("low")
    assert "0.42" in lines[2]


def test_compare_runs_single_report():
    report = _report_with_aps([0.5])
    table = compare_runs([report], ["only"])
    assert len(table.splitlines()) == 2


def test_compare_runs_equal_map_sorted_by_name():
    a = _report_with_aps([0.25])
    b = _report_with_aps([0.25])
    table = compare_runs([b, a], ["zeta", "alpha"])
    lines = table.splitlines()
    assert lines[1].startswith("alpha")
    assert lines[2].startswith("zeta")


def test_compare_runs_topic_mismatch_warns():
    a = _report_with_aps([0.5])
    b = _report_with_aps([0.5, 0.5])
    with pytest.warns(UserWarning, match="topic sets"):
        compare_runs([a, b], ["a", "b"])


def test_format_report_shows_fraction_and_percent():
    report = _report_with_aps([0.0138])
    text = format_report(report, "demo")
    assert "0.013800" in text
    assert "1.38" in text


def test_per_query_tsv(tmp_path):
    report = evaluate_run([make_run("q", ["a"])], qrels_for("q", ["a"]))
    path = tmp_path / "pq.tsv"
    write_per_query_tsv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0].split("\t")[0] == "topic_id"
    assert lines[1].split("\t")[0] == "q"
    assert len(lines) == 2
