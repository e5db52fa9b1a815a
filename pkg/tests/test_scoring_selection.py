import json
import math
import random

import pytest

from qfs_forge.corpus import Cluster, Example
from qfs_forge.scoring import (TERM_NORM, ScoreFileError, load_external_cluster_scores, load_external_scores, score_all,
                               score_lead, score_query_sim, score_query_sim_cluster)
from qfs_forge.selection import (NO_THRESHOLD, ranking, redundant_fraction, search_threshold,
                                 select_multi_doc, select_single_doc, threshold_curve, word_count)
from qfs_forge.text import normalize, tokenize


def test_lead_scores():
    sc = score_lead(["a."] * 5)
    assert ranking(sc) == [0, 1, 2, 3, 4]
    doc = ["One here.", "Two here.", "Three here."]
    assert select_single_doc(sc.scores[:3], doc, max_sentences=2, block_trigrams=False) == [0, 1]
    assert ranking(score_lead(["only."])) == [0]
    with pytest.raises(ValueError):
        score_lead([])


def test_all_scores_keep_everything():
    doc = ["Same words here.", "Same words here.", "Other."]
    assert select_single_doc(score_all(doc), doc, block_trigrams=False) == [0, 1, 2]
    assert select_single_doc(score_all(["x."]), ["x."]) == [0]
    with pytest.raises(ValueError):
        score_all([])


A = math.log(4 / 3) + 1  # idf of a term in two of three sentences
B = math.log(2) + 1  # idf of a term in one of three sentences
QUERY = ["storm harbour"]
SENTS = ["storm harbour", "storm damage", "bridge repair"]


def test_query_sim_hand_values():
    scores = score_query_sim(QUERY, SENTS).scores
    assert scores[0] == pytest.approx(1.0)
    assert scores[1] == pytest.approx(A * A / (A * A + B * B))
    assert scores[1] == pytest.approx(0.366447, abs=1e-6)
    assert scores[2] == 0.0


def test_query_sim_matches_sklearn():
    from sklearn.feature_extraction.text import TfidfVectorizer

    rng = random.Random(5)
    vocab = "storm harbour bridge repair flood crew boat pier tide wind".split()
    for _ in range(50):
        doc = [" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 8))) for _ in range(rng.randint(1, 8))]
        query = [" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 4)))]
        terms = lambda s: normalize(tokenize(s), TERM_NORM)  # noqa: E731
        vec = TfidfVectorizer(analyzer=terms, smooth_idf=True, norm="l2")
        mat = vec.fit_transform(doc)
        q = vec.transform([" ".join(query)])
        expected = (mat @ q.T).toarray().ravel()
        assert score_query_sim(query, doc).scores == pytest.approx(list(expected), abs=1e-12)


def test_query_sim_cluster_pools_idf():
    docs = [["storm harbour", "storm damage"], ["bridge repair"]]
    assert score_query_sim_cluster(QUERY, docs) == [score_query_sim(QUERY, SENTS).scores[:2],
                                                    score_query_sim(QUERY, SENTS).scores[2:]]


def test_query_sim_needs_query():
    with pytest.raises(ValueError):
        score_query_sim([], ["a"])


def _write(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


DATA = [Example("e1", ["T"], ["a.", "b."], ["a."]), Example("e2", ["T"], ["c."], ["c."])]


def test_external_scores_roundtrip(tmp_path):
    f = _write(tmp_path / "s.jsonl", [{"id": "e1", "scores": [0.2, 0.1]}, {"id": "e2", "scores": [3]}])
    loaded = load_external_scores(f, DATA)
    assert loaded["e1"].scores == [0.2, 0.1] and loaded["e2"].scores == [3.0]


@pytest.mark.parametrize("records,kind", [
    ([{"id": "e1", "scores": [0.2]}, {"id": "e2", "scores": [1]}], "length_mismatch"),
    ([{"id": "e1", "scores": [0.2, 0.1]}, {"id": "e1", "scores": [0.2, 0.1]}], "duplicate_id"),
    ([{"id": "e1", "scores": [0.2, 0.1]}], "missing_id"),
    ([{"id": "e1", "scores": [0.2, 0.1]}, {"id": "zz", "scores": [1]}], "unknown_id"),
    ([{"id": "e1", "scores": [0.2, "x"]}], "bad_scores"),
])
def test_external_score_errors(tmp_path, records, kind):
    f = _write(tmp_path / "s.jsonl", records)
    with pytest.raises(ScoreFileError) as exc:
        load_external_scores(f, DATA)
    assert exc.value.kind == kind


def test_external_non_finite(tmp_path):
    f = tmp_path / "s.jsonl"
    f.write_text('{"id": "e1", "scores": [NaN, 1]}\n{"id": "e2", "scores": [1]}\n', encoding="utf-8")
    with pytest.raises(ScoreFileError) as exc:
        load_external_scores(f, DATA)
    assert (exc.value.kind, exc.value.record_id) == ("non_finite", "e1")


def test_external_cluster_scores(tmp_path):
    clusters = [Cluster("D1", ["q"], [["a.", "b."], ["c."]], [["a."]])]
    f = _write(tmp_path / "c.jsonl", [{"cluster_id": "D1", "doc_scores": [[1, 2], [3]]}])
    assert load_external_cluster_scores(f, clusters) == {"D1": [[1.0, 2.0], [3.0]]}
    f = _write(tmp_path / "c.jsonl", [{"cluster_id": "D1", "doc_scores": [[1, 2]]}])
    with pytest.raises(ScoreFileError, match="length_mismatch"):
        load_external_cluster_scores(f, clusters)


S1 = "the storm hit the harbour"
S2_OVERLAP = "when the storm hit the town"
S2_CLEAN = "rescue crews arrived later"


def test_single_doc_walkthroughs():
    assert select_single_doc([0.9, 0.8, 0.1], [S1, S2_OVERLAP, "x y z"], 0.5) == [0]
    assert select_single_doc([0.9, 0.8, 0.1], [S1, S2_CLEAN, "x y z"], 0.5) == [0, 1]
    assert select_single_doc([0.1, 0.2], ["a b", "c d"], 0.5) == []


def test_threshold_is_strict():
    assert select_single_doc([0.5, 0.6], ["a b", "c d"], 0.5) == [1]


def test_single_doc_ties_by_index():
    assert select_single_doc([0.5, 0.5, 0.5], ["a", "b", "c"]) == [0, 1, 2]
    assert ranking([0.1, 0.7, 0.7]) == [1, 2, 0]


def test_single_doc_length_check():
    with pytest.raises(ValueError):
        select_single_doc([0.1], ["a", "b"])


def test_multi_doc_single_sentence():
    sent = " ".join(f"w{i}" for i in range(10))
    assert select_multi_doc([[1.0]], [[sent]], 250) == [(0, 0)]


def test_multi_doc_bigram_half_rule():
    first = "a1 b1 c1 d1 e1"
    # 6 bigrams, 4 of them already in the summary
    skipped = "a1 b1 c1 d1 e1 x1 y1"
    # 6 bigrams, exactly 3 present: half is not more than half
    kept = "a1 b1 c1 d1 p1 q1 r1"
    assert redundant_fraction(skipped, {("a1", "b1"), ("b1", "c1"), ("c1", "d1"), ("d1", "e1")}) == 4 / 6
    assert select_multi_doc([[0.9, 0.8], [0.7]], [[first, skipped], [kept]]) == [(0, 0), (1, 0)]


def test_multi_doc_budget_stops():
    s240 = " ".join(f"a{i}" for i in range(240))
    s30 = " ".join(f"b{i}" for i in range(30))
    s5 = " ".join(f"c{i}" for i in range(5))
    picked = select_multi_doc([[0.9, 0.8], [0.1]], [[s240, s30], [s5]], 250)
    assert picked == [(0, 0)]
    assert word_count(s240) == 240


def test_multi_doc_ranks_across_documents():
    docs = [["alpha one"], ["beta two"], ["gamma three"]]
    assert select_multi_doc([[0.2], [0.9], [0.5]], docs) == [(1, 0), (2, 0), (0, 0)]


def test_rank_invariance_under_monotone_transform():
    rng = random.Random(11)
    words = "a b c d e f g h".split()
    for _ in range(100):
        doc = [" ".join(rng.choice(words) for _ in range(rng.randint(2, 8))) for _ in range(rng.randint(1, 8))]
        scores = [rng.random() for _ in doc]
        t = rng.random()
        transformed = [math.exp(3 * s) - 7 for s in scores]
        assert select_single_doc(scores, doc, t) == select_single_doc(transformed, doc, math.exp(3 * t) - 7)
        docs = [doc, doc[::-1]]
        assert select_multi_doc([scores, scores[::-1]], docs, 20) == select_multi_doc(
            [transformed, transformed[::-1]], docs, 20)


MATCH1 = "The harbour wall collapsed during the night storm."
OTHER1 = "Tourists visited the cathedral museum yesterday afternoon."
MATCH2 = "Engineers rebuilt the northern pier within six months."
OTHER2 = "Local bakers sold bread at the weekend market."
DEV = [Example("d1", ["T"], [MATCH1, OTHER1], [MATCH1]), Example("d2", ["T"], [OTHER2, MATCH2], [MATCH2])]
DEV_SCORES = {"d1": [0.9, 0.3], "d2": [0.6, 0.8]}


def test_threshold_search_finds_boundary():
    # -inf and 0.3 keep OTHER2 in the second summary, 0.8 empties it and 0.9
    # empties both; 0.6 keeps exactly the two matching sentences
    curve = {p.threshold: p.rouge2_f1 for p in threshold_curve(DEV, DEV_SCORES)}
    assert list(curve) == [NO_THRESHOLD, 0.3, 0.6, 0.8, 0.9]
    assert curve[0.6] == 1.0
    assert curve[0.8] == 0.5 and curve[0.9] == 0.0
    assert curve[NO_THRESHOLD] < 1.0 and curve[0.3] < 1.0
    assert search_threshold(DEV, DEV_SCORES) == 0.6
    assert search_threshold(DEV, DEV_SCORES) == 0.6


def test_threshold_search_all_equal_scores():
    scores = {"d1": [0.4, 0.4], "d2": [0.4, 0.4]}
    assert search_threshold(DEV, scores) == NO_THRESHOLD


def test_threshold_search_empty_dev():
    with pytest.raises(ValueError):
        search_threshold([], {})
