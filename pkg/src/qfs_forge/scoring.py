"""Sentence scorers.

Every scorer, native or external, produces one real number per document
sentence; selection only looks at those numbers.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .text import NormalizationConfig, normalize, tokenize

TERM_NORM = NormalizationConfig(lowercase=True, apply_stemmer=True, drop_stopwords=True)


@dataclass
class SentenceScores:
    example_id: str
    scores: list

    def __post_init__(self):
        self.scores = [float(s) for s in self.scores]


class ScoreFileError(ValueError):
    def __init__(self, kind: str, record_id=None, detail: str = ""):
        self.kind = kind
        self.record_id = record_id
        msg = kind if record_id is None else f"{kind}: {record_id}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


def score_lead(document, example_id: str = "") -> SentenceScores:
    if not document:
        raise ValueError("cannot score an empty document")
    return SentenceScores(example_id, [1.0 / (i + 1) for i in range(len(document))])


def score_all(document, example_id: str = "") -> SentenceScores:
    if not document:
        raise ValueError("cannot score an empty document")
    return SentenceScores(example_id, [1.0] * len(document))


def _terms(text: str) -> list[str]:
    return normalize(tokenize(text), TERM_NORM)


def _tfidf_cosines(query_terms, sentence_terms) -> list[float]:
    n = len(sentence_terms)
    df = Counter()
    for terms in sentence_terms:
        df.update(set(terms))
    # smoothed idf; query terms absent from every sentence carry no weight
    idf = {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in df.items()}

    def vector(terms):
        tf = Counter(t for t in terms if t in idf)
        return {t: c * idf[t] for t, c in tf.items()}

    q = vector(query_terms)
    q_norm = math.sqrt(math.fsum(v * v for v in q.values()))
    out = []
    for terms in sentence_terms:
        s = vector(terms)
        s_norm = math.sqrt(math.fsum(v * v for v in s.values()))
        if q_norm == 0.0 or s_norm == 0.0:
            out.append(0.0)
            continue
        dot = math.fsum(w * s[t] for t, w in q.items() if t in s)
        out.append(min(1.0, dot / (q_norm * s_norm)))
    return out


def score_query_sim(query, document, example_id: str = "") -> SentenceScores:
    """TF-IDF cosine between each sentence and the flattened query, with IDF
    taken over the document's own sentences."""
    if not query:
        raise ValueError("query-similarity scoring needs a non-empty query")
    query_terms = _terms(" ".join(query))
    return SentenceScores(example_id, _tfidf_cosines(query_terms, [_terms(s) for s in document]))


def score_query_sim_cluster(query, documents) -> list[list[float]]:
    """Same as :func:`score_query_sim` but IDF spans every sentence of every
    document in the cluster."""
    if not query:
        raise ValueError("query-similarity scoring needs a non-empty query")
    query_terms = _terms(" ".join(query))
    flat = [_terms(s) for doc in documents for s in doc]
    cos = _tfidf_cosines(query_terms, flat)
    out, pos = [], 0
    for doc in documents:
        out.append(cos[pos:pos + len(doc)])
        pos += len(doc)
    return out


def _finite_list(value, record_id):
    if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ScoreFileError("bad_scores", record_id, "scores must be a list of numbers")
    if not all(math.isfinite(v) for v in value):
        raise ScoreFileError("non_finite", record_id)
    return [float(v) for v in value]


def _read_lines(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"score file not found: {path}")
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                raise ScoreFileError("invalid_json", f"line {lineno}") from None
            if not isinstance(rec, dict):
                raise ScoreFileError("invalid_json", f"line {lineno}")
            yield lineno, rec


def load_external_scores(path, dataset) -> dict:
    """Read ``{"id", "scores"}`` lines produced by an out-of-repo scorer and
    check them against ``dataset`` (a list of examples)."""
    expected = {ex.id: len(ex.document) for ex in dataset}
    out = {}
    for lineno, rec in _read_lines(path):
        rid = rec.get("id")
        if not isinstance(rid, str):
            raise ScoreFileError("missing_id", f"line {lineno}")
        if rid in out:
            raise ScoreFileError("duplicate_id", rid)
        if rid not in expected:
            raise ScoreFileError("unknown_id", rid)
        scores = _finite_list(rec.get("scores"), rid)
        if len(scores) != expected[rid]:
            raise ScoreFileError("length_mismatch", rid, f"{len(scores)} scores for {expected[rid]} sentences")
        out[rid] = SentenceScores(rid, scores)
    missing = sorted(set(expected) - set(out))
    if missing:
        raise ScoreFileError("missing_id", missing[0])
    return out


def load_external_cluster_scores(path, clusters) -> dict:
    """Multi-document variant: ``{"cluster_id", "doc_scores": [[float]]}``."""
    expected = {c.cluster_id: [len(d) for d in c.documents] for c in clusters}
    out = {}
    for lineno, rec in _read_lines(path):
        cid = rec.get("cluster_id")
        if not isinstance(cid, str):
            raise ScoreFileError("missing_id", f"line {lineno}")
        if cid in out:
            raise ScoreFileError("duplicate_id", cid)
        if cid not in expected:
            raise ScoreFileError("unknown_id", cid)
        doc_scores = rec.get("doc_scores")
        if not isinstance(doc_scores, list):
            raise ScoreFileError("bad_scores", cid, "doc_scores must be a list of lists")
        doc_scores = [_finite_list(d, cid) for d in doc_scores]
        if [len(d) for d in doc_scores] != expected[cid]:
            raise ScoreFileError("length_mismatch", cid)
        out[cid] = doc_scores
    missing = sorted(set(expected) - set(out))
    if missing:
        raise ScoreFileError("missing_id", missing[0])
    return out
