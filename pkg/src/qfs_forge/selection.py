"""Turning sentence scores into summaries.

Single-document mode walks sentences by descending score, keeps those above a
threshold and blocks any sentence that repeats a trigram already in the
summary. Multi-document mode ranks every sentence of a cluster together,
skips a sentence when more than half of its bigrams are already in the
summary, and stops before the word budget would be exceeded.

Redundancy is judged on lowercased, unstemmed tokens.
"""

import math
from dataclasses import dataclass

from .rouge import WIKIREF, prepare, rouge_n_tokens
from .scoring import SentenceScores
from .text import tokenize

NO_THRESHOLD = -math.inf


def _values(scores):
    return list(scores.scores) if isinstance(scores, SentenceScores) else list(scores)


def _grams(sentence, n: int) -> set:
    toks = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
    return {tuple(toks[i:i + n]) for i in range(len(toks) - n + 1)}


def ranking(scores) -> list[int]:
    """Indices by descending score; the lower index wins a tie."""
    values = _values(scores)
    return sorted(range(len(values)), key=lambda i: (-values[i], i))


def select_single_doc(scores, document, threshold=None, *, max_sentences=None, block_trigrams=True) -> list[int]:
    values = _values(scores)
    if len(values) != len(document):
        raise ValueError(f"{len(values)} scores for {len(document)} sentences")
    if threshold is None:
        threshold = NO_THRESHOLD
    selected = []
    seen = set()
    for i in ranking(values):
        if not values[i] > threshold:
            break
        if max_sentences is not None and len(selected) >= max_sentences:
            break
        grams = _grams(document[i], 3)
        if block_trigrams and grams & seen:
            continue
        selected.append(i)
        seen |= grams
    return selected


def redundant_fraction(sentence, summary_bigrams: set) -> float:
    grams = _grams(sentence, 2)
    if not grams:
        return 0.0
    return len(grams & summary_bigrams) / len(grams)


def word_count(sentence) -> int:
    return len(tokenize(sentence)) if isinstance(sentence, str) else len(sentence)


def select_multi_doc(cluster_scores, documents, word_budget: int = 250) -> list[tuple]:
    """Greedy cross-document selection; returns ``(doc_index, sentence_index)``
    pairs in selection order."""
    if len(cluster_scores) != len(documents):
        raise ValueError(f"scores for {len(cluster_scores)} documents, cluster has {len(documents)}")
    candidates = []
    for d, (scores, doc) in enumerate(zip(cluster_scores, documents)):
        values = _values(scores)
        if len(values) != len(doc):
            raise ValueError(f"document {d}: {len(values)} scores for {len(doc)} sentences")
        candidates.extend((-v, d, s) for s, v in enumerate(values))
    candidates.sort()

    selected = []
    used = 0
    summary_bigrams = set()
    for _, d, s in candidates:
        sentence = documents[d][s]
        if redundant_fraction(sentence, summary_bigrams) > 0.5:
            continue
        words = word_count(sentence)
        if used + words > word_budget:
            break
        selected.append((d, s))
        used += words
        summary_bigrams |= _grams(sentence, 2)
    return selected


@dataclass
class ThresholdPoint:
    threshold: float
    rouge2_f1: float


def threshold_curve(dev_examples, dev_scores) -> list[ThresholdPoint]:
    """Mean ROUGE-2 F1 of single-document selection at every candidate
    threshold: no threshold, then each distinct observed score."""
    dev_examples = list(dev_examples)
    if not dev_examples:
        raise ValueError("the development set is empty")
    vectors = []
    for ex in dev_examples:
        sc = dev_scores[ex.id]
        values = _values(sc)
        if len(values) != len(ex.document):
            raise ValueError(f"{ex.id}: {len(values)} scores for {len(ex.document)} sentences")
        vectors.append(values)
    docs = [prepare(ex.document, WIKIREF) for ex in dev_examples]
    refs = [[prepare(ex.summary, WIKIREF)] for ex in dev_examples]
    grid = [NO_THRESHOLD] + sorted({v for values in vectors for v in values})

    curve = []
    for t in grid:
        per_example = []
        for ex, values, doc, ref in zip(dev_examples, vectors, docs, refs):
            picked = select_single_doc(values, ex.document, t)
            cand = [doc[i] for i in picked]
            per_example.append(rouge_n_tokens(cand, ref, 2, WIKIREF.f_alpha, WIKIREF.reference_aggregation).f1)
        curve.append(ThresholdPoint(t, math.fsum(per_example) / len(per_example)))
    return curve


def search_threshold(dev_examples, dev_scores) -> float:
    """Grid point with the best mean ROUGE-2 F1; the smaller threshold wins ties."""
    best = None
    for point in threshold_curve(dev_examples, dev_scores):
        if best is None or point.rouge2_f1 > best.rouge2_f1:
            best = point
    return best.threshold
