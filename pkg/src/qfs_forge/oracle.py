"""Greedy extractive oracle and per-sentence oracle scores.

The oracle grows a sentence set one sentence at a time: each round tries every
unselected sentence as an extension of the current best set and keeps the one
that scores highest against the reference. The search stops as soon as a
round fails to improve strictly on the previous one, or at the size cap.

Bigrams are counted inside sentences only. A candidate set is a set, so its
score must not depend on which sentences happen to sit next to each other;
it also means a set can only score above zero if one of its members does.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .rouge import RougeConfig, prepare, rouge_n_tokens

METRICS = {"rouge2_f1": "f1", "rouge2_recall": "recall"}

# bigram overlap with stemming, no length limit
ORACLE_ROUGE = RougeConfig(n_values=(2,), include_rouge_l=False, apply_stemmer=True, name="oracle")


@dataclass(frozen=True)
class OracleConfig:
    metric: str = "rouge2_f1"
    max_sentences: int = 4

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown oracle metric {self.metric!r}")
        if self.max_sentences < 1:
            raise ValueError("max_sentences must be at least 1")


# curation feasibility filter: ROUGE-2 recall, up to 5 sentences
CURATION = OracleConfig(metric="rouge2_recall", max_sentences=5)
# supervision labels: ROUGE-2 F1, up to 4 sentences
TRAINING = OracleConfig(metric="rouge2_f1", max_sentences=4)

PROFILES = {"curation": CURATION, "training": TRAINING}


@dataclass
class OracleResult:
    selected_indices: list
    oracle_score: float
    labels: list
    sentence_scores: list
    round_scores: list = field(default_factory=list)

    def to_record(self, example_id: str) -> dict:
        return {
            "id": example_id,
            "oracle_indices": list(self.selected_indices),
            "oracle_score": self.oracle_score,
            "labels": list(self.labels),
            "scores": list(self.sentence_scores),
        }


class _Scorer:
    def __init__(self, document, reference, metric):
        if not document:
            raise ValueError("cannot build an oracle for an empty document")
        if not reference:
            raise ValueError("cannot build an oracle against an empty reference")
        self.doc = prepare(document, ORACLE_ROUGE)
        self.ref = [prepare(reference, ORACLE_ROUGE)]
        self.stat = METRICS[metric]

    def __call__(self, indices) -> float:
        cand = [self.doc[i] for i in sorted(indices)]
        return rouge_n_tokens(cand, self.ref, 2, ORACLE_ROUGE.f_alpha, "average",
                              within_sentences=True).get(self.stat)


def sentence_oracle_scores(document, reference, metric: str = "rouge2_f1") -> list[float]:
    score = _Scorer(document, reference, metric)
    return [score([i]) for i in range(len(document))]


def _result(selected, best, n, sentence_scores, rounds):
    labels = [0] * n
    for i in selected:
        labels[i] = 1
    return OracleResult(selected, best, labels, sentence_scores, rounds)


def greedy_oracle(document, reference, config: OracleConfig = TRAINING) -> OracleResult:
    score = _Scorer(document, reference, config.metric)
    n = len(document)
    singles = [score([i]) for i in range(n)]

    selected = []
    best = 0.0
    rounds = []
    while len(selected) < config.max_sentences:
        round_best = -1.0
        round_pick = None
        for i in range(n):
            if i in selected:
                continue
            s = singles[i] if not selected else score(selected + [i])
            # strict comparison keeps the lowest index on ties
            if s > round_best:
                round_best, round_pick = s, i
        if round_pick is None or round_best <= best:
            break
        selected.append(round_pick)
        best = round_best
        rounds.append(round_best)
    return _result(selected, best, n, singles, rounds)


def exhaustive_oracle(document, reference, config: OracleConfig = TRAINING) -> OracleResult:
    """Best subset of at most ``max_sentences`` sentences by brute force.

    Exponential; only meant for short documents in tests and audits.
    """
    score = _Scorer(document, reference, config.metric)
    n = len(document)
    best, best_set = 0.0, ()
    for k in range(1, min(config.max_sentences, n) + 1):
        for combo in combinations(range(n), k):
            s = score(combo)
            if s > best:
                best, best_set = s, combo
    singles = [score([i]) for i in range(n)]
    return _result(list(best_set), best, n, singles, [best] if best_set else [])
