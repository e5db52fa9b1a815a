"""ROUGE-N and summary-level ROUGE-L.

Candidates and references are lists of sentences. A sentence may be given as
raw text (it is tokenized here) or as an already tokenized sequence. Tokens
are lowercased and, when the config asks for it, Porter-stemmed the way
ROUGE-1.5.5 does under ``-m``.

N-grams are counted over the whole summary, so a bigram may straddle two
sentences, as in the perl script which joins summary lines before counting.
"""

import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

from .text import NormalizationConfig, normalize, tokenize

Sentence = Union[str, Sequence[str]]

AGGREGATIONS = ("average", "max")
STATISTICS = ("recall", "f1", "all")


class InvalidEvaluationPair(ValueError):
    """A candidate/reference pair that cannot be scored."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"pair {index}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class RougeConfig:
    n_values: tuple = (1, 2)
    include_rouge_l: bool = True
    apply_stemmer: bool = True
    length_limit_words: Optional[int] = None
    f_alpha: float = 0.5
    reference_aggregation: str = "average"
    reported_statistic: str = "f1"
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(sorted(set(self.n_values))))
        if not self.n_values or min(self.n_values) < 1:
            raise ValueError(f"n_values must be positive integers, got {self.n_values}")
        if not 0.0 <= self.f_alpha <= 1.0:
            raise ValueError(f"f_alpha must lie in [0, 1], got {self.f_alpha}")
        if self.length_limit_words is not None and self.length_limit_words < 1:
            raise ValueError("length_limit_words must be a positive integer")
        if self.reference_aggregation not in AGGREGATIONS:
            raise ValueError(f"unknown reference_aggregation {self.reference_aggregation!r}")
        if self.reported_statistic not in STATISTICS:
            raise ValueError(f"unknown reported_statistic {self.reported_statistic!r}")

    @property
    def metrics(self) -> list[str]:
        names = [f"rouge-{n}" for n in self.n_values]
        if self.include_rouge_l:
            names.append("rouge-l")
        return names

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        return d


# -n 2 -x -m -2 4 -u -c 95 -r 1000 -f A -p 0.5 -t 0 -l 250, point estimates only
DUC = RougeConfig(
    n_values=(1, 2),
    include_rouge_l=False,
    apply_stemmer=True,
    length_limit_words=250,
    f_alpha=0.5,
    reference_aggregation="average",
    reported_statistic="recall",
    name="duc",
)

# -n 2 -m -c 95 -r 1000
WIKIREF = RougeConfig(
    n_values=(1, 2),
    include_rouge_l=True,
    apply_stemmer=True,
    length_limit_words=None,
    f_alpha=0.5,
    reference_aggregation="average",
    reported_statistic="f1",
    name="wikiref",
)

PRESETS = {"duc": DUC, "wikiref": WIKIREF}


def get_preset(name: str) -> RougeConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown ROUGE preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float

    def get(self, statistic: str) -> float:
        return {"recall": self.recall, "precision": self.precision, "f1": self.f1}[statistic]


def f_measure(precision: float, recall: float, alpha: float = 0.5) -> float:
    """F = 1 / (alpha / P + (1 - alpha) / R), the ROUGE-1.5.5 ``-p`` weighting."""
    if alpha == 0.0:
        return recall
    if alpha == 1.0:
        return precision
    if precision <= 0.0 or recall <= 0.0:
        return 0.0
    return 1.0 / (alpha / precision + (1.0 - alpha) / recall)


def _score(hits: int, ref_total: int, cand_total: int, alpha: float) -> RougeScore:
    recall = hits / ref_total if ref_total else 0.0
    precision = hits / cand_total if cand_total else 0.0
    # f_measure rewritten over counts: one division, so F1 is correctly rounded
    if hits == 0:
        f = 0.0
    elif alpha == 0.0:
        f = recall
    elif alpha == 1.0:
        f = precision
    else:
        f = hits / (alpha * cand_total + (1.0 - alpha) * ref_total)
    return RougeScore(recall, precision, f)


def _norm_config(config: RougeConfig) -> NormalizationConfig:
    return NormalizationConfig(lowercase=True, apply_stemmer=config.apply_stemmer, drop_stopwords=False)


def prepare(sentences: Sequence[Sentence], config: RougeConfig, truncate: bool = False) -> list[list[str]]:
    """Tokenize and normalize a summary; ``truncate`` applies the word limit."""
    norm = _norm_config(config)
    out = []
    budget = config.length_limit_words if truncate else None
    for sent in sentences:
        toks = tokenize(sent) if isinstance(sent, str) else list(sent)
        if budget is not None:
            toks = toks[:budget]
            budget -= len(toks)
        out.append(normalize(toks, norm))
        if budget is not None and budget <= 0:
            break
    return out


def _flat(sentences: list[list[str]]) -> list[str]:
    return [tok for sent in sentences for tok in sent]


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _aggregate(scores: list[RougeScore], how: str) -> RougeScore:
    if how == "max":
        # first reference wins ties
        return max(scores, key=lambda s: s.f1)
    k = len(scores)
    return RougeScore(
        math.fsum(s.recall for s in scores) / k,
        math.fsum(s.precision for s in scores) / k,
        math.fsum(s.f1 for s in scores) / k,
    )


def _check_refs(references):
    if not references:
        raise InvalidEvaluationPair("at least one reference summary is required")


def summary_ngrams(sentences: list[list[str]], n: int, within_sentences: bool = False) -> Counter:
    """N-gram counts of a prepared summary. By default the summary is one
    token stream; ``within_sentences`` keeps every n-gram inside a sentence."""
    if not within_sentences:
        return _ngram_counts(_flat(sentences), n)
    counts = Counter()
    for sent in sentences:
        counts.update(_ngram_counts(sent, n))
    return counts


def rouge_n_tokens(cand: list[list[str]], refs: list[list[list[str]]], n: int, alpha: float, how: str,
                   within_sentences: bool = False) -> RougeScore:
    """ROUGE-N on already prepared (normalized, truncated) summaries."""
    cand_grams = summary_ngrams(cand, n, within_sentences)
    cand_total = sum(cand_grams.values())
    scores = []
    for ref in refs:
        ref_grams = summary_ngrams(ref, n, within_sentences)
        hits = sum((cand_grams & ref_grams).values())
        scores.append(_score(hits, sum(ref_grams.values()), cand_total, alpha))
    return _aggregate(scores, how)


def rouge_n(candidate: Sequence[Sentence], references: Sequence[Sequence[Sentence]], n: int,
            config: RougeConfig = WIKIREF) -> RougeScore:
    _check_refs(references)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    cand = prepare(candidate, config, truncate=True)
    refs = [prepare(ref, config) for ref in references]
    return rouge_n_tokens(cand, refs, n, config.f_alpha, config.reference_aggregation)


def lcs_table(a: Sequence[str], b: Sequence[str]) -> list[list[int]]:
    rows, cols = len(a), len(b)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        ai = a[i - 1]
        prev, cur = table[i - 1], table[i]
        for j in range(1, cols + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
    return table


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    return lcs_table(a, b)[len(a)][len(b)]


def _lcs_ref_positions(cand: Sequence[str], ref: Sequence[str]) -> list[int]:
    """Positions in ``ref`` covered by one longest common subsequence."""
    table = lcs_table(cand, ref)
    i, j = len(cand), len(ref)
    hits = []
    while i > 0 and j > 0:
        if cand[i - 1] == ref[j - 1]:
            hits.append(j - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] > table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    hits.reverse()
    return hits


def _union_lcs_hits(cand: list[list[str]], ref: list[list[str]]) -> int:
    # summary-level LCS: union the per-sentence LCS matches for every
    # reference sentence, then clip each hit by the remaining token counts
    cand_counts = Counter(_flat(cand))
    ref_counts = Counter(_flat(ref))
    hits = 0
    for ref_sent in ref:
        covered = set()
        for cand_sent in cand:
            covered.update(_lcs_ref_positions(cand_sent, ref_sent))
        for pos in sorted(covered):
            tok = ref_sent[pos]
            if cand_counts[tok] > 0 and ref_counts[tok] > 0:
                hits += 1
                cand_counts[tok] -= 1
                ref_counts[tok] -= 1
    return hits


def rouge_l_tokens(cand: list[list[str]], refs: list[list[list[str]]], alpha: float, how: str) -> RougeScore:
    cand_total = sum(len(s) for s in cand)
    scores = []
    for ref in refs:
        hits = _union_lcs_hits(cand, ref)
        scores.append(_score(hits, sum(len(s) for s in ref), cand_total, alpha))
    return _aggregate(scores, how)


def rouge_l(candidate: Sequence[Sentence], references: Sequence[Sequence[Sentence]],
            config: RougeConfig = WIKIREF) -> RougeScore:
    _check_refs(references)
    cand = prepare(candidate, config, truncate=True)
    refs = [prepare(ref, config) for ref in references]
    return rouge_l_tokens(cand, refs, config.f_alpha, config.reference_aggregation)


def score_summary(candidate, references, config: RougeConfig = WIKIREF) -> dict[str, RougeScore]:
    """Every metric the config asks for, keyed ``rouge-1``, ``rouge-2``, ``rouge-l``."""
    _check_refs(references)
    cand = prepare(candidate, config, truncate=True)
    refs = [prepare(ref, config) for ref in references]
    out = {}
    for n in config.n_values:
        out[f"rouge-{n}"] = rouge_n_tokens(cand, refs, n, config.f_alpha, config.reference_aggregation)
    if config.include_rouge_l:
        out["rouge-l"] = rouge_l_tokens(cand, refs, config.f_alpha, config.reference_aggregation)
    return out


@dataclass
class RougeReport:
    config: RougeConfig
    n_examples: int
    means: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {
                "metric": metric,
                "recall": s.recall,
                "precision": s.precision,
                "f1": s.f1,
                "n_examples": self.n_examples,
                "preset": self.config.name,
            }
            for metric, s in self.means.items()
        ]

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "n_examples": self.n_examples, "scores": self.rows()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        header = ("metric", "recall", "precision", "f1", "n_examples", "preset")
        lines = ["{:<8} {:>9} {:>9} {:>9} {:>10} {:>8}".format(*header)]
        for r in self.rows():
            lines.append("{:<8} {:>9.5f} {:>9.5f} {:>9.5f} {:>10d} {:>8}".format(
                r["metric"], r["recall"], r["precision"], r["f1"], r["n_examples"], r["preset"]))
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        header = ["metric", "recall", "precision", "f1", "n_examples", "preset"]
        lines = ["\t".join(header)]
        for r in self.rows():
            lines.append("\t".join(
                [r["metric"], f"{r['recall']:.6f}", f"{r['precision']:.6f}", f"{r['f1']:.6f}",
                 str(r["n_examples"]), r["preset"]]))
        return "\n".join(lines) + "\n"

    def headline(self) -> str:
        stat = self.config.reported_statistic
        stats = ("recall", "precision", "f1") if stat == "all" else (stat,)
        parts = []
        for metric, s in self.means.items():
            vals = " ".join(f"{k[0].upper()}={100 * s.get(k):.2f}" for k in stats)
            parts.append(f"{metric.upper()} {vals}")
        return f"[{self.config.name}] " + "  ".join(parts)


def _score_pair(args):
    index, candidate, references, config = args
    if not references:
        raise InvalidEvaluationPair("no reference summaries", index)
    for ref in references:
        if not isinstance(ref, (list, tuple)):
            raise InvalidEvaluationPair("a reference must be a list of sentences", index)
    if not isinstance(candidate, (list, tuple)):
        raise InvalidEvaluationPair("the candidate must be a list of sentences", index)
    return score_summary(candidate, references, config)


def evaluate_corpus(pairs, config: RougeConfig = WIKIREF, jobs: int = 1) -> RougeReport:
    """Mean of per-example scores over ``(candidate, references)`` pairs."""
    pairs = list(pairs)
    if not pairs:
        raise InvalidEvaluationPair("no pairs to evaluate")
    tasks = [(i, cand, refs, config) for i, (cand, refs) in enumerate(pairs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_example = list(pool.map(_score_pair, tasks, chunksize=32))
    else:
        per_example = [_score_pair(t) for t in tasks]
    k = len(per_example)
    means = {}
    for metric in config.metrics:
        means[metric] = RougeScore(
            math.fsum(ex[metric].recall for ex in per_example) / k,
            math.fsum(ex[metric].precision for ex in per_example) / k,
            math.fsum(ex[metric].f1 for ex in per_example) / k,
        )
    return RougeReport(config=config, n_examples=k, means=means)
