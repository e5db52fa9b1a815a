"""Turning statement/citation records into curated query-focused examples.

A raw record pairs a statement with the body of the first source it cites.
The statement becomes the summary, the citation body the document, and the
article title followed by the section titles the query. Curation then drops
examples whose summary is not plausibly derivable from the document.
"""

import hashlib
import json
import logging
import math
import random
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from html.parser import HTMLParser
from typing import Optional

from . import oracle
from .io import SchemaError
from .text import NormalizationConfig, normalize, split_sentences, tokenize

logger = logging.getLogger(__name__)

SOURCE_TYPES = ("web", "newspaper", "press", "press_release", "other")
ALLOWED_SOURCES = frozenset({"web", "newspaper", "press", "press_release"})

INGEST_REASONS = ("source_type", "empty_document", "empty_summary")
CURATION_REASONS = (
    "no_content_words",
    "unigram_recall",
    "doc_tokens",
    "doc_sentences",
    "summary_tokens",
    "summary_sentences",
    "oracle_score",
)
LENGTH_STATS = ("doc_tokens", "doc_sentences", "summary_tokens", "summary_sentences")

MIN_THRESHOLD_SAMPLE = 20

# content words only, stemmed in place of lemmatization
RECALL_NORM = NormalizationConfig(lowercase=True, apply_stemmer=True, drop_stopwords=True)
_STEM_ONLY = NormalizationConfig(lowercase=True, apply_stemmer=True, drop_stopwords=False)


class Rejected(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class InsufficientSample(ValueError):
    pass


def _require(d: dict, key: str, kind, where):
    if key not in d:
        raise SchemaError(f"missing field {key!r}", where)
    if not isinstance(d[key], kind):
        raise SchemaError(f"field {key!r} has the wrong type", where)
    return d[key]


def _str_list(d: dict, key: str, where) -> list:
    value = _require(d, key, list, where)
    if not all(isinstance(x, str) for x in value):
        raise SchemaError(f"field {key!r} must be a list of strings", where)
    return list(value)


@dataclass
class RawRecord:
    article_title: str
    section_path: list
    statement: str
    citation_body: str
    source_type: str
    url: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict, where=None) -> "RawRecord":
        known = {"article_title", "section_path", "statement", "citation_body", "source_type", "url"}
        extra = set(d) - known
        if extra:
            raise SchemaError(f"unknown fields {sorted(extra)}", where)
        source = _require(d, "source_type", str, where)
        if source not in SOURCE_TYPES:
            raise SchemaError(f"source_type {source!r} is not one of {list(SOURCE_TYPES)}", where)
        url = d.get("url")
        if url is not None and not isinstance(url, str):
            raise SchemaError("field 'url' must be a string", where)
        return cls(
            article_title=_require(d, "article_title", str, where),
            section_path=_str_list(d, "section_path", where),
            statement=_require(d, "statement", str, where),
            citation_body=_require(d, "citation_body", str, where),
            source_type=source,
            url=url,
        )


@dataclass
class Example:
    id: str
    query: list
    document: list
    summary: list
    meta: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict, where=None) -> "Example":
        meta = d.get("meta", {})
        if not isinstance(meta, dict):
            raise SchemaError("field 'meta' must be an object", where)
        ex = cls(
            id=_require(d, "id", str, where),
            query=_str_list(d, "query", where),
            document=_str_list(d, "document", where),
            summary=_str_list(d, "summary", where),
            meta=dict(meta),
        )
        if not ex.query:
            raise SchemaError("query must contain at least the article title", where)
        if not ex.document or not ex.summary:
            raise SchemaError("document and summary must be non-empty", where)
        if "doc_hash" not in ex.meta:
            ex.meta["doc_hash"] = doc_hash(ex.document)
        return ex

    @property
    def doc_hash(self) -> str:
        return self.meta.get("doc_hash") or doc_hash(self.document)


def _digest(payload) -> str:
    data = json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(data).hexdigest()[:16]


def example_id(query, document, summary) -> str:
    return _digest([query, document, summary])


def doc_hash(document) -> str:
    """Hash of the document's token stream, blind to case and spacing."""
    return _digest(tokenize(" ".join(document)))


def build_example(raw: RawRecord) -> Example:
    if raw.source_type not in ALLOWED_SOURCES:
        raise Rejected("source_type")
    document = split_sentences(raw.citation_body)
    if not document:
        raise Rejected("empty_document")
    summary = split_sentences(raw.statement)
    if not summary:
        raise Rejected("empty_summary")
    query = [raw.article_title.strip()] + [s.strip() for s in raw.section_path if s.strip()]
    meta = {
        "article_title": raw.article_title,
        "source_type": raw.source_type,
        "url": raw.url,
        "doc_hash": doc_hash(document),
    }
    return Example(example_id(query, document, summary), query, document, summary, meta)


def ingest(records):
    """Build examples from raw records; returns ``(examples, rejects)``.

    A reject is ``(record_label, reason)`` where the label is ``record-<n>``
    with ``n`` the zero-based position in the input.
    """
    examples, rejects = [], []
    for i, raw in enumerate(records):
        try:
            examples.append(build_example(raw))
        except Rejected as r:
            rejects.append((f"record-{i}", r.reason))
    return examples, rejects


def content_terms(sentences) -> set:
    toks = tokenize(" ".join(sentences))
    return set(normalize(toks, RECALL_NORM))


def unigram_recall(summary, document) -> float:
    summary_terms = content_terms(summary)
    if not summary_terms:
        return 1.0
    doc_terms = set(normalize(tokenize(" ".join(document)), _STEM_ONLY))
    return len(summary_terms & doc_terms) / len(summary_terms)


def length_stats(ex: Example) -> dict:
    return {
        "doc_tokens": sum(len(tokenize(s)) for s in ex.document),
        "doc_sentences": len(ex.document),
        "summary_tokens": sum(len(tokenize(s)) for s in ex.summary),
        "summary_sentences": len(ex.summary),
    }


@dataclass
class CurationThresholds:
    doc_tokens: tuple
    doc_sentences: tuple
    summary_tokens: tuple
    summary_sentences: tuple

    def __post_init__(self):
        for name in LENGTH_STATS:
            low, high = getattr(self, name)
            if not 0 < low <= high:
                raise ValueError(f"bad {name} range ({low}, {high})")
            setattr(self, name, (low, high))

    def to_dict(self) -> dict:
        return {name: list(getattr(self, name)) for name in LENGTH_STATS}

    @classmethod
    def from_dict(cls, d: dict) -> "CurationThresholds":
        return cls(**{name: tuple(d[name]) for name in LENGTH_STATS})


def nearest_rank(sorted_values, pct: float):
    rank = max(1, math.ceil(pct / 100.0 * len(sorted_values)))
    return sorted_values[rank - 1]


def compute_thresholds(examples, cap: int = 1000, low_pct: float = 5, high_pct: float = 95) -> CurationThresholds:
    """5th/95th nearest-rank percentiles of the four length statistics,
    measured only over examples whose document has at most ``cap`` tokens."""
    population = [s for s in map(length_stats, examples) if s["doc_tokens"] <= cap]
    if len(population) < MIN_THRESHOLD_SAMPLE:
        raise InsufficientSample(
            f"need at least {MIN_THRESHOLD_SAMPLE} examples with <= {cap} document tokens, got {len(population)}")
    bounds = {}
    for name in LENGTH_STATS:
        values = sorted(s[name] for s in population)
        bounds[name] = (nearest_rank(values, low_pct), nearest_rank(values, high_pct))
    return CurationThresholds(**bounds)


@dataclass
class CurationConfig:
    thresholds: Optional[CurationThresholds] = None
    recall_threshold: float = 0.5
    oracle_threshold: float = 0.2
    stats_doc_token_cap: int = 1000

    def to_dict(self) -> dict:
        return {
            "recall_threshold": self.recall_threshold,
            "oracle_threshold": self.oracle_threshold,
            "stats_doc_token_cap": self.stats_doc_token_cap,
            "thresholds": self.thresholds.to_dict() if self.thresholds else None,
        }


def check_example(ex: Example, config: CurationConfig) -> Optional[str]:
    """Name of the first curation rule ``ex`` fails, or None if it passes."""
    if config.thresholds is None:
        raise ValueError("curation thresholds must be computed before filtering")
    if not content_terms(ex.summary):
        return "no_content_words"
    if unigram_recall(ex.summary, ex.document) < config.recall_threshold:
        return "unigram_recall"
    stats = length_stats(ex)
    for name in LENGTH_STATS:
        low, high = getattr(config.thresholds, name)
        if not low <= stats[name] <= high:
            return name
    result = oracle.greedy_oracle(ex.document, ex.summary, oracle.CURATION)
    if not result.oracle_score > config.oracle_threshold:
        return "oracle_score"
    return None


def _check_task(args):
    ex, config = args
    return check_example(ex, config)


def curate(examples, config: CurationConfig, jobs: int = 1):
    """Filter ``examples``; returns ``(kept, rejects)`` with rejects as
    ``(id, reason)`` pairs. Input order is preserved in both lists."""
    examples = list(examples)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reasons = list(pool.map(_check_task, [(ex, config) for ex in examples], chunksize=16))
    else:
        reasons = [check_example(ex, config) for ex in examples]
    kept, rejects = [], []
    for ex, reason in zip(examples, reasons):
        if reason is None:
            kept.append(ex)
        else:
            rejects.append((ex.id, reason))
    return kept, rejects


def largest_remainder(total: int, ratios) -> list[int]:
    quotas = [total * r for r in ratios]
    counts = [math.floor(q) for q in quotas]
    leftover = total - sum(counts)
    # biggest fractional parts first, earlier split wins a tie
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def split(examples, ratios=(0.8, 0.1, 0.1), seed: int = 0):
    """Random train/dev/test split in which no document spans two splits.

    Examples are grouped by ``doc_hash``; whole groups are shuffled with the
    seed and dealt out so each split receives its largest-remainder share of
    groups. Inside a split the input order is kept.
    """
    ratios = tuple(ratios)
    if any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be positive and sum to 1, got {ratios}")
    examples = list(examples)
    groups = defaultdict(list)
    for pos, ex in enumerate(examples):
        groups[ex.doc_hash].append(pos)
    keys = sorted(groups)
    if len(keys) < len(ratios):
        raise ValueError(f"{len(keys)} document groups cannot fill {len(ratios)} splits")
    random.Random(seed).shuffle(keys)
    counts = largest_remainder(len(keys), ratios)
    assignment = {}
    start = 0
    for split_index, count in enumerate(counts):
        for key in keys[start:start + count]:
            assignment[key] = split_index
        start += count
    out = [[] for _ in ratios]
    for ex in examples:
        out[assignment[ex.doc_hash]].append(ex)
    return tuple(out)


STATS_ROWS = (
    ("examples", "Total Examples"),
    ("articles", "Wiki Articles"),
    ("doc_tokens", "Doc. Tokens"),
    ("doc_sentences", "Doc. Sents"),
    ("summary_tokens", "Summary Tokens"),
    ("summary_sentences", "Summary Sents"),
    ("query_depth", "Query Depth"),
    ("query_tokens", "Query Tokens"),
)


def _split_stats(examples) -> dict:
    if not examples:
        return {key: 0 for key, _ in STATS_ROWS}
    per = [length_stats(ex) for ex in examples]
    n = len(examples)

    def mean(values):
        return math.fsum(values) / n

    return {
        "examples": n,
        "articles": len({ex.query[0] for ex in examples}),
        "doc_tokens": mean(s["doc_tokens"] for s in per),
        "doc_sentences": mean(s["doc_sentences"] for s in per),
        "summary_tokens": mean(s["summary_tokens"] for s in per),
        "summary_sentences": mean(s["summary_sentences"] for s in per),
        "query_depth": mean(len(ex.query) for ex in examples),
        "query_tokens": mean(sum(len(tokenize(q)) for q in ex.query) for ex in examples),
    }


@dataclass
class StatsReport:
    splits: dict
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"splits": self.splits, "warnings": self.warnings}

    def _cells(self, key, value):
        if key in ("examples", "articles"):
            return f"{int(value):,}"
        return f"{value:.1f}"

    def to_text(self) -> str:
        names = list(self.splits)
        width = max(len(label) for _, label in STATS_ROWS) + 2
        lines = [" " * width + "".join(f"{n:>12}" for n in names)]
        for key, label in STATS_ROWS:
            row = "".join(f"{self._cells(key, self.splits[n][key]):>12}" for n in names)
            lines.append(f"{label:<{width}}{row}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        names = list(self.splits)
        lines = ["\t".join(["statistic"] + names)]
        for key, _ in STATS_ROWS:
            vals = []
            for n in names:
                v = self.splits[n][key]
                vals.append(str(int(v)) if key in ("examples", "articles") else f"{v:.4f}")
            lines.append("\t".join([key] + vals))
        return "\n".join(lines) + "\n"


def stats(dataset) -> StatsReport:
    """Table-1 style statistics. ``dataset`` maps split name to examples;
    a plain list is reported as a single ``all`` split."""
    if not isinstance(dataset, dict):
        dataset = {"all": list(dataset)}
    if not dataset:
        raise ValueError("no splits to report")
    splits, warnings = {}, []
    for name, examples in dataset.items():
        examples = list(examples)
        if not examples:
            msg = f"split {name!r} is empty"
            logger.warning(msg)
            warnings.append(msg)
        splits[name] = _split_stats(examples)
    return StatsReport(splits, warnings)


class _TextExtractor(HTMLParser):
    _SKIP = {"script", "style", "noscript", "head", "nav", "footer"}
    _BLOCK = {"p", "div", "br", "li", "h1", "h2", "h3", "h4", "h5", "h6", "tr", "section", "article"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
        elif tag in self._BLOCK:
            self.parts.append("\n\n")

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1
        elif tag in self._BLOCK:
            self.parts.append("\n\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)


def html_to_text(html: str) -> str:
    """Best-effort tag stripping; no boilerplate detection."""
    parser = _TextExtractor()
    parser.feed(html)
    parser.close()
    paragraphs = []
    for block in "".join(parser.parts).split("\n\n"):
        block = " ".join(block.split())
        if block:
            paragraphs.append(block)
    return "\n\n".join(paragraphs)


@dataclass
class Cluster:
    """A DUC-style topic: one query, several documents, human references."""

    cluster_id: str
    query: list
    documents: list
    references: list

    def to_record(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict, where=None) -> "Cluster":
        documents = _require(d, "documents", list, where)
        references = _require(d, "references", list, where)
        for group, name in ((documents, "documents"), (references, "references")):
            for item in group:
                if not isinstance(item, list) or not all(isinstance(s, str) for s in item):
                    raise SchemaError(f"field {name!r} must be a list of sentence lists", where)
        if not documents:
            raise SchemaError("a cluster needs at least one document", where)
        return cls(
            cluster_id=_require(d, "cluster_id", str, where),
            query=_str_list(d, "query", where),
            documents=[list(doc) for doc in documents],
            references=[list(ref) for ref in references],
        )
