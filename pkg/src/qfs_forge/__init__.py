"""Query-focused summarization corpus building, oracle labelling, sentence
selection and ROUGE evaluation."""

from .corpus import (Cluster, CurationConfig, CurationThresholds, Example, RawRecord, build_example,
                     compute_thresholds, curate, ingest, split, stats, unigram_recall)
from .oracle import OracleConfig, OracleResult, greedy_oracle, sentence_oracle_scores
from .rouge import DUC, WIKIREF, RougeConfig, RougeScore, evaluate_corpus, rouge_l, rouge_n
from .scoring import SentenceScores, load_external_scores, score_all, score_lead, score_query_sim
from .selection import search_threshold, select_multi_doc, select_single_doc
from .text import NormalizationConfig, is_stopword, ngrams, split_sentences, stem, tokenize
from .windows import SerializedWindow, assign_scoring_windows, serialize_input

__version__ = "0.1.0"
