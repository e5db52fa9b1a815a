"""Packing a query and a long document into fixed-size encoder windows.

Each window starts with the query prefix ``[L1] q1 [L2] q2 ...`` and then
holds whole document sentences, each wrapped as ``[CLS] tokens [SEP]``.
Window ``k`` nominally starts ``k * stride`` tokens into the document token
stream; the start snaps forward to the next sentence boundary so that no
sentence is ever cut. Any sentence that the stride walk leaves uncovered gets
a window of its own starting at it.
"""

from dataclasses import dataclass, field

from .text import tokenize

CLS = "[CLS]"
SEP = "[SEP]"
QUERY = "query"
DOCUMENT = "document"


def level_marker(depth: int) -> str:
    return f"[L{depth}]"


class WindowError(ValueError):
    pass


@dataclass
class SentenceSpan:
    sentence_index: int
    start: int
    end: int  # exclusive; tokens[start] is [CLS], tokens[end - 1] is [SEP]
    fully_contained: bool = True


@dataclass
class SerializedWindow:
    window_index: int
    tokens: list
    segment_ids: list
    sentence_spans: list
    context_coverage: dict = field(default_factory=dict)

    def contains(self, sentence_index: int) -> bool:
        return any(s.sentence_index == sentence_index and s.fully_contained for s in self.sentence_spans)

    def to_record(self) -> dict:
        return {
            "window_index": self.window_index,
            "tokens": self.tokens,
            "segment_ids": self.segment_ids,
            "sentence_spans": [
                [s.sentence_index, s.start, s.end, s.fully_contained] for s in self.sentence_spans
            ],
            "context_coverage": {str(k): v for k, v in self.context_coverage.items()},
        }


def query_prefix(query) -> list[str]:
    out = []
    for depth, part in enumerate(query, 1):
        out.append(level_marker(depth))
        out.extend(tokenize(part))
    return out


def _sentence_blocks(document) -> list[list[str]]:
    blocks = []
    for sent in document:
        toks = tokenize(sent) if isinstance(sent, str) else list(sent)
        blocks.append([CLS] + toks + [SEP])
    return blocks


def _pack(first: int, blocks, budget: int) -> list[int]:
    used, members = 0, []
    for j in range(first, len(blocks)):
        if used + len(blocks[j]) > budget:
            break
        members.append(j)
        used += len(blocks[j])
    return members


def serialize_input(query, document, max_window_tokens: int = 512, stride: int = 100) -> list[SerializedWindow]:
    if stride < 1 or stride >= max_window_tokens:
        raise WindowError(f"stride must be in [1, max_window_tokens), got {stride} with max {max_window_tokens}")
    if not document:
        raise WindowError("document has no sentences")
    prefix = query_prefix(query)
    budget = max_window_tokens - len(prefix)
    blocks = _sentence_blocks(document)
    for i, block in enumerate(blocks):
        if len(block) > budget:
            raise WindowError(
                f"sentence {i} needs {len(block)} tokens but only {budget} remain after the query prefix")

    offsets = []
    total = 0
    for block in blocks:
        offsets.append(total)
        total += len(block)

    starts = []
    nominal = 0
    j = 0
    while nominal < total:
        while j < len(blocks) and offsets[j] < nominal:
            j += 1
        if j == len(blocks):
            break
        if not starts or starts[-1] != j:
            starts.append(j)
            if _pack(j, blocks, budget)[-1] == len(blocks) - 1:
                break
        nominal += stride

    covered = set()
    for s in starts:
        covered.update(_pack(s, blocks, budget))
    for i in range(len(blocks)):
        if i not in covered:
            starts.append(i)
            covered.update(_pack(i, blocks, budget))
    starts.sort()

    windows = []
    for w, first in enumerate(starts):
        members = _pack(first, blocks, budget)
        tokens = list(prefix)
        segments = [QUERY] * len(prefix)
        spans = []
        for i in members:
            spans.append(SentenceSpan(i, len(tokens), len(tokens) + len(blocks[i])))
            tokens.extend(blocks[i])
            segments.extend([DOCUMENT] * len(blocks[i]))
        doc_tokens = len(tokens) - len(prefix)
        coverage = {i: doc_tokens - len(blocks[i]) for i in members}
        windows.append(SerializedWindow(w, tokens, segments, spans, coverage))
    return windows


def assign_scoring_windows(windows, n_sentences=None) -> dict:
    """Map each sentence to the window that fully contains it with the most
    surrounding context; the lower window index wins ties.

    With ``n_sentences`` given, every index below it must be assigned.
    """
    best = {}
    sentences = set()
    for win in windows:
        for span in win.sentence_spans:
            sentences.add(span.sentence_index)
            if not span.fully_contained:
                continue
            cov = win.context_coverage[span.sentence_index]
            i = span.sentence_index
            if i not in best or cov > best[i][0] or (cov == best[i][0] and win.window_index < best[i][1]):
                best[i] = (cov, win.window_index)
    if n_sentences is not None:
        sentences |= set(range(n_sentences))
    missing = sentences - set(best)
    if missing:
        raise WindowError(f"sentence {min(missing)} is not fully contained in any window")
    return {i: best[i][1] for i in sorted(best)}
