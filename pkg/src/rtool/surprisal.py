"""Per-token surprisal tables: context-window planning, subword-to-word
aggregation by character offsets, and corpus perplexity.

All internal values are negative natural-log probabilities (nats); bits
appear only at reporting boundaries via :func:`nats_to_bits`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .corpus import ReadingCorpus, WordToken

LN2 = math.log(2.0)


def nats_to_bits(x):
    """The single nats-to-bits conversion site."""
    return x / LN2


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class VariantMeta:
    family: str  # gpt2 | gpt-neo | opt | other
    name: str
    n_params: int
    context_size: int
    perplexity: float | None = None

    def __post_init__(self):
        if self.context_size <= 0:
            raise ValueError("context_size must be > 0")
        if self.n_params <= 0:
            raise ValueError("n_params must be > 0")


@dataclass(frozen=True)
class TokenScore:
    token_idx: int
    text: str
    char_start: int
    char_end: int
    nll_nats: float

    def __post_init__(self):
        if self.nll_nats < 0:
            raise ValueError(f"negative nll ({self.nll_nats}) at token {self.token_idx}")
        if self.char_end < self.char_start:
            raise ValueError("char_end < char_start")


@dataclass(frozen=True)
class Window:
    window_start: int
    score_start: int
    window_end: int


def plan_windows(n_tokens: int, context_size: int) -> list[Window]:
    """Plan context windows so every token is scored exactly once.

    The first window covers tokens [0, min(n, c)). Each later window reuses
    the last c/2 tokens of the previous window as context and scores from
    the previous window's end. Requires an even context size, since the
    overlap is exactly half a window.
    """
    if n_tokens < 1:
        raise ValueError("n_tokens must be >= 1")
    if context_size < 2:
        raise ValueError("context_size must be >= 2")
    if context_size % 2 != 0:
        raise ValueError(f"context_size must be even, got {context_size}")

    half = context_size // 2
    windows = [Window(0, 0, min(n_tokens, context_size))]
    while windows[-1].window_end < n_tokens:
        prev_end = windows[-1].window_end
        start = prev_end - half
        windows.append(Window(start, prev_end, min(start + context_size, n_tokens)))
    return windows


@dataclass(frozen=True)
class SurprisalTable:
    """Word surprisals (nats) for one LM variant over one corpus, plus the
    raw per-token nlls needed for token-level perplexity."""

    variant: VariantMeta
    word_surprisal: Mapping[int, float]  # corpus_word_idx -> nats
    coverage: float
    token_nlls: tuple[float, ...] = ()

    def surprisal_nats(self, corpus_word_idx: int) -> float:
        return self.word_surprisal[corpus_word_idx]

    def with_perplexity(self) -> "SurprisalTable":
        return replace(self, variant=replace(self.variant, perplexity=corpus_perplexity(self)))


def _word_spans(tokens: Sequence[WordToken]) -> list[tuple[int, int]]:
    """Character spans of each word in the single-space-joined document."""
    spans = []
    pos = 0
    for tok in tokens:
        spans.append((pos, pos + tok.char_len))
        pos += tok.char_len + 1
    return spans


def align_and_aggregate(
    scores_by_doc: Mapping[str, Sequence[TokenScore]],
    corpus: ReadingCorpus,
    variant: VariantMeta,
) -> SurprisalTable:
    """Sum subword nlls into word surprisals by character-offset overlap.

    Offsets are interpreted over each document's single-space-joined text.
    A subword overlapping the characters of two different words is an
    alignment error; a subword covering only whitespace is folded into the
    following word so no probability mass is dropped.
    """
    word_surprisal: dict[int, float] = {}
    token_nlls: list[float] = []
    covered: dict[int, list[tuple[int, int]]] = {}

    doc_tokens: dict[str, list[WordToken]] = {}
    for tok in corpus.tokens:
        doc_tokens.setdefault(tok.doc_id, []).append(tok)

    unknown = set(scores_by_doc) - set(doc_tokens)
    if unknown:
        raise AlignmentError(f"scores reference unknown documents: {sorted(unknown)}")

    for doc_id, words in doc_tokens.items():
        scores = scores_by_doc.get(doc_id)
        if not scores:
            continue
        spans = _word_spans(words)
        doc_len = spans[-1][1]
        prev_end = None
        for sc in scores:
            if sc.char_end > doc_len:
                raise AlignmentError(
                    f"doc {doc_id!r}: token {sc.token_idx} ends at {sc.char_end}, "
                    f"document has {doc_len} characters"
                )
            if prev_end is not None and sc.char_start < prev_end:
                raise AlignmentError(
                    f"doc {doc_id!r}: token {sc.token_idx} overlaps previous token "
                    f"({sc.char_start} < {prev_end})"
                )
            prev_end = sc.char_end
            token_nlls.append(sc.nll_nats)

            hits = [
                i
                for i, (ws, we) in enumerate(spans)
                if sc.char_start < we and sc.char_end > ws
            ]
            if len(hits) > 1:
                raise AlignmentError(
                    f"doc {doc_id!r}: token {sc.token_idx} "
                    f"[{sc.char_start},{sc.char_end}) spans words "
                    f"{words[hits[0]].surface!r} and {words[hits[1]].surface!r}"
                )
            if not hits:
                # Whitespace-only subword: charge it to the next word.
                following = [i for i, (ws, _) in enumerate(spans) if ws >= sc.char_end]
                if not following:
                    raise AlignmentError(
                        f"doc {doc_id!r}: token {sc.token_idx} covers no word "
                        "and has no following word"
                    )
                hits = [following[0]]
            word = words[hits[0]]
            idx = word.corpus_word_idx
            word_surprisal[idx] = word_surprisal.get(idx, 0.0) + sc.nll_nats
            ws, we = spans[hits[0]]
            ov = (max(sc.char_start, ws), min(sc.char_end, we))
            if ov[1] > ov[0]:
                covered.setdefault(idx, []).append(ov)

    # A word is scored only if its subwords cover all of its characters;
    # partially covered words indicate a broken tokenization.
    spans_by_idx = {}
    for doc_id, words in doc_tokens.items():
        for tok, span in zip(words, _word_spans(words)):
            spans_by_idx[tok.corpus_word_idx] = span
    for idx, pieces in covered.items():
        ws, we = spans_by_idx[idx]
        pieces = sorted(pieces)
        pos = ws
        for cs, ce in pieces:
            if cs > pos:
                break
            pos = max(pos, ce)
        if pos < we:
            tok = corpus.tokens[idx]
            raise AlignmentError(
                f"word {tok.surface!r} (corpus_word_idx {idx}) only partially "
                f"covered by subword offsets"
            )

    n_words = len(corpus.tokens)
    coverage = len(word_surprisal) / n_words if n_words else 0.0
    return SurprisalTable(
        variant=variant,
        word_surprisal=word_surprisal,
        coverage=coverage,
        token_nlls=tuple(token_nlls),
    )


def corpus_perplexity(table: SurprisalTable) -> float:
    """exp(mean per-token nll), over subword tokens rather than words."""
    if not table.token_nlls:
        raise ValueError("empty surprisal table")
    nlls = table.token_nlls
    # a uniform table's mean is the common value, bit for bit
    if min(nlls) == max(nlls):
        return float(math.exp(nlls[0]))
    return float(math.exp(math.fsum(nlls) / len(nlls)))


def mean_word_surprisal_bits(table: SurprisalTable) -> float:
    """Word-level average surprisal in bits. Reported separately from
    perplexity, which averages over tokens."""
    if not table.word_surprisal:
        raise ValueError("empty surprisal table")
    return float(nats_to_bits(np.mean(list(table.word_surprisal.values()))))


# ---------------------------------------------------------------------------
# Canonical on-disk format: one TSV of token scores per variant plus a JSON
# metadata sidecar.

SCORE_COLUMNS = ("doc_id", "token_idx", "text", "char_start", "char_end", "nll_nats")


def read_token_scores(path: str) -> dict[str, list[TokenScore]]:
    by_doc: dict[str, list[TokenScore]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SCORE_COLUMNS:
            raise AlignmentError(
                f"surprisal TSV must have header {list(SCORE_COLUMNS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(SCORE_COLUMNS):
                raise AlignmentError(f"line {lineno}: expected {len(SCORE_COLUMNS)} columns")
            try:
                score = TokenScore(
                    token_idx=int(row[1]),
                    text=row[2],
                    char_start=int(row[3]),
                    char_end=int(row[4]),
                    nll_nats=float(row[5]),
                )
            except ValueError as exc:
                raise AlignmentError(f"line {lineno}: {exc}") from exc
            by_doc.setdefault(row[0].strip(), []).append(score)
    for doc_id, scores in by_doc.items():
        scores.sort(key=lambda s: s.token_idx)
    return by_doc


def write_token_scores(by_doc: Mapping[str, Sequence[TokenScore]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(SCORE_COLUMNS)
        for doc_id in by_doc:
            for sc in by_doc[doc_id]:
                writer.writerow(
                    [
                        doc_id,
                        sc.token_idx,
                        sc.text,
                        sc.char_start,
                        sc.char_end,
                        f"{sc.nll_nats:.10g}",
                    ]
                )


def read_variant_meta(path: str) -> VariantMeta:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return VariantMeta(
        family=raw["family"],
        name=raw["name"],
        n_params=int(raw["n_params"]),
        context_size=int(raw["context_size"]),
        perplexity=raw.get("perplexity"),
    )


def write_variant_meta(meta: VariantMeta, path: str) -> None:
    payload = {
        "family": meta.family,
        "name": meta.name,
        "n_params": meta.n_params,
        "context_size": meta.context_size,
    }
    if meta.perplexity is not None:
        payload["perplexity"] = meta.perplexity
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
