"""Reading-time corpus ingestion, filtering, and exploratory/held-out partitioning.

Supports two modalities: self-paced reading ("spr", per-word reveal
latencies) and eye-tracking ("et", go-past durations with fixation and
saccade metadata). Corpora are immutable after construction; filtering
returns a new corpus.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

SPR = "spr"
ET = "et"
MODALITIES = (SPR, ET)

EXPLORATORY = "exploratory"
HELDOUT = "heldout"

BOUNDARY_NAMES = frozenset(
    {
        "sentence_start",
        "sentence_end",
        "screen_start",
        "screen_end",
        "doc_start",
        "doc_end",
        "line_start",
        "line_end",
    }
)

_BASE_COLUMNS = ("subject_id", "doc_id", "sentence_id", "word_pos", "surface", "rt_ms")
_ET_COLUMNS = _BASE_COLUMNS + ("fixated", "saccade_len", "boundary_flags")


class CorpusError(ValueError):
    """Malformed corpus input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class WordToken:
    doc_id: str
    sentence_id: int
    word_pos: int  # 1-based within sentence
    surface: str
    char_len: int
    corpus_word_idx: int  # 0-based, strictly increasing in document order
    boundary_flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Observation:
    subject_id: int
    token: WordToken
    rt_ms: float
    log_rt: float
    saccade_len: int | None = None
    prev_fixated: bool | None = None
    fixated: bool | None = None


@dataclass(frozen=True)
class FilterSpec:
    modality: str
    min_rt_ms: float | None = None
    max_rt_ms: float | None = None
    min_correct_questions: int | None = None
    max_saccade_words: int | None = None
    drop_boundaries: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ValueError(f"unknown modality {self.modality!r}")
        if (
            self.min_rt_ms is not None
            and self.max_rt_ms is not None
            and not self.min_rt_ms < self.max_rt_ms
        ):
            raise ValueError("min_rt_ms must be < max_rt_ms")
        unknown = set(self.drop_boundaries) - BOUNDARY_NAMES
        if unknown:
            raise ValueError(f"unknown boundary names: {sorted(unknown)}")

    @classmethod
    def default(cls, modality: str) -> "FilterSpec":
        """Default filters: SPR drops <100 ms / >3000 ms observations,
        sentence-initial/final words, and subjects with comprehension score
        <= 3; ET drops unfixated words, saccades over four words, and all
        layout boundaries."""
        if modality == SPR:
            return cls(
                modality=SPR,
                min_rt_ms=100,
                max_rt_ms=3000,
                min_correct_questions=3,
                drop_boundaries=frozenset({"sentence_start", "sentence_end"}),
            )
        if modality == ET:
            return cls(
                modality=ET,
                max_saccade_words=4,
                drop_boundaries=BOUNDARY_NAMES,
            )
        raise ValueError(f"unknown modality {modality!r}")

    @classmethod
    def from_json(cls, path: str) -> "FilterSpec":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        raw["drop_boundaries"] = frozenset(raw.get("drop_boundaries", ()))
        return cls(**raw)


@dataclass(frozen=True)
class ReadingCorpus:
    modality: str
    tokens: tuple[WordToken, ...]
    observations: tuple[Observation, ...]
    subject_scores: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "subject_scores", MappingProxyType(dict(self.subject_scores))
        )

    @property
    def n_obs(self) -> int:
        return len(self.observations)

    def token_at(self, corpus_word_idx: int) -> WordToken:
        return self.tokens[corpus_word_idx]

    def sentences(self) -> list[tuple[tuple[str, int], list[WordToken]]]:
        """Tokens grouped by (doc_id, sentence_id), in document order."""
        out: list[tuple[tuple[str, int], list[WordToken]]] = []
        for tok in self.tokens:
            key = (tok.doc_id, tok.sentence_id)
            if out and out[-1][0] == key:
                out[-1][1].append(tok)
            else:
                out.append((key, [tok]))
        return out

    def doc_ids(self) -> list[str]:
        seen: list[str] = []
        for tok in self.tokens:
            if not seen or seen[-1] != tok.doc_id:
                seen.append(tok.doc_id)
        return seen


def _parse_int(value: str, column: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise CorpusError(f"column {column!r}: {value!r} is not an integer", line)


def _parse_float(value: str, column: str, line: int) -> float:
    try:
        out = float(value)
    except ValueError:
        raise CorpusError(f"column {column!r}: {value!r} is not a number", line)
    if math.isnan(out) or math.isinf(out):
        raise CorpusError(f"column {column!r}: {value!r} is not finite", line)
    return out


def read_subject_scores(path: str) -> dict[int, int]:
    """Sidecar TSV of comprehension-question scores: `subject_id<TAB>correct`."""
    scores: dict[int, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["subject_id", "correct"]:
            raise CorpusError("score file must have header: subject_id<TAB>correct", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise CorpusError("expected 2 columns", lineno)
            subj = _parse_int(row[0], "subject_id", lineno)
            if subj in scores:
                raise CorpusError(f"duplicate subject_id {subj}", lineno)
            scores[subj] = _parse_int(row[1], "correct", lineno)
    return scores


def ingest(
    path: str,
    modality: str,
    scores_path: str | None = None,
) -> ReadingCorpus:
    """Read a corpus TSV into a ReadingCorpus.

    Expected header: subject_id, doc_id, sentence_id, word_pos, surface,
    rt_ms, and for eye-tracking additionally fixated, saccade_len,
    boundary_flags. Tokens are ordered by document (order of first
    appearance), then sentence_id, then word_pos; corpus_word_idx follows
    that order. Sentence/document boundary flags are derived from word
    positions; screen/line flags must arrive in the boundary_flags column
    and are token-level (the presentation layout is shared by all
    subjects), so flags from any subject's row apply to every observation
    of that word.
    """
    if modality not in MODALITIES:
        raise ValueError(f"unknown modality {modality!r}")
    expected = _BASE_COLUMNS if modality == SPR else _ET_COLUMNS

    rows: list[dict] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None:
            raise CorpusError("empty file", 1)
        header = tuple(h.strip() for h in header)
        if header != expected:
            raise CorpusError(
                f"{modality} header must be {list(expected)}, got {list(header)}", 1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(expected):
                raise CorpusError(
                    f"expected {len(expected)} columns, got {len(row)}", lineno
                )
            rec = {
                "line": lineno,
                "subject_id": _parse_int(row[0], "subject_id", lineno),
                "doc_id": row[1].strip(),
                "sentence_id": _parse_int(row[2], "sentence_id", lineno),
                "word_pos": _parse_int(row[3], "word_pos", lineno),
                "surface": row[4].strip(),
            }
            if rec["word_pos"] < 1:
                raise CorpusError("word_pos must be >= 1", lineno)
            if not rec["surface"]:
                raise CorpusError("empty surface form", lineno)
            rec["rt_ms"] = _parse_float(row[5], "rt_ms", lineno)
            if modality == ET:
                fixated_raw = row[6].strip()
                if fixated_raw not in ("0", "1"):
                    raise CorpusError(f"column 'fixated': {fixated_raw!r} must be 0 or 1", lineno)
                rec["fixated"] = fixated_raw == "1"
                rec["saccade_len"] = _parse_int(row[7], "saccade_len", lineno)
                flags = frozenset(f for f in row[8].strip().split(",") if f)
                unknown = flags - BOUNDARY_NAMES
                if unknown:
                    raise CorpusError(f"unknown boundary flags {sorted(unknown)}", lineno)
                rec["boundary_flags"] = flags
                if rec["rt_ms"] <= 0 and rec["fixated"]:
                    raise CorpusError("fixated word with rt_ms <= 0", lineno)
                if rec["rt_ms"] < 0:
                    raise CorpusError("rt_ms must be >= 0", lineno)
            else:
                rec["fixated"] = None
                rec["saccade_len"] = None
                rec["boundary_flags"] = frozenset()
                if rec["rt_ms"] <= 0:
                    raise CorpusError("rt_ms must be > 0", lineno)
            rows.append(rec)

    # Token inventory. Sentence ids are a global counter, so each belongs
    # to exactly one document.
    doc_order: list[str] = []
    sent_doc: dict[int, str] = {}
    token_info: dict[tuple[str, int, int], dict] = {}
    for rec in rows:
        doc, sent, pos = rec["doc_id"], rec["sentence_id"], rec["word_pos"]
        if doc not in doc_order:
            doc_order.append(doc)
        if sent in sent_doc and sent_doc[sent] != doc:
            raise CorpusError(
                f"sentence_id {sent} appears in documents "
                f"{sent_doc[sent]!r} and {doc!r}; sentence ids must be corpus-global",
                rec["line"],
            )
        sent_doc[sent] = doc
        key = (doc, sent, pos)
        info = token_info.get(key)
        if info is None:
            token_info[key] = {
                "surface": rec["surface"],
                "flags": set(rec["boundary_flags"]),
            }
        else:
            if info["surface"] != rec["surface"]:
                raise CorpusError(
                    f"conflicting surface for {key}: "
                    f"{info['surface']!r} vs {rec['surface']!r}",
                    rec["line"],
                )
            info["flags"] |= rec["boundary_flags"]

    doc_rank = {d: i for i, d in enumerate(doc_order)}
    ordered_keys = sorted(token_info, key=lambda k: (doc_rank[k[0]], k[1], k[2]))

    # Validate word positions are contiguous from 1 within each sentence.
    by_sentence: dict[tuple[str, int], list[int]] = {}
    for doc, sent, pos in ordered_keys:
        by_sentence.setdefault((doc, sent), []).append(pos)
    for (doc, sent), positions in by_sentence.items():
        if positions != list(range(1, len(positions) + 1)):
            raise CorpusError(
                f"sentence {sent} in doc {doc!r} has word positions {positions}; "
                "expected contiguous 1..n"
            )

    tokens: list[WordToken] = []
    token_index: dict[tuple[str, int, int], int] = {}
    for idx, key in enumerate(ordered_keys):
        doc, sent, pos = key
        info = token_info[key]
        flags = set(info["flags"])
        n_words = len(by_sentence[(doc, sent)])
        if pos == 1:
            flags.add("sentence_start")
        if pos == n_words:
            flags.add("sentence_end")
        tokens.append(
            WordToken(
                doc_id=doc,
                sentence_id=sent,
                word_pos=pos,
                surface=info["surface"],
                char_len=len(info["surface"]),
                corpus_word_idx=idx,
                boundary_flags=frozenset(flags),
            )
        )
        token_index[key] = idx

    # Document start/end flags.
    for doc in doc_order:
        doc_idxs = [i for i, t in enumerate(tokens) if t.doc_id == doc]
        for idx, flag in ((doc_idxs[0], "doc_start"), (doc_idxs[-1], "doc_end")):
            t = tokens[idx]
            tokens[idx] = replace(t, boundary_flags=t.boundary_flags | {flag})

    # Observations, with duplicate detection and prev_fixated derivation.
    seen: dict[tuple[int, int], int] = {}
    fixation_by_subject: dict[tuple[int, int], bool] = {}
    for rec in rows:
        idx = token_index[(rec["doc_id"], rec["sentence_id"], rec["word_pos"])]
        dup_key = (rec["subject_id"], idx)
        if dup_key in seen:
            raise CorpusError(
                f"duplicate observation for subject {rec['subject_id']}, "
                f"corpus_word_idx {idx} (first at line {seen[dup_key]})",
                rec["line"],
            )
        seen[dup_key] = rec["line"]
        rec["corpus_word_idx"] = idx
        if modality == ET:
            fixation_by_subject[dup_key] = rec["fixated"]

    observations: list[Observation] = []
    for rec in sorted(rows, key=lambda r: (r["subject_id"], r["corpus_word_idx"])):
        idx = rec["corpus_word_idx"]
        token = tokens[idx]
        prev_fixated = None
        if modality == ET:
            prev = fixation_by_subject.get((rec["subject_id"], idx - 1))
            same_doc = idx > 0 and tokens[idx - 1].doc_id == token.doc_id
            prev_fixated = bool(prev) if same_doc else False
        observations.append(
            Observation(
                subject_id=rec["subject_id"],
                token=token,
                rt_ms=rec["rt_ms"],
                log_rt=math.log(rec["rt_ms"]) if rec["rt_ms"] > 0 else float("nan"),
                saccade_len=rec["saccade_len"],
                prev_fixated=prev_fixated,
                fixated=rec["fixated"],
            )
        )

    scores = read_subject_scores(scores_path) if scores_path else {}
    return ReadingCorpus(
        modality=modality,
        tokens=tuple(tokens),
        observations=tuple(observations),
        subject_scores=scores,
    )


def filter_corpus(corpus: ReadingCorpus, spec: FilterSpec) -> ReadingCorpus:
    """Apply a FilterSpec, returning a corpus with offending observations
    removed. The token list is unchanged. Idempotent."""
    if spec.modality != corpus.modality:
        raise ValueError(
            f"filter modality {spec.modality!r} != corpus modality {corpus.modality!r}"
        )

    excluded_subjects: set[int] = set()
    if corpus.modality == SPR and spec.min_correct_questions is not None:
        excluded_subjects = {
            subj
            for subj, score in corpus.subject_scores.items()
            if score <= spec.min_correct_questions
        }

    kept: list[Observation] = []
    for obs in corpus.observations:
        if obs.subject_id in excluded_subjects:
            continue
        if obs.token.boundary_flags & spec.drop_boundaries:
            continue
        if corpus.modality == ET:
            if not obs.fixated:
                continue
            if (
                spec.max_saccade_words is not None
                and obs.saccade_len is not None
                and obs.saccade_len > spec.max_saccade_words
            ):
                continue
        if spec.min_rt_ms is not None and obs.rt_ms < spec.min_rt_ms:
            continue
        if spec.max_rt_ms is not None and obs.rt_ms > spec.max_rt_ms:
            continue
        kept.append(obs)

    return ReadingCorpus(
        modality=corpus.modality,
        tokens=corpus.tokens,
        observations=tuple(kept),
        subject_scores=corpus.subject_scores,
    )


def partition(corpus: ReadingCorpus) -> list[str]:
    """Assign each observation to the exploratory or held-out set.

    The hash is subject_id + sentence_id: even sums go to the exploratory
    set, odd to held-out, so every subject-by-sentence cell lands intact in
    one partition and the two halves are of roughly equal size.
    """
    return [
        EXPLORATORY if (obs.subject_id + obs.token.sentence_id) % 2 == 0 else HELDOUT
        for obs in corpus.observations
    ]


def split_by_partition(
    corpus: ReadingCorpus,
) -> tuple[tuple[Observation, ...], tuple[Observation, ...]]:
    labels = partition(corpus)
    expl = tuple(o for o, l in zip(corpus.observations, labels) if l == EXPLORATORY)
    held = tuple(o for o, l in zip(corpus.observations, labels) if l == HELDOUT)
    return expl, held


def corpus_to_dict(corpus: ReadingCorpus) -> dict:
    return {
        "modality": corpus.modality,
        "tokens": [
            {
                "doc_id": t.doc_id,
                "sentence_id": t.sentence_id,
                "word_pos": t.word_pos,
                "surface": t.surface,
                "boundary_flags": sorted(t.boundary_flags),
            }
            for t in corpus.tokens
        ],
        "observations": [
            {
                "subject_id": o.subject_id,
                "corpus_word_idx": o.token.corpus_word_idx,
                "rt_ms": o.rt_ms,
                "saccade_len": o.saccade_len,
                "prev_fixated": o.prev_fixated,
                "fixated": o.fixated,
            }
            for o in corpus.observations
        ],
        "subject_scores": {str(k): v for k, v in corpus.subject_scores.items()},
    }


def corpus_from_dict(data: dict) -> ReadingCorpus:
    tokens = tuple(
        WordToken(
            doc_id=t["doc_id"],
            sentence_id=t["sentence_id"],
            word_pos=t["word_pos"],
            surface=t["surface"],
            char_len=len(t["surface"]),
            corpus_word_idx=i,
            boundary_flags=frozenset(t["boundary_flags"]),
        )
        for i, t in enumerate(data["tokens"])
    )
    observations = tuple(
        Observation(
            subject_id=o["subject_id"],
            token=tokens[o["corpus_word_idx"]],
            rt_ms=o["rt_ms"],
            log_rt=math.log(o["rt_ms"]) if o["rt_ms"] > 0 else float("nan"),
            saccade_len=o["saccade_len"],
            prev_fixated=o["prev_fixated"],
            fixated=o["fixated"],
        )
        for o in data["observations"]
    )
    return ReadingCorpus(
        modality=data["modality"],
        tokens=tokens,
        observations=observations,
        subject_scores={int(k): v for k, v in data["subject_scores"].items()},
    )


def save_corpus(corpus: ReadingCorpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(corpus_to_dict(corpus), fh, indent=0, sort_keys=True)


def load_corpus(path: str) -> ReadingCorpus:
    with open(path, encoding="utf-8") as fh:
        return corpus_from_dict(json.load(fh))
