"""Per-token surprisal from causal language models.

Documents are scored independently. When a document exceeds the context
size, the second half of each context window carries over as the first
half of the next, and only tokens past the previous window's end are
scored, so every token is scored exactly once with at least half a window
of preceding context. The first token of each document is conditioned on
the model's beginning-of-text token.

Output rows carry character offsets into the document text (single-space-
joined words) and negative natural-log probabilities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import torch
from transformers import AutoModelForCausalLM, AutoTokenizer


class AdapterError(RuntimeError):
    pass


@dataclass(frozen=True)
class Window:
    window_start: int
    score_start: int
    window_end: int


def plan_windows(n_tokens: int, context_size: int) -> list[Window]:
    """Half-overlap window stitching; must stay in lockstep with the
    toolkit that consumes the emitted TSVs."""
    if n_tokens < 1:
        raise ValueError("n_tokens must be >= 1")
    if context_size < 2 or context_size % 2 != 0:
        raise ValueError("context_size must be an even integer >= 2")
    half = context_size // 2
    windows = [Window(0, 0, min(n_tokens, context_size))]
    while windows[-1].window_end < n_tokens:
        prev_end = windows[-1].window_end
        start = prev_end - half
        windows.append(Window(start, prev_end, min(start + context_size, n_tokens)))
    return windows


@dataclass(frozen=True)
class ScoredToken:
    token_idx: int
    text: str
    char_start: int
    char_end: int
    nll_nats: float


@dataclass
class LoadedModel:
    model: object
    tokenizer: object
    name: str
    family: str
    n_params: int
    max_context: int
    bos_id: int


_FAMILIES = {"gpt2": "gpt2", "gpt_neo": "gpt-neo", "gptj": "gpt-neo", "opt": "opt"}


def load_model(name_or_path: str) -> LoadedModel:
    try:
        tokenizer = AutoTokenizer.from_pretrained(name_or_path)
        model = AutoModelForCausalLM.from_pretrained(name_or_path)
    except Exception as exc:
        raise AdapterError(f"cannot load model {name_or_path!r}: {exc}") from exc
    model.eval()
    config = model.config
    max_context = int(
        getattr(config, "n_positions", None)
        or getattr(config, "max_position_embeddings", 0)
    )
    bos_id = tokenizer.bos_token_id
    if bos_id is None:
        bos_id = tokenizer.eos_token_id
    if bos_id is None:
        raise AdapterError(f"model {name_or_path!r} defines no BOS/EOS token")
    return LoadedModel(
        model=model,
        tokenizer=tokenizer,
        name=name_or_path.rstrip("/").split("/")[-1],
        family=_FAMILIES.get(getattr(config, "model_type", ""), "other"),
        n_params=sum(p.numel() for p in model.parameters()),
        max_context=max_context,
        bos_id=int(bos_id),
    )


def score_document(lm: LoadedModel, text: str, context_size: int) -> list[ScoredToken]:
    """Score one document, returning one row per token in document order.

    The forward pass for a window covering tokens [w, e) feeds the tokens
    [w, e-1) (prefixed with BOS when w = 0), whose logits predict exactly
    the window's score range; this keeps every input within the model's
    context even when context_size equals the model maximum.
    """
    if not text:
        raise AdapterError("empty document")
    if context_size > lm.max_context:
        raise AdapterError(
            f"context_size {context_size} exceeds the model maximum {lm.max_context}"
        )
    enc = lm.tokenizer(text, return_offsets_mapping=True, add_special_tokens=False)
    ids = enc["input_ids"]
    offsets = enc["offset_mapping"]
    if not ids:
        raise AdapterError("document tokenized to nothing")
    for idx, (start, end) in enumerate(offsets):
        if start is None or end is None or end <= start:
            raise AdapterError(f"token {idx} has no recoverable character offsets")

    out: list[ScoredToken] = []
    for window in plan_windows(len(ids), context_size):
        w, s, e = window.window_start, window.score_start, window.window_end
        if w == 0:
            input_ids = [lm.bos_id] + ids[: e - 1]
            first_logit_row = s  # logits row i predicts ids[i]
        else:
            input_ids = ids[w : e - 1]
            first_logit_row = s - w - 1  # logits row i predicts ids[w + i + 1]
        with torch.no_grad():
            logits = lm.model(torch.tensor([input_ids])).logits[0]
        logprobs = torch.log_softmax(logits.double(), dim=-1)
        for j in range(s, e):
            row = first_logit_row + (j - s)
            nll = -float(logprobs[row, ids[j]])
            start, end = offsets[j]
            out.append(
                ScoredToken(
                    token_idx=j,
                    text=text[start:end],
                    char_start=int(start),
                    char_end=int(end),
                    nll_nats=nll,
                )
            )
    return out


def read_documents(path: str) -> dict[str, str]:
    """TSV of `doc_id<TAB>text`, one document per line."""
    docs: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header.split("\t")[:2] != ["doc_id", "text"]:
            raise AdapterError("docs file must have header: doc_id<TAB>text")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise AdapterError(f"line {lineno}: expected doc_id<TAB>text")
            doc_id, text = parts
            if doc_id in docs:
                raise AdapterError(f"line {lineno}: duplicate doc_id {doc_id!r}")
            docs[doc_id] = text
    if not docs:
        raise AdapterError("docs file lists no documents")
    return docs


def write_scores(
    scored: dict[str, Sequence[ScoredToken]], path: str
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("doc_id\ttoken_idx\ttext\tchar_start\tchar_end\tnll_nats\n")
        for doc_id, rows in scored.items():
            for r in rows:
                fh.write(
                    f"{doc_id}\t{r.token_idx}\t{r.text}\t{r.char_start}\t"
                    f"{r.char_end}\t{r.nll_nats:.10g}\n"
                )


def write_sidecar(lm: LoadedModel, context_size: int, path: str) -> None:
    payload = {
        "family": lm.family,
        "name": lm.name,
        "n_params": lm.n_params,
        "context_size": context_size,
        "bos_prepended": True,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def score_documents_to_files(
    model_path: str, context_size: int, docs_path: str, out_path: str
) -> dict:
    lm = load_model(model_path)
    docs = read_documents(docs_path)
    scored = {doc_id: score_document(lm, text, context_size) for doc_id, text in docs.items()}
    write_scores(scored, out_path)
    sidecar = out_path.rsplit(".", 1)[0] + ".meta.json"
    write_sidecar(lm, context_size, sidecar)
    return {
        "n_docs": len(docs),
        "n_tokens": sum(len(v) for v in scored.values()),
        "sidecar": sidecar,
    }
