"""Iterative slope-based residual analysis.

Given per-variant regression residuals over a common observation set and
each variant's log perplexity, repeatedly find the annotation-defined
subset of observations whose per-variant MSEs fall most steeply in log
perplexity, report it, remove it, and continue. Selected subsets are then
split into under- and over-predicted halves with SSE and mean surprisal
per side.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .annotate import COARSE_CLASSES, WordProperties
from .trend import SlopeFit, slope_test

DLT_THRESHOLD = 3
CENTER_EMBED_THRESHOLD = 4

_FLAG_FIELDS = (
    "before_sentential_clause",
    "ends_first_conjunct",
    "ends_first_conjunct_np",
    "begins_adjectival_np",
)


@dataclass(frozen=True)
class SubsetDef:
    """A named, pure predicate over word properties."""

    name: str
    kind: str  # pos_fine | pos_class | named_entity | dlt_ge | center_embed_ge | flag
    value: object = None

    def matches(self, props: WordProperties) -> bool:
        if self.kind == "pos_fine":
            return props.pos_category == self.value
        if self.kind == "pos_class":
            return props.pos_class == self.value
        if self.kind == "named_entity":
            return props.is_named_entity
        if self.kind == "dlt_ge":
            return props.dlt_cost >= self.value
        if self.kind == "center_embed_ge":
            return props.ends_center_embedding_len >= self.value
        if self.kind == "flag":
            return bool(getattr(props, self.value))
        raise ValueError(f"unknown subset kind {self.kind!r}")


def build_candidates(properties: Mapping[int, WordProperties]) -> list[SubsetDef]:
    """The candidate family: one subset per fine POS category observed, one
    per coarse class, the named-entity flag, the DLT and center-embedding
    thresholds, and each structural flag. Structural candidates are always
    present even if empty on a given corpus."""
    fine = sorted({p.pos_category for p in properties.values()})
    candidates = [SubsetDef(f"pos:{c}", "pos_fine", c) for c in fine]
    candidates += [SubsetDef(f"class:{c}", "pos_class", c) for c in COARSE_CLASSES]
    candidates.append(SubsetDef("named_entity", "named_entity"))
    candidates.append(SubsetDef(f"dlt_cost>={DLT_THRESHOLD}", "dlt_ge", DLT_THRESHOLD))
    candidates.append(
        SubsetDef(
            f"center_embedding_end>={CENTER_EMBED_THRESHOLD}",
            "center_embed_ge",
            CENTER_EMBED_THRESHOLD,
        )
    )
    candidates += [SubsetDef(flag, "flag", flag) for flag in _FLAG_FIELDS]
    return candidates


@dataclass(frozen=True)
class VariantResiduals:
    """One variant's inputs to the search: residuals and per-observation
    word surprisal (bits), aligned over a shared observation list."""

    name: str
    ln_perplexity: float
    residuals: np.ndarray
    surprisal_bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "residuals", np.asarray(self.residuals, dtype=float)
        )
        object.__setattr__(
            self, "surprisal_bits", np.asarray(self.surprisal_bits, dtype=float)
        )
        if self.residuals.shape != self.surprisal_bits.shape:
            raise ValueError("residuals and surprisal_bits must be aligned")


@dataclass(frozen=True)
class UnderOverStats:
    mse: float
    n_under: int
    n_over: int
    sse_under: float
    sse_over: float
    mean_surprisal_bits_under: float
    mean_surprisal_bits_over: float


def under_over_decompose(
    residuals: np.ndarray, surprisal_bits: np.ndarray
) -> UnderOverStats:
    """Split by residual sign: r > 0 underpredicted, r < 0 overpredicted,
    exact zeros excluded. SSE per side, not MSE, since the two sides have
    different counts and near-zero points distort means."""
    r = np.asarray(residuals, dtype=float)
    s = np.asarray(surprisal_bits, dtype=float)
    under = r > 0
    over = r < 0
    return UnderOverStats(
        mse=float(np.mean(r * r)) if r.size else 0.0,
        n_under=int(under.sum()),
        n_over=int(over.sum()),
        sse_under=float(np.sum(r[under] ** 2)),
        sse_over=float(np.sum(r[over] ** 2)),
        mean_surprisal_bits_under=float(np.mean(s[under])) if under.any() else float("nan"),
        mean_surprisal_bits_over=float(np.mean(s[over])) if over.any() else float("nan"),
    )


@dataclass(frozen=True)
class SubsetReport:
    subset: SubsetDef
    iteration: int
    n_points: int
    per_variant: dict[str, UnderOverStats]
    slope_fit: SlopeFit


@dataclass(frozen=True)
class SearchResult:
    reports: tuple[SubsetReport, ...]
    stop_reason: str  # "reached_k" | "no eligible subset"


def observation_masks(
    candidates: Sequence[SubsetDef],
    properties: Mapping[int, WordProperties],
    word_idx_per_obs: np.ndarray,
) -> dict[str, np.ndarray]:
    """Lift word-level predicates to observation-level boolean masks."""
    word_idx_per_obs = np.asarray(word_idx_per_obs)
    masks = {}
    for cand in candidates:
        word_hit = {
            idx: cand.matches(props) for idx, props in properties.items()
        }
        masks[cand.name] = np.array(
            [word_hit[i] for i in word_idx_per_obs.tolist()], dtype=bool
        )
    return masks


def iterative_search(
    variants: Sequence[VariantResiduals],
    candidates: Sequence[SubsetDef],
    properties: Mapping[int, WordProperties],
    word_idx_per_obs: np.ndarray,
    min_frac: float = 0.01,
    k: int = 5,
) -> SearchResult:
    """Run up to k iterations of steepest-negative-slope subset selection.

    Eligibility at every iteration requires the candidate's intersection
    with the remaining observations to exceed min_frac of the ORIGINAL
    observation count; the denominator stays fixed so eligibility is
    monotone as points are removed. Ties on slope break lexicographically
    by subset name. The search stops early when no eligible candidate has
    a negative slope.
    """
    if len(variants) < 3:
        raise ValueError("iterative search needs at least 3 variants")
    if not candidates:
        raise ValueError("empty candidate list")
    n_obs = variants[0].residuals.size
    for v in variants:
        if v.residuals.size != n_obs:
            raise ValueError("variant residual vectors are not aligned")
    word_idx_per_obs = np.asarray(word_idx_per_obs)
    if word_idx_per_obs.size != n_obs:
        raise ValueError("word_idx_per_obs length mismatch")

    ln_ppl = np.array([v.ln_perplexity for v in variants])
    masks = observation_masks(candidates, properties, word_idx_per_obs)
    remaining = np.ones(n_obs, dtype=bool)
    floor = min_frac * n_obs

    by_name = sorted(candidates, key=lambda c: c.name)
    reports: list[SubsetReport] = []
    stop_reason = "reached_k"
    for iteration in range(1, k + 1):
        best: tuple[float, SubsetDef, np.ndarray, SlopeFit] | None = None
        for cand in by_name:
            mask = masks[cand.name] & remaining
            n_points = int(mask.sum())
            if n_points <= floor:
                continue
            mses = [float(np.mean(v.residuals[mask] ** 2)) for v in variants]
            fit = slope_test(ln_ppl, mses, "negative")
            if fit.slope >= 0:
                continue
            if best is None or fit.slope < best[0]:
                best = (fit.slope, cand, mask, fit)
        if best is None:
            stop_reason = "no eligible subset"
            break
        _, cand, mask, fit = best
        per_variant = {
            v.name: under_over_decompose(v.residuals[mask], v.surprisal_bits[mask])
            for v in variants
        }
        reports.append(
            SubsetReport(
                subset=cand,
                iteration=iteration,
                n_points=int(mask.sum()),
                per_variant=per_variant,
                slope_fit=fit,
            )
        )
        remaining &= ~mask
    return SearchResult(reports=tuple(reports), stop_reason=stop_reason)


SUBSET_CSV_COLUMNS = (
    "iteration",
    "subset",
    "n_points",
    "slope",
    "stderr",
    "t",
    "p",
    "variant",
    "ln_perplexity",
    "mse",
    "n_under",
    "n_over",
    "sse_under",
    "sse_over",
    "mean_surprisal_bits_under",
    "mean_surprisal_bits_over",
)


def write_subset_csv(
    result: SearchResult, variants: Sequence[VariantResiduals], path: str
) -> None:
    ln_ppl = {v.name: v.ln_perplexity for v in variants}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUBSET_CSV_COLUMNS)
        for report in result.reports:
            for v in variants:
                st = report.per_variant[v.name]
                writer.writerow(
                    [
                        report.iteration,
                        report.subset.name,
                        report.n_points,
                        f"{report.slope_fit.slope:.9g}",
                        f"{report.slope_fit.stderr:.9g}",
                        f"{report.slope_fit.t_stat:.9g}",
                        f"{report.slope_fit.p_one_tailed:.9g}",
                        v.name,
                        f"{ln_ppl[v.name]:.9g}",
                        f"{st.mse:.9g}",
                        st.n_under,
                        st.n_over,
                        f"{st.sse_under:.9g}",
                        f"{st.sse_over:.9g}",
                        f"{st.mean_surprisal_bits_under:.9g}",
                        f"{st.mean_surprisal_bits_over:.9g}",
                    ]
                )
