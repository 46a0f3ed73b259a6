"""End-to-end orchestration: ingest -> surprisal alignment -> regression
fits -> perplexity trend tests -> iterative subset reports, with artifact
fingerprinting so unchanged stages are skipped on reruns."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import corpus as corpus_mod
from . import lme, subsets as subsets_mod, svgplot, trend as trend_mod
from .annotate import AnnotationConfig, annotate_corpus, read_dependencies
from .corpus import FilterSpec, Observation
from .scaling import PredictorMatrix, standardize
from .store import AnalysisStore, file_fingerprint, params_fingerprint
from .surprisal import (
    SurprisalTable,
    align_and_aggregate,
    corpus_perplexity,
    nats_to_bits,
    read_token_scores,
    read_variant_meta,
)
from .trees import align_trees, read_tree_index, read_trees

SURPRISAL_COL = "surprisal"


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class CorpusConfig:
    name: str
    file: str
    modality: str
    scores: str | None = None
    trees: str | None = None
    trees_index: str | None = None
    deps: str | None = None
    filter: str = "default"


@dataclass
class VariantConfig:
    meta: str
    tokens: str


@dataclass
class PipelineConfig:
    corpora: list[CorpusConfig]
    variants: list[VariantConfig]
    k: int = 5
    min_frac: float = 0.01
    fit_opts: dict = field(default_factory=dict)
    specs: dict = field(default_factory=dict)  # per-modality model-spec overrides

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        return cls.from_dict(raw, base=Path(path).parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path | None = None) -> "PipelineConfig":
        def resolve(p):
            if p is None:
                return None
            p = str(p)
            if base is not None and not Path(p).is_absolute():
                return str(base / p)
            return p

        if "corpora" not in raw or not raw["corpora"]:
            raise ConfigError("config must list at least one corpus")
        if "variants" not in raw or not raw["variants"]:
            raise ConfigError("config must list at least one variant")
        corpora = []
        for i, c in enumerate(raw["corpora"]):
            if "file" not in c or "modality" not in c:
                raise ConfigError(f"corpus #{i} needs 'file' and 'modality'")
            corpora.append(
                CorpusConfig(
                    name=c.get("name", f"corpus{i}"),
                    file=resolve(c["file"]),
                    modality=c["modality"],
                    scores=resolve(c.get("scores")),
                    trees=resolve(c.get("trees")),
                    trees_index=resolve(c.get("trees_index")),
                    deps=resolve(c.get("deps")),
                    filter=c.get("filter", "default"),
                )
            )
        variants = []
        for i, v in enumerate(raw["variants"]):
            if "meta" not in v or "tokens" not in v:
                raise ConfigError(f"variant #{i} needs 'meta' and 'tokens'")
            variants.append(
                VariantConfig(meta=resolve(v["meta"]), tokens=resolve(v["tokens"]))
            )
        for cc in corpora:
            for p in (cc.file, cc.scores, cc.trees, cc.trees_index, cc.deps):
                if p is not None and not Path(p).is_file():
                    raise ConfigError(f"missing input file: {p}")
        for vc in variants:
            for p in (vc.meta, vc.tokens):
                if not Path(p).is_file():
                    raise ConfigError(f"missing input file: {p}")
        specs = dict(raw.get("specs", {}))
        unknown_modalities = set(specs) - set(corpus_mod.MODALITIES)
        if unknown_modalities:
            raise ConfigError(
                f"specs keyed by unknown modalities: {sorted(unknown_modalities)}"
            )
        return cls(
            corpora=corpora,
            variants=variants,
            k=int(raw.get("k", 5)),
            min_frac=float(raw.get("min_frac", 0.01)),
            fit_opts=dict(raw.get("fit_opts", {})),
            specs=specs,
        )


# ---------------------------------------------------------------------------
# Design assembly


def baseline_predictors(modality: str) -> tuple[str, ...]:
    if modality == corpus_mod.SPR:
        return ("char_len", "word_pos")
    return ("char_len", "word_pos", "saccade_len", "prev_fixated")


def reading_model_spec(
    modality: str,
    with_surprisal: bool,
    include_word_intercept: bool = True,
    overrides: dict | None = None,
) -> lme.ModelSpec:
    """The regression structure for reading-time data: by-subject random
    slopes for the baseline predictors plus subject and word-type random
    intercepts, with a subject-sentence intercept for self-paced reading
    (many subjects) or a sentence intercept for eye-tracking (few subjects).

    Random slopes cover the baseline predictors only, in both the baseline
    and the surprisal models: log-likelihood differences require an
    identical random structure on both sides.

    overrides (the config's per-modality `specs` entry) may set
    "subject_slopes" (subset of the baseline predictors) and
    "cell_intercept" (false drops the subject-sentence/sentence term).
    """
    overrides = overrides or {}
    base = baseline_predictors(modality)
    slopes = tuple(overrides.get("subject_slopes", base))
    unknown = set(slopes) - set(base)
    if unknown:
        raise ConfigError(
            f"specs.subject_slopes for {modality!r} reference unknown "
            f"baseline predictors: {sorted(unknown)}"
        )
    fixed = base + ((SURPRISAL_COL,) if with_surprisal else ())
    cell = "subject_sentence" if modality == corpus_mod.SPR else "sentence"
    random = [
        lme.RandomTerm("subject", columns=slopes),
        lme.RandomTerm("word_type"),
    ]
    if overrides.get("cell_intercept", True):
        random.append(lme.RandomTerm(cell))
    return lme.ModelSpec(
        fixed=fixed,
        random=tuple(random),
        include_word_intercept=include_word_intercept,
    )


@dataclass
class FitData:
    matrix: PredictorMatrix  # standardized
    y: np.ndarray
    groups: dict[str, np.ndarray]
    word_idx: np.ndarray  # corpus_word_idx per observation


def build_fit_data(
    observations: Sequence[Observation],
    modality: str,
    table: SurprisalTable | None = None,
) -> FitData:
    names = baseline_predictors(modality)
    cols = {
        "char_len": [o.token.char_len for o in observations],
        "word_pos": [o.token.word_pos for o in observations],
    }
    if modality == corpus_mod.ET:
        cols["saccade_len"] = [o.saccade_len or 0 for o in observations]
        cols["prev_fixated"] = [float(bool(o.prev_fixated)) for o in observations]
    if table is not None:
        names = names + (SURPRISAL_COL,)
        cols[SURPRISAL_COL] = [
            table.word_surprisal[o.token.corpus_word_idx] for o in observations
        ]
    values = np.column_stack([np.asarray(cols[nm], dtype=float) for nm in names])
    matrix = standardize(PredictorMatrix(names=names, values=values))
    y = np.array([o.log_rt for o in observations])
    groups = {
        "subject": np.array([o.subject_id for o in observations]),
        "word_type": np.array([o.token.surface for o in observations], dtype=object),
        "sentence": np.array([o.token.sentence_id for o in observations]),
        "subject_sentence": np.array(
            [f"{o.subject_id}:{o.token.sentence_id}" for o in observations],
            dtype=object,
        ),
    }
    word_idx = np.array([o.token.corpus_word_idx for o in observations])
    return FitData(matrix=matrix, y=y, groups=groups, word_idx=word_idx)


def eligible_observations(
    observations: Sequence[Observation], tables: Mapping[str, SurprisalTable]
) -> list[Observation]:
    """Observations whose word is scored by every variant, so all fits share
    one observation set."""
    if not tables:
        return list(observations)
    scored = None
    for table in tables.values():
        keys = set(table.word_surprisal)
        scored = keys if scored is None else scored & keys
    return [o for o in observations if o.token.corpus_word_idx in scored]


# ---------------------------------------------------------------------------
# Pipeline


@dataclass
class VariantOutcome:
    name: str
    family: str
    n_params: int
    perplexity: float
    dll: float
    mse: float
    loglik_full_wi: float
    loglik_full_nwi: float


@dataclass
class CorpusOutcome:
    name: str
    n_obs_exploratory: int
    variants: list[VariantOutcome]
    trend_fits: dict[tuple[str, str], trend_mod.SlopeFit]
    search_results: dict[str, subsets_mod.SearchResult]


@dataclass
class PipelineResult:
    out_dir: Path
    corpora: list[CorpusOutcome]
    recomputed: list[str]
    report_files: list[Path]


def config_to_dict(config: PipelineConfig) -> dict:
    return {
        "corpora": [
            {
                "name": c.name,
                "file": c.file,
                "modality": c.modality,
                "scores": c.scores,
                "trees": c.trees,
                "trees_index": c.trees_index,
                "deps": c.deps,
                "filter": c.filter,
            }
            for c in config.corpora
        ],
        "variants": [{"meta": v.meta, "tokens": v.tokens} for v in config.variants],
        "k": config.k,
        "min_frac": config.min_frac,
        "fit_opts": config.fit_opts,
        "specs": config.specs,
    }


def _fit_artifact(
    store: AnalysisStore,
    name: str,
    inputs: dict[str, str],
    recomputed: list[str],
    fit_callable,
) -> lme.FittedModel:
    if store.is_fresh(name, inputs):
        return lme.FittedModel.from_dict(store.read_json(name, "model.json"))
    model = fit_callable()
    store.write_json(name, "model.json", model.to_dict(), inputs)
    recomputed.append(name)
    return model


def run_pipeline(
    config: PipelineConfig, store: AnalysisStore, out_dir: str | Path
) -> PipelineResult:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    recomputed: list[str] = []
    report_files: list[Path] = []
    corpora_outcomes: list[CorpusOutcome] = []

    fit_opts = dict(config.fit_opts)

    variant_metas = []
    for vc in config.variants:
        try:
            variant_metas.append(read_variant_meta(vc.meta))
        except Exception as exc:
            raise StageError("surprisal-import", exc)
    names = [m.name for m in variant_metas]
    if len(set(names)) != len(names):
        raise StageError("surprisal-import", ValueError(f"duplicate variant names in {names}"))

    for cc in config.corpora:
        # --- ingest -------------------------------------------------------
        corpus_name = f"corpus/{cc.name}"
        corpus_inputs = {"file": file_fingerprint(cc.file)}
        if cc.scores:
            corpus_inputs["scores"] = file_fingerprint(cc.scores)
        if cc.filter == "default":
            spec = FilterSpec.default(cc.modality)
        else:
            spec = FilterSpec.from_json(cc.filter)
        corpus_inputs["filter"] = params_fingerprint(
            {
                "modality": spec.modality,
                "min_rt_ms": spec.min_rt_ms,
                "max_rt_ms": spec.max_rt_ms,
                "min_correct_questions": spec.min_correct_questions,
                "max_saccade_words": spec.max_saccade_words,
                "drop_boundaries": sorted(spec.drop_boundaries),
            }
        )
        try:
            if store.is_fresh(corpus_name, corpus_inputs):
                corp = corpus_mod.corpus_from_dict(
                    store.read_json(corpus_name, "corpus.json")
                )
            else:
                corp = corpus_mod.ingest(cc.file, cc.modality, scores_path=cc.scores)
                corp = corpus_mod.filter_corpus(corp, spec)
                store.write_json(
                    corpus_name, "corpus.json", corpus_mod.corpus_to_dict(corp), corpus_inputs
                )
                recomputed.append(corpus_name)
        except StageError:
            raise
        except Exception as exc:
            raise StageError("ingest", exc)

        # --- surprisal alignment -------------------------------------------
        tables: dict[str, SurprisalTable] = {}
        corpus_fp = file_fingerprint(store.path(corpus_name, "corpus.json"))
        try:
            for vc, meta in zip(config.variants, variant_metas):
                art = f"table/{cc.name}/{meta.name}"
                inputs = {
                    "corpus": corpus_fp,
                    "tokens": file_fingerprint(vc.tokens),
                    "meta": file_fingerprint(vc.meta),
                }
                if store.is_fresh(art, inputs):
                    raw = store.read_json(art, "table.json")
                    tables[meta.name] = SurprisalTable(
                        variant=meta,
                        word_surprisal={
                            int(k): v for k, v in raw["word_surprisal"].items()
                        },
                        coverage=raw["coverage"],
                        token_nlls=tuple(raw["token_nlls"]),
                    )
                else:
                    scores = read_token_scores(vc.tokens)
                    table = align_and_aggregate(scores, corp, meta)
                    tables[meta.name] = table
                    store.write_json(
                        art,
                        "table.json",
                        {
                            "word_surprisal": {
                                str(k): v for k, v in table.word_surprisal.items()
                            },
                            "coverage": table.coverage,
                            "token_nlls": list(table.token_nlls),
                            "perplexity": corpus_perplexity(table),
                        },
                        inputs,
                    )
                    recomputed.append(art)
        except StageError:
            raise
        except Exception as exc:
            raise StageError("align", exc)

        # --- fits -----------------------------------------------------------
        try:
            expl, _ = corpus_mod.split_by_partition(corp)
            expl = eligible_observations(expl, tables)
            if not expl:
                raise ValueError("no exploratory observations remain after alignment")
            table_fps = {
                name: file_fingerprint(store.path(f"table/{cc.name}/{name}", "table.json"))
                for name in tables
            }
            opts_fp = params_fingerprint(fit_opts)

            models: dict[tuple[str | None, bool], lme.FittedModel] = {}
            for with_wi in (True, False):
                suffix = "wi" if with_wi else "nwi"
                spec0 = reading_model_spec(
                    cc.modality, False, with_wi, config.specs.get(cc.modality)
                )
                data0 = build_fit_data(expl, cc.modality)
                models[(None, with_wi)] = _fit_artifact(
                    store,
                    f"fit/{cc.name}/baseline-{suffix}",
                    {"corpus": corpus_fp, "spec": spec0.fingerprint(), "opts": opts_fp},
                    recomputed,
                    lambda d=data0, s=spec0: lme.fit_model(
                        d.matrix.values, d.matrix.names, d.y, d.groups, s, **fit_opts
                    ),
                )
                for vname, table in tables.items():
                    spec1 = reading_model_spec(
                        cc.modality, True, with_wi, config.specs.get(cc.modality)
                    )
                    data1 = build_fit_data(expl, cc.modality, table)
                    models[(vname, with_wi)] = _fit_artifact(
                        store,
                        f"fit/{cc.name}/{vname}-{suffix}",
                        {
                            "corpus": corpus_fp,
                            "table": table_fps[vname],
                            "spec": spec1.fingerprint(),
                            "opts": opts_fp,
                        },
                        recomputed,
                        lambda d=data1, s=spec1: lme.fit_model(
                            d.matrix.values, d.matrix.names, d.y, d.groups, s, **fit_opts
                        ),
                    )
        except StageError:
            raise
        except Exception as exc:
            raise StageError("fit", exc)

        # --- trend ----------------------------------------------------------
        try:
            outcomes: list[VariantOutcome] = []
            residual_vectors: dict[str, np.ndarray] = {}
            for vname, table in tables.items():
                meta = table.variant
                data1 = build_fit_data(expl, cc.modality, table)
                stats = lme.residual_stats(
                    models[(vname, False)],
                    data1.matrix.values,
                    data1.matrix.names,
                    data1.y,
                    data1.groups,
                )
                residual_vectors[vname] = stats.residuals
                outcomes.append(
                    VariantOutcome(
                        name=meta.name,
                        family=meta.family,
                        n_params=meta.n_params,
                        perplexity=corpus_perplexity(table),
                        dll=lme.delta_ll(models[(vname, True)], models[(None, True)]),
                        mse=stats.mse,
                        loglik_full_wi=models[(vname, True)].loglik_nats,
                        loglik_full_nwi=models[(vname, False)].loglik_nats,
                    )
                )
            outcomes.sort(key=lambda o: (o.family, o.n_params))

            families: dict[str, list[VariantOutcome]] = {}
            for oc in outcomes:
                families.setdefault(oc.family, []).append(oc)

            trend_fits: dict[tuple[str, str], trend_mod.SlopeFit] = {}
            trend_rows = []
            for family, members in sorted(families.items()):
                if len(members) < 2:
                    continue
                for metric in ("dll", "mse"):
                    pairs = [
                        (m.perplexity, m.dll if metric == "dll" else m.mse)
                        for m in members
                    ]
                    fit = trend_mod.fit_trend(pairs, metric)
                    trend_fits[(family, metric)] = fit
                    trend_rows.append(
                        [
                            family,
                            metric,
                            f"{fit.slope:.9g}",
                            f"{fit.stderr:.9g}",
                            f"{fit.t_stat:.9g}",
                            f"{fit.p_one_tailed:.9g}",
                            fit.n,
                        ]
                    )
                    points = [
                        (math.log(m.perplexity), m.dll if metric == "dll" else m.mse, str(i + 1))
                        for i, m in enumerate(members)
                    ]
                    svg = svgplot.emit_scatter(
                        points,
                        line=(fit.slope, fit.intercept),
                        title=f"{cc.name}: {family} {metric} vs log perplexity",
                        x_label="log perplexity",
                        y_label={"dll": "delta log-likelihood", "mse": "MSE"}[metric],
                    )
                    svg_path = out_dir / f"trend_{cc.name}_{family}_{metric}.svg"
                    svg_path.write_text(svg, encoding="utf-8")
                    report_files.append(svg_path)

            trend_csv = out_dir / f"trend_{cc.name}.csv"
            with open(trend_csv, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["family", "metric", "slope", "stderr", "t", "p", "n"])
                writer.writerows(trend_rows)
            report_files.append(trend_csv)
        except StageError:
            raise
        except Exception as exc:
            raise StageError("trend", exc)

        # --- subsets ---------------------------------------------------------
        search_results: dict[str, subsets_mod.SearchResult] = {}
        try:
            if cc.trees:
                trees = read_trees(cc.trees)
                index = read_tree_index(cc.trees_index) if cc.trees_index else None
                tree_map = align_trees(trees, corp.sentences(), index)
                arcs = read_dependencies(cc.deps) if cc.deps else {}
                properties = annotate_corpus(corp, tree_map, arcs, AnnotationConfig())
                candidates = subsets_mod.build_candidates(properties)
                data_any = build_fit_data(expl, cc.modality)
                for family, members in sorted(families.items()):
                    if len(members) < 3:
                        continue
                    variant_inputs = [
                        subsets_mod.VariantResiduals(
                            name=m.name,
                            ln_perplexity=math.log(m.perplexity),
                            residuals=residual_vectors[m.name],
                            surprisal_bits=np.array(
                                [
                                    nats_to_bits(
                                        tables[m.name].word_surprisal[w]
                                    )
                                    for w in data_any.word_idx.tolist()
                                ]
                            ),
                        )
                        for m in members
                    ]
                    result = subsets_mod.iterative_search(
                        variant_inputs,
                        candidates,
                        properties,
                        data_any.word_idx,
                        min_frac=config.min_frac,
                        k=config.k,
                    )
                    search_results[family] = result
                    csv_path = out_dir / f"subsets_{cc.name}_{family}.csv"
                    subsets_mod.write_subset_csv(result, variant_inputs, str(csv_path))
                    report_files.append(csv_path)
                    if result.reports:
                        svg = svgplot.emit_subset_panels(
                            result,
                            variant_inputs,
                            title=f"{cc.name}: {family} top subsets",
                        )
                        svg_path = out_dir / f"subsets_{cc.name}_{family}.svg"
                        svg_path.write_text(svg, encoding="utf-8")
                        report_files.append(svg_path)
        except StageError:
            raise
        except Exception as exc:
            raise StageError("subsets", exc)

        store.write_json(
            f"summary/{cc.name}",
            "summary.json",
            {
                "n_obs_exploratory": len(expl),
                "variants": [
                    {
                        "name": oc.name,
                        "family": oc.family,
                        "n_params": oc.n_params,
                        "perplexity": oc.perplexity,
                        "dll": oc.dll,
                        "mse": oc.mse,
                    }
                    for oc in outcomes
                ],
            },
            {"corpus": corpus_fp, **{f"table:{k}": v for k, v in table_fps.items()}},
        )

        corpora_outcomes.append(
            CorpusOutcome(
                name=cc.name,
                n_obs_exploratory=len(expl),
                variants=outcomes,
                trend_fits=trend_fits,
                search_results=search_results,
            )
        )

    return PipelineResult(
        out_dir=out_dir,
        corpora=corpora_outcomes,
        recomputed=recomputed,
        report_files=report_files,
    )
