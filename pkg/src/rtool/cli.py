"""The rtool command line: station-wise subcommands over a persistent
analysis store, plus `run` for the whole pipeline.

Exit codes: 0 success, 2 validation error (bad config/arguments/input
files), 3 stage failure.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import lme, pipeline as pipeline_mod, svgplot
from . import trend as trend_mod
from .corpus import CorpusError, FilterSpec
from .store import AnalysisStore, file_fingerprint, resolve_store_path
from .surprisal import (
    AlignmentError,
    align_and_aggregate,
    corpus_perplexity,
    read_token_scores,
    read_variant_meta,
)

VALIDATION_EXIT = 2
STAGE_EXIT = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _open_store(store_path: str | None) -> AnalysisStore:
    return AnalysisStore(resolve_store_path(store_path))


@click.group()
def main():
    """Evaluate language-model surprisal against human reading times."""


@main.command()
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--modality", required=True, type=click.Choice(["spr", "et"]))
@click.option("--scores", type=click.Path(exists=True), default=None)
@click.option("--filter", "filter_arg", default="default", show_default=True,
              help="'default' or a path to a FilterSpec JSON")
@click.option("--name", default="corpus0", show_default=True)
@click.option("--out", "store_path", default=None, help="analysis store directory")
def ingest(corpus_file, modality, scores, filter_arg, name, store_path):
    """Ingest and filter a reading-time corpus TSV into the store."""
    try:
        if filter_arg == "default":
            spec = FilterSpec.default(modality)
        else:
            spec = FilterSpec.from_json(filter_arg)
    except (OSError, ValueError) as exc:
        _fail(VALIDATION_EXIT, f"bad filter spec: {exc}")
    try:
        corp = corpus_mod.ingest(corpus_file, modality, scores_path=scores)
        filtered = corpus_mod.filter_corpus(corp, spec)
    except CorpusError as exc:
        _fail(VALIDATION_EXIT, str(exc))
    store = _open_store(store_path)
    inputs = {"file": file_fingerprint(corpus_file)}
    if scores:
        inputs["scores"] = file_fingerprint(scores)
    store.write_json(
        f"corpus/{name}", "corpus.json", corpus_mod.corpus_to_dict(filtered), inputs
    )
    click.echo(
        f"ingested {name}: {len(filtered.tokens)} tokens, "
        f"{filtered.n_obs} observations after filtering "
        f"(from {corp.n_obs})"
    )


@main.group()
def surprisal():
    """Surprisal table operations."""


@surprisal.command("import")
@click.option("--variant", required=True, help="variant name (must match the meta file)")
@click.option("--meta", "meta_file", required=True, type=click.Path(exists=True))
@click.option("--tokens", "tokens_file", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_name", default="corpus0", show_default=True)
@click.option("--store", "store_path", default=None)
def surprisal_import(variant, meta_file, tokens_file, corpus_name, store_path):
    """Align a per-token surprisal TSV against an ingested corpus."""
    store = _open_store(store_path)
    if not store.has(f"corpus/{corpus_name}"):
        _fail(VALIDATION_EXIT, f"corpus {corpus_name!r} not found in store")
    try:
        meta = read_variant_meta(meta_file)
        if meta.name != variant:
            _fail(VALIDATION_EXIT, f"--variant {variant!r} but meta file says {meta.name!r}")
        corp = corpus_mod.corpus_from_dict(
            store.read_json(f"corpus/{corpus_name}", "corpus.json")
        )
        scores = read_token_scores(tokens_file)
        table = align_and_aggregate(scores, corp, meta)
    except (AlignmentError, CorpusError, ValueError) as exc:
        _fail(STAGE_EXIT, str(exc))
    store.write_json(
        f"table/{corpus_name}/{variant}",
        "table.json",
        {
            "word_surprisal": {str(k): v for k, v in table.word_surprisal.items()},
            "coverage": table.coverage,
            "token_nlls": list(table.token_nlls),
            "perplexity": corpus_perplexity(table),
        },
        {
            "corpus": file_fingerprint(store.path(f"corpus/{corpus_name}", "corpus.json")),
            "tokens": file_fingerprint(tokens_file),
            "meta": file_fingerprint(meta_file),
        },
    )
    click.echo(
        f"imported {variant}: coverage {table.coverage:.4f}, "
        f"perplexity {corpus_perplexity(table):.4f}"
    )


def _load_table(store, corpus_name, variant, meta=None):
    raw = store.read_json(f"table/{corpus_name}/{variant}", "table.json")
    from .surprisal import SurprisalTable, VariantMeta

    return SurprisalTable(
        variant=meta or VariantMeta("other", variant, 1, 2),
        word_surprisal={int(k): v for k, v in raw["word_surprisal"].items()},
        coverage=raw["coverage"],
        token_nlls=tuple(raw["token_nlls"]),
    )


@main.command()
@click.option("--variant", default=None, help="variant name; omit with --baseline")
@click.option("--baseline", is_flag=True, default=False)
@click.option("--corpus", "corpus_name", default="corpus0", show_default=True)
@click.option("--partition", "which", default="exploratory", show_default=True,
              type=click.Choice(["exploratory", "heldout"]))
@click.option("--no-word-intercept", is_flag=True, default=False)
@click.option("--store", "store_path", default=None)
@click.option("--out", "out_file", required=True, type=click.Path())
def fit(variant, baseline, corpus_name, which, no_word_intercept, store_path, out_file):
    """Fit the baseline or a surprisal regression on one partition."""
    if baseline == (variant is not None):
        _fail(VALIDATION_EXIT, "pass exactly one of --variant NAME or --baseline")
    store = _open_store(store_path)
    if not store.has(f"corpus/{corpus_name}"):
        _fail(VALIDATION_EXIT, f"corpus {corpus_name!r} not found in store")
    corp = corpus_mod.corpus_from_dict(
        store.read_json(f"corpus/{corpus_name}", "corpus.json")
    )
    expl, held = corpus_mod.split_by_partition(corp)
    observations = expl if which == "exploratory" else held
    table = None
    if variant is not None:
        if not store.has(f"table/{corpus_name}/{variant}"):
            _fail(VALIDATION_EXIT, f"surprisal table for {variant!r} not found in store")
        table = _load_table(store, corpus_name, variant)
        observations = pipeline_mod.eligible_observations(
            observations, {variant: table}
        )
    try:
        spec = pipeline_mod.reading_model_spec(
            corp.modality, table is not None, not no_word_intercept
        )
        data = pipeline_mod.build_fit_data(observations, corp.modality, table)
        model = lme.fit_model(
            data.matrix.values, data.matrix.names, data.y, data.groups, spec
        )
    except Exception as exc:
        _fail(STAGE_EXIT, f"fit failed: {exc}")
    with open(out_file, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
    click.echo(
        f"fit {'baseline' if baseline else variant} on {which}: "
        f"loglik {model.loglik_nats:.4f}, n={model.n_obs}, converged={model.converged}"
    )


@main.command()
@click.option("--config", "config_file", required=True, type=click.Path())
@click.option("--store", "store_path", default=None)
@click.option("--out", "out_dir", default="reports", show_default=True)
def run(config_file, store_path, out_dir):
    """Run the full pipeline from a JSON config."""
    try:
        config = pipeline_mod.PipelineConfig.from_file(config_file)
    except pipeline_mod.ConfigError as exc:
        _fail(VALIDATION_EXIT, str(exc))
    store = _open_store(store_path)
    try:
        result = pipeline_mod.run_pipeline(config, store, out_dir)
    except pipeline_mod.StageError as exc:
        _fail(STAGE_EXIT, str(exc))
    store.write_json(
        "pipeline/config",
        "config.json",
        pipeline_mod.config_to_dict(config),
        {"config": file_fingerprint(config_file)},
    )
    click.echo(f"pipeline complete; reports in {result.out_dir}")
    for path in result.report_files:
        click.echo(f"  {path}")
    if not result.recomputed:
        click.echo("all artifacts were up to date (fingerprint hits)")


@main.command()
@click.option("--family", required=True)
@click.option("--measure", required=True, type=click.Choice(["dll", "mse"]))
@click.option("--corpus", "corpus_name", default="corpus0", show_default=True)
@click.option("--store", "store_path", default=None)
@click.option("--out", "out_file", default=None, help="CSV output path")
@click.option("--plot", "plot_file", default=None, help="SVG output path")
def trend(family, measure, corpus_name, store_path, out_file, plot_file):
    """Slope test of a fit measure against log perplexity for one family.

    Requires `rtool run` artifacts in the store (fits and tables).
    """
    store = _open_store(store_path)
    rows = _family_measure_rows(store, corpus_name, family, measure)
    if len(rows) < 2:
        _fail(VALIDATION_EXIT, f"family {family!r}: need >= 2 fitted variants, found {len(rows)}")
    try:
        fit_res = trend_mod.fit_trend([(p, m) for _, p, m in rows], measure)
    except ValueError as exc:
        _fail(STAGE_EXIT, str(exc))
    line = f"{family},{measure},{fit_res.slope:.9g},{fit_res.stderr:.9g},{fit_res.t_stat:.9g},{fit_res.p_one_tailed:.9g},{fit_res.n}"
    header = "family,metric,slope,stderr,t,p,n"
    if out_file:
        Path(out_file).write_text(header + "\n" + line + "\n", encoding="utf-8")
    click.echo(header)
    click.echo(line)
    if plot_file:
        points = [
            (math.log(p), m, str(i + 1)) for i, (_, p, m) in enumerate(rows)
        ]
        Path(plot_file).write_text(
            svgplot.emit_scatter(
                points,
                line=(fit_res.slope, fit_res.intercept),
                title=f"{family} {measure} vs log perplexity",
                x_label="log perplexity",
                y_label=measure,
            ),
            encoding="utf-8",
        )


def _family_measure_rows(store, corpus_name, family, measure):
    """(variant, perplexity, measure) for one family's variants, ascending
    by parameter count, from the pipeline's summary artifact."""
    name = f"summary/{corpus_name}"
    if not store.has(name):
        _fail(VALIDATION_EXIT, f"no pipeline summary for corpus {corpus_name!r}; run `rtool run`")
    summary = store.read_json(name, "summary.json")
    members = [v for v in summary["variants"] if v["family"] == family]
    members.sort(key=lambda v: v["n_params"])
    return [(v["name"], v["perplexity"], v[measure]) for v in members]


@main.command()
@click.option("--family", required=True)
@click.option("--corpus", "corpus_name", default="corpus0", show_default=True)
@click.option("--k", default=5, show_default=True)
@click.option("--min-frac", default=0.01, show_default=True)
@click.option("--store", "store_path", default=None)
@click.option("--out", "out_dir", required=True)
def subsets(family, corpus_name, k, min_frac, store_path, out_dir):
    """Re-emit subset reports from stored pipeline state.

    The subset search needs annotation inputs, so this command re-reads the
    pipeline config written by `rtool run` into the store.
    """
    store = _open_store(store_path)
    state_name = "pipeline/config"
    if not store.has(state_name):
        _fail(VALIDATION_EXIT, "no pipeline config in store; run `rtool run` first")
    raw = store.read_json(state_name, "config.json")
    config = pipeline_mod.PipelineConfig.from_dict(raw)
    config.k = k
    config.min_frac = min_frac
    try:
        result = pipeline_mod.run_pipeline(config, store, out_dir)
    except pipeline_mod.StageError as exc:
        _fail(STAGE_EXIT, str(exc))
    hits = [
        c.search_results.get(family) for c in result.corpora if family in c.search_results
    ]
    if not hits:
        _fail(VALIDATION_EXIT, f"family {family!r} has no subset report (needs >= 3 variants)")
    click.echo(f"subset reports for {family} in {out_dir}")


if __name__ == "__main__":
    main()
