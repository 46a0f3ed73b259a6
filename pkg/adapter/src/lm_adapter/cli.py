"""adapter: score documents with a causal LM and emit the surprisal TSV."""

from __future__ import annotations

import sys

import click

from .scoring import AdapterError, score_documents_to_files


@click.command()
@click.option("--model", "model_path", required=True, help="model name or local path")
@click.option("--context", "context_size", required=True, type=int)
@click.option("--docs", "docs_path", required=True, type=click.Path(exists=True),
              help="TSV of doc_id<TAB>text, one document per line")
@click.option("--out", "out_path", required=True, type=click.Path())
def main(model_path, context_size, docs_path, out_path):
    """Compute per-token surprisal for each document independently and write
    the canonical TSV plus a metadata JSON sidecar next to it."""
    try:
        info = score_documents_to_files(model_path, context_size, docs_path, out_path)
    except AdapterError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"scored {info['n_docs']} document(s), {info['n_tokens']} tokens -> {out_path}"
    )
    click.echo(f"metadata sidecar: {info['sidecar']}")


if __name__ == "__main__":
    main()
