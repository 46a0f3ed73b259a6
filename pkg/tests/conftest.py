import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_manifest() -> dict:
    with open(FIXTURES / "corpus_manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def annot_manifest() -> dict:
    with open(FIXTURES / "annot_manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def annotated_fixture():
    """The 10-sentence corpus with trees, dependencies, and computed
    properties."""
    from rtool import corpus as cm
    from rtool.annotate import annotate_corpus, read_dependencies
    from rtool.trees import align_trees, read_trees

    corp = cm.ingest(str(FIXTURES / "annot_corpus.tsv"), "spr")
    trees = read_trees(str(FIXTURES / "annot_trees.txt"))
    tree_map = align_trees(trees, corp.sentences())
    arcs = read_dependencies(str(FIXTURES / "annot_deps.tsv"))
    props = annotate_corpus(corp, tree_map, arcs)
    return corp, tree_map, arcs, props


@pytest.fixture(scope="session")
def e2e_bundle(tmp_path_factory):
    """Generated synthetic corpus + 3 mock variants, with the pipeline run
    once into a session store; reused by pipeline, CLI, and acceptance
    tests."""
    from e2e_fixture import build
    from rtool.pipeline import PipelineConfig, run_pipeline
    from rtool.store import AnalysisStore

    root = tmp_path_factory.mktemp("e2e")
    raw_config = build(root / "inputs")
    config = PipelineConfig.from_dict(raw_config)
    store_path = root / "store"
    reports = root / "reports"
    result = run_pipeline(config, AnalysisStore(store_path), reports)
    return {
        "root": root,
        "raw_config": raw_config,
        "config": config,
        "config_file": root / "inputs" / "config.json",
        "store_path": store_path,
        "reports": reports,
        "result": result,
    }
