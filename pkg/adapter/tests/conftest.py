import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

TRAINING_TEXT = [
    "the dog chased a cat across the yard while birds sang loudly",
    "dogs that chase cats run and the crowd saw Elvis Presley smile",
    "she said that a child might eat the cake before the reporter arrived",
    "the senator attacked the error and the farmer fed ducks and geese",
    "he bought a family size pack then I saw Paris Hilton walk home",
    "when night fell owls hooted and people walked home quietly",
    "zq zq zq wug wug blick dax fep toma gazzer pilk norg " * 4,
    "abcdefghijklmnopqrstuvwxyz ABCDEFGHIJKLMNOPQRSTUVWXYZ 0123456789",
]


def build_tiny_checkpoint(path: Path, n_embd: int, n_layer: int, seed: int) -> Path:
    """A GPT-2-architecture model with random weights and a byte-level BPE
    tokenizer trained on local text, saved like any pretrained checkpoint."""
    import torch
    from tokenizers import ByteLevelBPETokenizer
    from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

    path.mkdir(parents=True, exist_ok=True)
    tok = ByteLevelBPETokenizer()
    tok.train_from_iterator(
        TRAINING_TEXT, vocab_size=500, min_frequency=1, special_tokens=["<|endoftext|>"]
    )
    tok.save(str(path / "tokenizer.json"))
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_file=str(path / "tokenizer.json"),
        bos_token="<|endoftext|>",
        eos_token="<|endoftext|>",
    )
    tokenizer.save_pretrained(str(path))
    torch.manual_seed(seed)
    config = GPT2Config(
        vocab_size=len(tokenizer),
        n_positions=1024,
        n_embd=n_embd,
        n_layer=n_layer,
        n_head=2,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    model = GPT2LMHeadModel(config)
    model.save_pretrained(str(path))
    return path


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> Path:
    return build_tiny_checkpoint(
        tmp_path_factory.mktemp("tinylm") / "tiny-a", n_embd=16, n_layer=1, seed=7
    )


@pytest.fixture(scope="session")
def tiny_model_family(tmp_path_factory):
    """Three checkpoints of increasing width, a miniature model family."""
    root = tmp_path_factory.mktemp("family")
    return [
        build_tiny_checkpoint(root / "tiny-124", n_embd=16, n_layer=1, seed=11),
        build_tiny_checkpoint(root / "tiny-355", n_embd=24, n_layer=2, seed=12),
        build_tiny_checkpoint(root / "tiny-774", n_embd=32, n_layer=2, seed=13),
    ]


@pytest.fixture(scope="session")
def loaded_tiny(tiny_model_dir):
    from lm_adapter.scoring import load_model

    return load_model(str(tiny_model_dir))


def _read_sentences():
    """Words of the ten bundled sentences: after '(' comes a label; any other
    non-parenthesis symbol is a leaf."""
    sentences = []
    for line in (DATA / "annot_trees.txt").read_text().strip().splitlines():
        tokens = line.replace("(", " ( ").replace(")", " ) ").split()
        words, i = [], 0
        while i < len(tokens):
            if tokens[i] == "(":
                i += 2
            elif tokens[i] == ")":
                i += 1
            else:
                words.append(tokens[i])
                i += 1
        sentences.append(words)
    return sentences


@pytest.fixture(scope="session")
def desk_inputs(tmp_path_factory):
    """A small synthetic reading-time sample over the bundled sentences:
    corpus TSV, document texts, trees, and dependencies."""
    import math

    import numpy as np

    root = tmp_path_factory.mktemp("desk")
    rng = np.random.default_rng(606)
    sentences = _read_sentences()
    docs = {"d1": sentences[:5], "d2": sentences[5:]}

    rows = ["subject_id\tdoc_id\tsentence_id\tword_pos\tsurface\trt_ms"]
    sid = 0
    sent_ids = {}
    for doc, sents in docs.items():
        for sent in sents:
            sid += 1
            sent_ids[sid] = (doc, sent)
    for subj in range(1, 7):
        for sid2, (doc, sent) in sent_ids.items():
            for pos, word in enumerate(sent, start=1):
                rt = float(
                    np.clip(
                        rng.lognormal(math.log(300) + 0.02 * len(word), 0.25), 101, 2999
                    )
                )
                rows.append(f"{subj}\t{doc}\t{sid2}\t{pos}\t{word}\t{rt:.2f}")
    (root / "corpus.tsv").write_text("\n".join(rows) + "\n")

    docs_rows = ["doc_id\ttext"]
    for doc, sents in docs.items():
        docs_rows.append(f"{doc}\t" + " ".join(w for sent in sents for w in sent))
    (root / "docs.tsv").write_text("\n".join(docs_rows) + "\n")

    trees_out, index_out = [], ["doc_id\tsentence_id"]
    tree_lines = (DATA / "annot_trees.txt").read_text().strip().splitlines()
    dep_in = (DATA / "annot_deps.tsv").read_text().strip().splitlines()[1:]
    deps_out = ["doc_id\tsentence_id\tdependent_pos\thead_pos"]
    for sid2, (doc, _) in sent_ids.items():
        trees_out.append(tree_lines[sid2 - 1])
        index_out.append(f"{doc}\t{sid2}")
        for line in dep_in:
            _, s, dep, head = line.split("\t")
            if int(s) == sid2:
                deps_out.append(f"{doc}\t{sid2}\t{dep}\t{head}")
    (root / "trees.txt").write_text("\n".join(trees_out) + "\n")
    (root / "trees_index.tsv").write_text("\n".join(index_out) + "\n")
    (root / "deps.tsv").write_text("\n".join(deps_out) + "\n")
    return root


@pytest.fixture(scope="session")
def desk_run(desk_inputs, tiny_model_family, tmp_path_factory):
    """Score the sample with all three checkpoints via the adapter CLI and
    run the downstream pipeline via its CLI; returns (reports_dir, files)."""
    import subprocess

    root = desk_inputs
    work = tmp_path_factory.mktemp("deskrun")
    variants = []
    for model_dir in tiny_model_family:
        out = work / f"{model_dir.name}.tokens.tsv"
        proc = subprocess.run(
            [
                "adapter",
                "--model", str(model_dir),
                "--context", "1024",
                "--docs", str(root / "docs.tsv"),
                "--out", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        sidecar = Path(str(out).rsplit(".", 1)[0] + ".meta.json")
        assert sidecar.is_file()
        variants.append({"meta": str(sidecar), "tokens": str(out)})

    config = {
        "corpora": [
            {
                "name": "desk",
                "file": str(root / "corpus.tsv"),
                "modality": "spr",
                "trees": str(root / "trees.txt"),
                "trees_index": str(root / "trees_index.tsv"),
                "deps": str(root / "deps.tsv"),
            }
        ],
        "variants": variants,
        "k": 3,
        "min_frac": 0.01,
        "fit_opts": {
            "line_search_maxiter": 20,
            "line_search_xatol": 1e-6,
            "deviance_tol": 1e-7,
            "max_cycles": 30,
        },
    }
    config_path = work / "config.json"
    config_path.write_text(json.dumps(config, indent=2))
    reports = work / "reports"
    proc = subprocess.run(
        [
            "rtool", "run",
            "--config", str(config_path),
            "--store", str(work / "store"),
            "--out", str(reports),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr + proc.stdout
    return reports, {p.name for p in reports.iterdir()}
