"""Per-word linguistic properties derived from gold syntactic trees:
categorial POS with a coarse-class mapping, capitalization-based named
entities, dependency-locality integration cost, and left-corner structural
features (embedding depth, center-embedding ends, pre-sentential position,
conjunct ends, adjectival noun phrases)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import ReadingCorpus
from .trees import TreeAlignmentError, TreeNode, binarize_right

COARSE_CLASSES = (
    "noun",
    "adjective",
    "verb",
    "modal",
    "conjunction",
    "relativizer",
    "pronoun_np",
    "other",
)

_DEFAULT_POS_MAP = {
    "NN": "noun",
    "NNS": "noun",
    "NNP": "noun",
    "NNPS": "noun",
    "N": "noun",
    "JJ": "adjective",
    "JJR": "adjective",
    "JJS": "adjective",
    "ADJ": "adjective",
    "VB": "verb",
    "VBD": "verb",
    "VBG": "verb",
    "VBN": "verb",
    "VBP": "verb",
    "VBZ": "verb",
    "V": "verb",
    "MD": "modal",
    "CC": "conjunction",
    "CONJ": "conjunction",
    "WDT": "relativizer",
    "WP": "relativizer",
    "REL": "relativizer",
    "PRP": "pronoun_np",
    "PRO": "pronoun_np",
}


@dataclass(frozen=True)
class DependencyArc:
    """A backward-looking dependency between two words of one sentence,
    0-based indices."""

    dependent_idx: int
    head_idx: int

    def __post_init__(self):
        if self.dependent_idx == self.head_idx:
            raise ValueError("dependent and head must differ")
        if min(self.dependent_idx, self.head_idx) < 0:
            raise ValueError("negative word index")

    @property
    def right(self) -> int:
        return max(self.dependent_idx, self.head_idx)

    @property
    def left(self) -> int:
        return min(self.dependent_idx, self.head_idx)


@dataclass(frozen=True)
class DltPolicy:
    """Integration-cost convention: strict interveners per completed arc,
    plus one unit when the integrating word is itself a discourse referent
    (once per word, however many arcs complete there)."""

    include_self_referent: bool = True


@dataclass(frozen=True)
class AnnotationConfig:
    pos_map: Mapping[str, str] = field(default_factory=lambda: dict(_DEFAULT_POS_MAP))
    finite_verb_tags: frozenset[str] = frozenset({"VBD", "VBZ", "VBP"})
    ne_exclusions: frozenset[str] = frozenset({"I"})
    sentential_labels: frozenset[str] = frozenset({"S", "SBAR", "SINV", "SQ"})
    np_labels: frozenset[str] = frozenset({"NP"})
    cc_tags: frozenset[str] = frozenset({"CC"})
    dlt: DltPolicy = DltPolicy()

    def coarse_class(self, fine: str) -> str:
        return self.pos_map.get(fine, "other")


@dataclass(frozen=True)
class WordProperties:
    pos_category: str
    pos_class: str
    is_named_entity: bool
    dlt_cost: int
    embedding_depth: int
    ends_center_embedding_len: int
    before_sentential_clause: bool
    ends_first_conjunct: bool
    ends_first_conjunct_np: bool
    begins_adjectival_np: bool


def mark_named_entities(
    words: Sequence[str], config: AnnotationConfig = AnnotationConfig()
) -> list[bool]:
    """Capitalized, not sentence-initial, and not excluded (the pronoun "I"
    plus any configured lexicon)."""
    return [
        i > 0 and w[:1].isupper() and w not in config.ne_exclusions
        for i, w in enumerate(words)
    ]


def dlt_costs(
    n_words: int,
    arcs: Sequence[DependencyArc],
    is_referent: Sequence[bool],
    policy: DltPolicy = DltPolicy(),
) -> list[int]:
    """Integration cost at each word: for every arc whose rightmost endpoint
    is that word, count discourse referents strictly between the endpoints;
    referent words add one more unit for themselves."""
    if len(is_referent) != n_words:
        raise ValueError("is_referent length mismatch")
    cost = [0] * n_words
    completes_arc = [False] * n_words
    for arc in arcs:
        if arc.right >= n_words:
            raise ValueError(f"arc {arc} out of range for {n_words} words")
        cost[arc.right] += sum(
            1 for k in range(arc.left + 1, arc.right) if is_referent[k]
        )
        completes_arc[arc.right] = True
    if policy.include_self_referent:
        for j in range(n_words):
            if is_referent[j]:
                cost[j] += 1
    return cost


# ---------------------------------------------------------------------------
# Left-corner traversal


@dataclass
class _Fragment:
    root: TreeNode | None  # None marks the top-level sentence prediction
    awaited: TreeNode


class _LeftCornerWalk:
    """Eager left-corner traversal of a binarized gold tree.

    The stack holds incomplete constituents (derivation fragments with one
    open need at the right frontier). It starts with a predicted root, so
    material assembled before connecting to the root prediction counts as
    embedded. A completed left corner extends the fragment below when it
    begins that fragment's awaited category (grammatical match); otherwise
    it opens a new fragment, which is what makes center-embedded
    constituents, and only those, grow the stack.
    """

    def __init__(self, root: TreeNode):
        self.parent: dict[int, TreeNode] = {}
        self.child_index: dict[int, int] = {}
        self.n_leaves: dict[int, int] = {}
        for node in root.iter_nodes():
            if len(node.children) > 2:
                raise ValueError("left-corner traversal requires a binarized tree")
            self.n_leaves[id(node)] = len(node.leaves()) if node.children else 1
            for i, child in enumerate(node.children):
                self.parent[id(child)] = node
                self.child_index[id(child)] = i
        self.root = root

    def run(self) -> tuple[list[int], list[int]]:
        leaves = self.root.leaves()
        if not leaves:
            raise ValueError("empty tree")
        stack: list[_Fragment] = [_Fragment(root=None, awaited=self.root)]
        depths: list[int] = []
        ce_lens: list[int] = []
        finished = False
        for leaf in leaves:
            if finished:
                raise ValueError("leaves remain after the root completed")
            c: TreeNode = leaf
            ce_len = 0
            while True:
                if stack and stack[-1].awaited is c:
                    frag = stack.pop()
                    if frag.root is None:
                        finished = True
                        break
                    if stack:
                        ce_len = max(ce_len, self.n_leaves[id(frag.root)])
                    c = frag.root
                    continue
                p = self.parent.get(id(c))
                if p is None:
                    raise ValueError("detached constituent in left-corner walk")
                if self.child_index[id(c)] == 0:
                    if len(p.children) == 1:
                        c = p
                        continue
                    nxt = p.children[1]
                    if stack and stack[-1].awaited is p:
                        stack[-1].awaited = nxt
                    else:
                        stack.append(_Fragment(root=p, awaited=nxt))
                    break
                raise ValueError(
                    "left-corner walk reached an unattached non-initial child"
                )
            depths.append(len(stack))
            ce_lens.append(ce_len)
        if not finished or stack:
            raise ValueError("tree did not complete at the last word")
        return depths, ce_lens


def leftcorner_features(tree: TreeNode) -> tuple[list[int], list[int]]:
    """Per-word (embedding_depth, ends_center_embedding_len) from the
    right-factored binarization of a gold tree.

    embedding_depth is the number of incomplete constituents after the
    word. ends_center_embedding_len is the word count of the largest
    constituent closing at the word that was opened and closed above at
    least one other incomplete constituent (0 if none); the "four or more
    words" cut is applied downstream, where subsets are defined.
    """
    if tree is None or tree.is_leaf:
        raise ValueError("cannot traverse an empty tree")
    return _LeftCornerWalk(binarize_right(tree)).run()


# ---------------------------------------------------------------------------
# Features read directly off the original (n-ary) tree


def _starts_by_word(tree: TreeNode) -> dict[int, list[TreeNode]]:
    out: dict[int, list[TreeNode]] = {}
    for node in tree.iter_nodes():
        if node.is_leaf or node.is_preterminal:
            continue
        first = node.leaves()[0].leaf_index
        out.setdefault(first, []).append(node)
    return out


def before_sentential_clause_flags(
    tree: TreeNode, config: AnnotationConfig
) -> list[bool]:
    n = len(tree.leaves())
    starts = _starts_by_word(tree)
    flags = [False] * n
    for t in range(n - 1):
        flags[t] = any(
            node.label in config.sentential_labels for node in starts.get(t + 1, ())
        )
    return flags


def _is_coordination(node: TreeNode, config: AnnotationConfig) -> bool:
    if len(node.children) < 3:
        return False
    cc = [
        i
        for i, ch in enumerate(node.children)
        if ch.is_preterminal and ch.label in config.cc_tags
    ]
    return any(0 < i < len(node.children) - 1 for i in cc)


def conjunct_flags(
    tree: TreeNode, config: AnnotationConfig
) -> tuple[list[bool], list[bool]]:
    n = len(tree.leaves())
    ends_any = [False] * n
    ends_np = [False] * n
    for node in tree.iter_nodes():
        if not _is_coordination(node, config):
            continue
        first = node.children[0]
        if first.is_preterminal and first.label in config.cc_tags:
            continue
        last_word = first.leaves()[-1].leaf_index
        ends_any[last_word] = True
        if first.label in config.np_labels:
            ends_np[last_word] = True
    return ends_any, ends_np


def adjectival_np_flags(tree: TreeNode, config: AnnotationConfig) -> list[bool]:
    """First words of noun phrases that modify a following nominal head
    inside a larger noun phrase (e.g. the inner NP of "a [family size]
    pack"). An NP followed by a clause or PP is a modified head, not an
    adjectival modifier, so some later sibling must be a noun."""
    n = len(tree.leaves())
    flags = [False] * n
    for node in tree.iter_nodes():
        if node.label not in config.np_labels or _is_coordination(node, config):
            continue
        for i, child in enumerate(node.children[:-1]):
            if child.label not in config.np_labels or child.is_leaf:
                continue
            head_follows = any(
                sib.is_preterminal and config.coarse_class(sib.label) == "noun"
                for sib in node.children[i + 1 :]
            )
            if head_follows:
                flags[child.leaves()[0].leaf_index] = True
    return flags


# ---------------------------------------------------------------------------
# Assembly


def annotate_sentence(
    tree: TreeNode,
    words: Sequence[str],
    arcs: Sequence[DependencyArc] = (),
    config: AnnotationConfig = AnnotationConfig(),
) -> list[WordProperties]:
    leaves = tree.leaves()
    if len(leaves) != len(words):
        raise TreeAlignmentError(
            f"tree has {len(leaves)} leaves, sentence has {len(words)} words"
        )
    for leaf, word in zip(leaves, words):
        if leaf.label != word:
            raise TreeAlignmentError(
                f"tree leaf {leaf.label!r} does not match word {word!r}"
            )

    fine = [pt.label for pt in tree.preterminals()]
    coarse = [config.coarse_class(f) for f in fine]
    named = mark_named_entities(words, config)
    referent = [
        cls == "noun" or f in config.finite_verb_tags for cls, f in zip(coarse, fine)
    ]
    dlt = dlt_costs(len(words), arcs, referent, config.dlt)
    depths, ce_lens = leftcorner_features(tree)
    before_s = before_sentential_clause_flags(tree, config)
    ends_cj, ends_cj_np = conjunct_flags(tree, config)
    adj_np = adjectival_np_flags(tree, config)

    return [
        WordProperties(
            pos_category=fine[i],
            pos_class=coarse[i],
            is_named_entity=named[i],
            dlt_cost=dlt[i],
            embedding_depth=depths[i],
            ends_center_embedding_len=ce_lens[i],
            before_sentential_clause=before_s[i],
            ends_first_conjunct=ends_cj[i],
            ends_first_conjunct_np=ends_cj_np[i],
            begins_adjectival_np=adj_np[i],
        )
        for i in range(len(words))
    ]


def read_dependencies(path: str) -> dict[tuple[str, int], list[DependencyArc]]:
    """TSV of `doc_id sentence_id dependent_pos head_pos` with 1-based word
    positions matching the corpus."""
    out: dict[tuple[str, int], list[DependencyArc]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        expected = ["doc_id", "sentence_id", "dependent_pos", "head_pos"]
        if header is None or [h.strip() for h in header[:4]] != expected:
            raise ValueError(f"dependency TSV must have header {expected}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            key = (row[0].strip(), int(row[1]))
            out.setdefault(key, []).append(
                DependencyArc(
                    dependent_idx=int(row[2]) - 1, head_idx=int(row[3]) - 1
                )
            )
    return out


def annotate_corpus(
    corpus: ReadingCorpus,
    trees_by_sentence: Mapping[tuple[str, int], TreeNode],
    arcs_by_sentence: Mapping[tuple[str, int], Sequence[DependencyArc]] | None = None,
    config: AnnotationConfig = AnnotationConfig(),
) -> dict[int, WordProperties]:
    """Properties for every corpus word, keyed by corpus_word_idx."""
    arcs_by_sentence = arcs_by_sentence or {}
    table: dict[int, WordProperties] = {}
    for key, tokens in corpus.sentences():
        tree = trees_by_sentence.get(key)
        if tree is None:
            raise TreeAlignmentError(f"no tree for sentence {key}")
        props = annotate_sentence(
            tree,
            [t.surface for t in tokens],
            arcs_by_sentence.get(key, ()),
            config,
        )
        for tok, prop in zip(tokens, props):
            table[tok.corpus_word_idx] = prop
    return table


_PROPERTY_COLUMNS = (
    "doc_id",
    "sentence_id",
    "word_pos",
    "surface",
    "pos_category",
    "pos_class",
    "is_named_entity",
    "dlt_cost",
    "embedding_depth",
    "ends_center_embedding_len",
    "before_sentential_clause",
    "ends_first_conjunct",
    "ends_first_conjunct_np",
    "begins_adjectival_np",
)


def write_properties(
    table: Mapping[int, WordProperties], corpus: ReadingCorpus, path: str
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(_PROPERTY_COLUMNS)
        for tok in corpus.tokens:
            p = table[tok.corpus_word_idx]
            writer.writerow(
                [
                    tok.doc_id,
                    tok.sentence_id,
                    tok.word_pos,
                    tok.surface,
                    p.pos_category,
                    p.pos_class,
                    int(p.is_named_entity),
                    p.dlt_cost,
                    p.embedding_depth,
                    p.ends_center_embedding_len,
                    int(p.before_sentential_clause),
                    int(p.ends_first_conjunct),
                    int(p.ends_first_conjunct_np),
                    int(p.begins_adjectival_np),
                ]
            )
