"""Bracketed syntactic trees: parsing, right-factored binarization, and
alignment with corpus sentences."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator


class TreeParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TreeAlignmentError(ValueError):
    pass


@dataclass(eq=False)
class TreeNode:
    label: str
    children: tuple["TreeNode", ...] = ()
    leaf_index: int | None = None  # set on leaves after parsing

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_preterminal(self) -> bool:
        return len(self.children) == 1 and self.children[0].is_leaf

    def leaves(self) -> list["TreeNode"]:
        if self.is_leaf:
            return [self]
        out: list[TreeNode] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def preterminals(self) -> list["TreeNode"]:
        if self.is_preterminal:
            return [self]
        out: list[TreeNode] = []
        for child in self.children:
            out.extend(child.preterminals())
        return out

    def iter_nodes(self) -> Iterator["TreeNode"]:
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def span(self) -> tuple[int, int]:
        """(first, last) leaf index covered by this node, inclusive."""
        lv = self.leaves()
        return lv[0].leaf_index, lv[-1].leaf_index

    def __repr__(self):
        if self.is_leaf:
            return self.label
        inner = " ".join(repr(c) for c in self.children)
        return f"({self.label} {inner})"


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_tree(text: str, line: int | None = None) -> TreeNode:
    """Parse one bracketed tree, e.g. "(S (NP (N dogs)) (VP (V bark)))"."""
    tokens = _tokenize(text)
    if not tokens:
        raise TreeParseError("empty tree", line)
    pos = 0

    def parse_node() -> TreeNode:
        nonlocal pos
        if tokens[pos] != "(":
            # bare token: a leaf word
            word = tokens[pos]
            pos += 1
            return TreeNode(label=word)
        pos += 1  # consume "("
        if pos >= len(tokens) or tokens[pos] in ("(", ")"):
            raise TreeParseError("expected a category label after '('", line)
        label = tokens[pos]
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            children.append(parse_node())
        if pos >= len(tokens):
            raise TreeParseError(f"unbalanced parentheses (missing ')' for {label!r})", line)
        pos += 1  # consume ")"
        if not children:
            raise TreeParseError(f"category {label!r} has no children", line)
        return TreeNode(label=label, children=tuple(children))

    root = parse_node()
    if pos != len(tokens):
        raise TreeParseError("trailing material after tree", line)
    if root.is_leaf:
        raise TreeParseError("tree has no structure", line)
    for i, leaf in enumerate(root.leaves()):
        leaf.leaf_index = i
    return root


def read_trees(path: str) -> list[TreeNode]:
    """One bracketed tree per line; blank lines are skipped."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            trees.append(parse_tree(text, line=lineno))
    return trees


def read_tree_index(path: str) -> list[tuple[str, int]]:
    """Sidecar index TSV aligning tree lines to (doc_id, sentence_id)."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["doc_id", "sentence_id"]:
            raise TreeParseError("tree index must have header: doc_id<TAB>sentence_id", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            out.append((row[0].strip(), int(row[1])))
    return out


def align_trees(
    trees: list[TreeNode],
    sentences: list[tuple[tuple[str, int], list]],
    index: list[tuple[str, int]] | None = None,
) -> dict[tuple[str, int], TreeNode]:
    """Map (doc_id, sentence_id) -> tree, checking leaf counts against the
    corpus sentence lengths. Without an explicit index, trees are taken in
    corpus sentence order."""
    if index is None:
        if len(trees) != len(sentences):
            raise TreeAlignmentError(
                f"{len(trees)} trees for {len(sentences)} corpus sentences"
            )
        keys = [key for key, _ in sentences]
    else:
        if len(index) != len(trees):
            raise TreeAlignmentError(
                f"tree index has {len(index)} rows for {len(trees)} trees"
            )
        keys = index

    sentence_words = {key: words for key, words in sentences}
    out: dict[tuple[str, int], TreeNode] = {}
    for key, tree in zip(keys, trees):
        if key not in sentence_words:
            raise TreeAlignmentError(f"tree for unknown sentence {key}")
        words = sentence_words[key]
        n_leaves = len(tree.leaves())
        if n_leaves != len(words):
            raise TreeAlignmentError(
                f"sentence {key}: tree has {n_leaves} leaves, corpus has "
                f"{len(words)} words"
            )
        out[key] = tree
    return out


_BIN_MARK = "|"


def binarize_right(node: TreeNode) -> TreeNode:
    """Right-factored binarization: (A c1 c2 c3) -> (A c1 (A| c2 c3)).

    Intermediate nodes carry the parent label plus a marker so they can
    never be mistaken for real constituents. Leaves and unary chains pass
    through unchanged.
    """
    if node.is_leaf:
        return node
    children = [binarize_right(c) for c in node.children]
    if len(children) <= 2:
        return TreeNode(node.label, tuple(children), node.leaf_index)
    right = children[-1]
    for c in reversed(children[1:-1]):
        right = TreeNode(node.label + _BIN_MARK, (c, right))
    return TreeNode(node.label, (children[0], right))


def is_binarization_node(node: TreeNode) -> bool:
    return node.label.endswith(_BIN_MARK)
