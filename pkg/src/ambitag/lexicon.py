"""Reverse-suffix-trie lexicon: smoothed P(tag | word) and the relative
lexical scores P(tag | word) / P(tag) the decoder consumes.

Words are stored spelled backwards, so nodes correspond to suffixes.  A
node's distribution is blended with its parent's, top-down from a uniform
anchor: P_node(x) = (c(node,x) + k * P_parent(x)) / (c(node) + k).  Known
words blend their own terminal counts with the aggregate distributions of
the nearest branching ancestors; unknown words blend the whole matched
path from the root and are then mixed with a shape-class distribution.
Punctuation surfaces bypass the trie entirely (exact-match table).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import (
    SHAPE_ALL_CAPS,
    SHAPE_CAPITALIZED,
    AnnotatedSentence,
    word_shape,
)
from .errors import ConfigError, InconsistentPriorError
from .tagset import PUNCTUATION, WORD, Tag, TagSet


@dataclass
class SmoothingConfig:
    k: float = 1.0  # blend strength toward the parent distribution
    known_lookup_levels: int = 2  # branching points consulted above a known word
    infrequent_cutoff: int = 3  # max count for the infrequent-word class
    known_threshold: int = 1  # min count for a surface to count as known
    support_epsilon: float = 0.0  # candidate tags need blended mass > epsilon
    class_mix: float = 0.5  # weight of the shape-class distribution for unknowns

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ConfigError(f"blend strength must be >= 0, got {self.k}")
        if self.known_lookup_levels < 0:
            raise ConfigError("known_lookup_levels must be >= 0")
        if self.infrequent_cutoff < 0:
            raise ConfigError("infrequent_cutoff must be >= 0")
        if self.known_threshold < 1:
            raise ConfigError("known_threshold must be >= 1")
        if not 0.0 <= self.support_epsilon < 1.0:
            raise ConfigError("support_epsilon must be in [0, 1)")
        if not 0.0 <= self.class_mix <= 1.0:
            raise ConfigError("class_mix must be in [0, 1]")


class TrieNode:
    __slots__ = ("char", "children", "term_counts", "tag_counts", "total")

    def __init__(self, char: str = ""):
        self.char = char
        self.children: dict[str, TrieNode] = {}
        self.term_counts: dict[int, int] = {}  # words ending exactly here
        self.tag_counts: dict[int, int] = {}  # subtree aggregate
        self.total = 0

    @property
    def terminal(self) -> bool:
        return bool(self.term_counts)

    @property
    def branching(self) -> bool:
        return self.terminal or len(self.children) >= 2

    def child(self, char: str) -> TrieNode:
        node = self.children.get(char)
        if node is None:
            node = self.children[char] = TrieNode(char)
        return node

    def aggregate(self) -> None:
        counts = dict(self.term_counts)
        for child in self.children.values():
            child.aggregate()
            for t, c in child.tag_counts.items():
                counts[t] = counts.get(t, 0) + c
        self.tag_counts = counts
        self.total = sum(counts.values())


class LexicalModel:
    def __init__(self, tagset: TagSet, config: SmoothingConfig | None = None):
        self.tagset = tagset
        self.config = config or SmoothingConfig()
        self.root = TrieNode()
        self.word_counts: dict[str, int] = {}
        self.punct_table: dict[str, dict[int, int]] = {}
        n = len(tagset)
        self.priors = np.zeros(n)  # word-tag family
        self.punct_priors = np.zeros(n)
        self.class_dists: dict[str, np.ndarray] = {}
        self._word_support: list[int] = []  # word tags with nonzero prior
        self._anchor = np.zeros(n)  # uniform over the supported word tags
        self._dist_cache: dict[str, np.ndarray] = {}

    # -- training ----------------------------------------------------------

    @classmethod
    def train(
        cls,
        corpus: list[AnnotatedSentence],
        tagset: TagSet,
        config: SmoothingConfig | None = None,
    ) -> "LexicalModel":
        model = cls(tagset, config)
        n = len(tagset)
        word_idx = [t.index for t in tagset.word_tags()]
        punct_idx = [t.index for t in tagset.punctuation_tags()]

        # Surfaces that ever carry a punctuation tag resolve to the
        # exact-match table and stay out of the trie.
        punct_surfaces = {
            tok.surface
            for sent in corpus
            for tok, tag in zip(sent.tokens, sent.gold)
            if tag.cls == PUNCTUATION
        }

        word_tag_counts = np.zeros(n)
        punct_tag_counts = np.zeros(n)
        surface_tags: dict[str, dict[int, int]] = {}
        for sent in corpus:
            for tok, tag in zip(sent.tokens, sent.gold):
                if tag.cls == WORD:
                    word_tag_counts[tag.index] += 1
                else:
                    punct_tag_counts[tag.index] += 1
                if tok.surface in punct_surfaces:
                    row = model.punct_table.setdefault(tok.surface, {})
                    row[tag.index] = row.get(tag.index, 0) + 1
                else:
                    row = surface_tags.setdefault(tok.surface, {})
                    row[tag.index] = row.get(tag.index, 0) + 1

        for surface, counts in surface_tags.items():
            model.word_counts[surface] = sum(counts.values())
            node = model.root
            for ch in reversed(surface):
                node = node.child(ch)
            for t, c in counts.items():
                node.term_counts[t] = node.term_counts.get(t, 0) + c
        model.root.aggregate()

        if word_tag_counts.sum() > 0:
            model.priors = word_tag_counts / word_tag_counts.sum()
        else:
            if not any(len(s) for s in corpus):
                warnings.warn("empty training corpus: uniform lexical priors")
            model.priors[word_idx] = 1.0 / len(word_idx)
        if punct_tag_counts.sum() > 0:
            model.punct_priors = punct_tag_counts / punct_tag_counts.sum()
        elif punct_idx:
            model.punct_priors[punct_idx] = 1.0 / len(punct_idx)

        model._word_support = [i for i in word_idx if model.priors[i] > 0]
        model._anchor = np.zeros(n)
        model._anchor[model._word_support] = 1.0 / len(model._word_support)

        # Shape-class distributions (word-tagged tokens only).
        cap = np.zeros(n)
        allcaps = np.zeros(n)
        infreq = np.zeros(n)
        cutoff = model.config.infrequent_cutoff
        for surface, counts in surface_tags.items():
            shape = word_shape(surface)
            total = model.word_counts[surface]
            for t, c in counts.items():
                if shape == SHAPE_CAPITALIZED:
                    cap[t] += c
                elif shape == SHAPE_ALL_CAPS:
                    allcaps[t] += c
                if total <= cutoff:
                    infreq[t] += c
        infreq_dist = infreq / infreq.sum() if infreq.sum() > 0 else model._anchor.copy()
        model.class_dists = {
            SHAPE_CAPITALIZED: cap / cap.sum() if cap.sum() > 0 else infreq_dist.copy(),
            SHAPE_ALL_CAPS: allcaps / allcaps.sum() if allcaps.sum() > 0 else infreq_dist.copy(),
            "infrequent": infreq_dist,
        }
        return model

    # -- lookup ------------------------------------------------------------

    def _blend(self, counts: dict[int, int], total: int, parent: np.ndarray) -> np.ndarray:
        k = self.config.k
        if total + k == 0:  # k=0 on an empty node: defer to the parent
            return parent
        v = parent * k
        for t, c in counts.items():
            v[t] += c
        return v / (total + k)

    def _match_path(self, surface: str) -> list[TrieNode]:
        """Root plus the nodes along the longest matching reversed suffix."""
        path = [self.root]
        node = self.root
        for ch in reversed(surface):
            node = node.children.get(ch)
            if node is None:
                break
            path.append(node)
        return path

    def _known_chain(self, path: list[TrieNode]) -> list[TrieNode]:
        """Terminal node plus its nearest branching strict ancestors."""
        chain = [path[-1]]
        levels = self.config.known_lookup_levels
        for node in reversed(path[:-1]):
            if levels == 0:
                break
            if node.branching:
                chain.append(node)
                levels -= 1
        chain.reverse()
        return chain

    def _dist_vector(self, surface: str) -> np.ndarray:
        cached = self._dist_cache.get(surface)
        if cached is not None:
            return cached
        if surface in self.punct_table:
            counts = self.punct_table[surface]
            v = np.zeros(len(self.tagset))
            for t, c in counts.items():
                v[t] = c
            v /= v.sum()
        elif self.word_counts.get(surface, 0) >= self.config.known_threshold:
            path = self._match_path(surface)
            dist = self._anchor
            chain = self._known_chain(path)
            for node in chain[:-1]:
                dist = self._blend(node.tag_counts, node.total, dist)
            terminal = chain[-1]
            v = self._blend(terminal.term_counts, sum(terminal.term_counts.values()), dist)
        else:
            dist = self._anchor
            for node in self._match_path(surface):
                dist = self._blend(node.tag_counts, node.total, dist)
            w = self.config.class_mix
            v = (1.0 - w) * dist + w * self._class_dist(surface)
        self._dist_cache[surface] = v
        return v

    def _class_dist(self, surface: str) -> np.ndarray:
        shape = word_shape(surface)
        if shape in (SHAPE_CAPITALIZED, SHAPE_ALL_CAPS):
            return self.class_dists[shape]
        return self.class_dists["infrequent"]

    def tag_distribution(self, surface: str) -> dict[Tag, float]:
        v = self._dist_vector(surface)
        return {self.tagset.by_index(i): p for i, p in enumerate(v) if p > 0.0}

    def converse_lexical_prob(self, surface: str, tag: Tag) -> float:
        cond = self._dist_vector(surface)[tag.index]
        prior = (self.priors if tag.cls == WORD else self.punct_priors)[tag.index]
        if prior == 0.0:
            if cond > 0.0:
                raise InconsistentPriorError(
                    f"inconsistent prior: tag {tag.symbol} has zero prior "
                    f"but P({tag.symbol} | {surface!r}) = {cond}"
                )
            return 0.0
        return cond / prior

    def candidate_tags(self, surface: str) -> list[Tag]:
        """Tags with blended mass above support_epsilon, most probable first."""
        v = self._dist_vector(surface)
        eps = self.config.support_epsilon
        idx = [i for i in range(len(v)) if v[i] > eps]
        idx.sort(key=lambda i: (-v[i], i))
        return [self.tagset.by_index(i) for i in idx]

    def is_known(self, surface: str) -> bool:
        return (
            surface in self.punct_table
            or self.word_counts.get(surface, 0) >= self.config.known_threshold
        )
