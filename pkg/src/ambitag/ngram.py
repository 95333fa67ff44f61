"""Tag-pair state space and blended trigram transition probabilities.

A trigram model over tags t1..tn is encoded as a first-order chain whose
states are tag pairs; a transition (a,b) -> (b',c) is structurally possible
only when b == b'.  Counting pads each sentence as  ⊥ ⊥ t1 .. tn ⊥ , giving
n+1 trigram windows per sentence.  P(c | a,b) blends the trigram relative
frequency with the bigram level, which blends with the unigram level, which
blends with the uniform distribution over the alphabet (tags plus the
boundary symbol), all with the same rule the lexicon uses.
"""

from __future__ import annotations

import numpy as np

from .corpus import AnnotatedSentence
from .errors import ConfigError
from .tagset import Tag, TagSet

BOUNDARY = "<s>"


class StateSpace:
    """Tag-pair states over the alphabet of tags plus the boundary symbol.

    Alphabet ids 0..N-1 are tag indices; id N is the boundary.  States are
    ordered row-major by (prev, cur), so state_index is also the
    deterministic tie-break order.
    """

    def __init__(self, tagset: TagSet):
        self.tagset = tagset
        self.n_symbols = len(tagset) + 1
        self.boundary_id = len(tagset)

    def symbol_name(self, sym_id: int) -> str:
        if sym_id == self.boundary_id:
            return BOUNDARY
        return self.tagset.by_index(sym_id).symbol

    def symbol_id(self, name: str) -> int:
        if name == BOUNDARY:
            return self.boundary_id
        return self.tagset.tag(name).index

    def state_index(self, prev: int, cur: int) -> int:
        if not (0 <= prev < self.n_symbols and 0 <= cur < self.n_symbols):
            raise ConfigError(f"state ({prev},{cur}) outside the state space")
        return prev * self.n_symbols + cur

    def state_pair(self, index: int) -> tuple[int, int]:
        return divmod(index, self.n_symbols)

    def emit_tag(self, state: tuple[int, int]) -> Tag | None:
        """The tag a state emits (its current symbol); None for the boundary."""
        cur = state[1]
        if cur == self.boundary_id:
            return None
        return self.tagset.by_index(cur)

    @property
    def states(self) -> list[tuple[int, int]]:
        n = self.n_symbols
        return [(p, c) for p in range(n) for c in range(n)]


class TransitionModel:
    def __init__(self, tagset: TagSet, k: float = 1.0):
        if k < 0:
            raise ConfigError(f"blend strength must be >= 0, got {k}")
        self.space = StateSpace(tagset)
        self.k = float(k)
        self.trigrams: dict[tuple[int, int, int], int] = {}
        # Lower levels are marginals of the trigram counts, so every
        # blending level is a proper conditional and rows sum to one.
        self._bi: dict[tuple[int, int], int] = {}
        self._bi_ctx: dict[tuple[int, int], int] = {}
        self._uni: dict[int, int] = {}
        self._uni_ctx: dict[int, int] = {}
        self._total = 0
        self._unigram_dist: np.ndarray | None = None
        self._bigram_rows: dict[int, np.ndarray] = {}
        self._rows: dict[tuple[int, int], np.ndarray] = {}

    @classmethod
    def train(
        cls, corpus: list[AnnotatedSentence], tagset: TagSet, k: float = 1.0
    ) -> "TransitionModel":
        model = cls(tagset, k)
        b = model.space.boundary_id
        for sent in corpus:
            seq = [b, b] + [t.index for t in sent.gold] + [b]
            for i in range(len(seq) - 2):
                model.add_trigram(seq[i], seq[i + 1], seq[i + 2])
        model.finalize()
        return model

    def add_trigram(self, a: int, bb: int, c: int, count: int = 1) -> None:
        key = (a, bb, c)
        self.trigrams[key] = self.trigrams.get(key, 0) + count

    def finalize(self) -> None:
        self._bi.clear()
        self._bi_ctx.clear()
        self._uni.clear()
        self._uni_ctx.clear()
        self._rows.clear()
        self._bigram_rows.clear()
        self._unigram_dist = None
        total = 0
        for (a, bb, c), n in self.trigrams.items():
            self._bi[(bb, c)] = self._bi.get((bb, c), 0) + n
            self._bi_ctx[(a, bb)] = self._bi_ctx.get((a, bb), 0) + n
            total += n
        for (bb, c), n in self._bi.items():
            self._uni[c] = self._uni.get(c, 0) + n
            self._uni_ctx[bb] = self._uni_ctx.get(bb, 0) + n
        self._total = total

    # -- blended levels ------------------------------------------------------

    def _uniform(self) -> np.ndarray:
        n = self.space.n_symbols
        return np.full(n, 1.0 / n)

    def unigram_dist(self) -> np.ndarray:
        if self._unigram_dist is None:
            parent = self._uniform()
            if self._total + self.k == 0:
                self._unigram_dist = parent
            else:
                v = parent * self.k
                for c, n in self._uni.items():
                    v[c] += n
                self._unigram_dist = v / (self._total + self.k)
        return self._unigram_dist

    def bigram_row(self, bb: int) -> np.ndarray:
        row = self._bigram_rows.get(bb)
        if row is None:
            parent = self.unigram_dist()
            ctx = self._uni_ctx.get(bb, 0)
            if ctx + self.k == 0:
                row = parent
            else:
                v = parent * self.k
                for c in range(self.space.n_symbols):
                    n = self._bi.get((bb, c), 0)
                    if n:
                        v[c] += n
                row = v / (ctx + self.k)
            self._bigram_rows[bb] = row
        return row

    def row(self, a: int, bb: int) -> np.ndarray:
        """P(next symbol | previous two symbols a, b) over the alphabet."""
        key = (a, bb)
        row = self._rows.get(key)
        if row is None:
            parent = self.bigram_row(bb)
            ctx = self._bi_ctx.get(key, 0)
            if ctx + self.k == 0:
                row = parent
            else:
                v = parent * self.k
                for c in range(self.space.n_symbols):
                    n = self.trigrams.get((a, bb, c), 0)
                    if n:
                        v[c] += n
                row = v / (ctx + self.k)
            self._rows[key] = row
        return row

    def transition_prob(self, s_from: tuple[int, int], s_to: tuple[int, int]) -> float:
        n = self.space.n_symbols
        for s in (s_from, s_to):
            if not (0 <= s[0] < n and 0 <= s[1] < n):
                raise ConfigError(f"state {s} outside the state space")
        if s_from[1] != s_to[0]:
            return 0.0
        return float(self.row(s_from[0], s_from[1])[s_to[1]])
