"""Forward-backward and Viterbi decoding over cohort lattices, plus
threshold-controlled multi-tag retention.

The forward/backward tables use the relative lexical scores
P(tag|word)/P(tag) in place of emission probabilities; per-position
normalization makes the posteriors exact and the per-word tag posterior is
the sum of state posteriors sharing the emitted tag.  Viterbi runs in the
log domain with first-maximum (= smallest predecessor state index)
tie-breaking.  Retention keeps every tag whose posterior clears the
threshold and never drops the primary tag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Cohort
from .errors import DeadLatticeError
from .lexicon import LexicalModel
from .ngram import TransitionModel
from .tagset import Tag

MODE_VITERBI = "viterbi"
MODE_POSTERIOR = "posterior"


@dataclass
class Lattice:
    """Per-position candidates, lexical scores, and transition tensors."""

    cohorts: list[Cohort]
    cand: list[list[Tag]]  # sorted by tag index per position
    ids: list[list[int]]
    aprime: list[np.ndarray]
    init: np.ndarray  # P(c | boundary, boundary) over ids[0]
    tensors: list[np.ndarray]  # step t->t+1: (|C_t-1|, |C_t|, |C_t+1|)


def build_lattice(lex: LexicalModel, trans: TransitionModel, cohorts: list[Cohort]) -> Lattice:
    if not cohorts:
        raise ValueError("empty sentence")
    cand = [sorted(c.candidates, key=lambda t: t.index) for c in cohorts]
    ids = [[t.index for t in cs] for cs in cand]
    aprime = [
        np.array([lex.converse_lexical_prob(c.token.surface, t) for t in cs])
        for c, cs in zip(cohorts, cand)
    ]
    b = trans.space.boundary_id
    init = trans.row(b, b).take(ids[0])
    tensors = []
    prev_ids = [b]
    for t in range(len(cohorts) - 1):
        cur_ids, next_ids = ids[t], ids[t + 1]
        m = np.empty((len(prev_ids), len(cur_ids), len(next_ids)))
        for i, a in enumerate(prev_ids):
            for j, bb in enumerate(cur_ids):
                m[i, j, :] = trans.row(a, bb).take(next_ids)
        tensors.append(m)
        prev_ids = cur_ids
    return Lattice(cohorts, cand, ids, aprime, init, tensors)


def forward(lattice: Lattice) -> tuple[list[np.ndarray], list[float]]:
    """Scaled forward tables (each sums to 1) and the scaling factors."""
    alphas: list[np.ndarray] = []
    scales: list[float] = []
    a = (lattice.init * lattice.aprime[0])[None, :]
    for t in range(len(lattice.cohorts)):
        if t > 0:
            a = np.einsum("ab,abc->bc", alphas[t - 1], lattice.tensors[t - 1])
            a = a * lattice.aprime[t][None, :]
        s = float(a.sum())
        if s <= 0.0:
            raise DeadLatticeError(
                f"dead lattice at position {t + 1} "
                f"({lattice.cohorts[t].token.surface!r}): no path has nonzero probability"
            )
        alphas.append(a / s)
        scales.append(s)
    return alphas, scales


def backward(lattice: Lattice, scales: list[float]) -> list[np.ndarray]:
    """Backward tables scaled with the forward run's factors (shared scales)."""
    T = len(lattice.cohorts)
    betas: list[np.ndarray] = [None] * T  # type: ignore[list-item]
    betas[T - 1] = np.ones((lattice.tensors[-1].shape[1] if T > 1 else 1, len(lattice.ids[T - 1])))
    for t in range(T - 2, -1, -1):
        nxt = lattice.tensors[t] * lattice.aprime[t + 1][None, None, :]
        betas[t] = np.einsum("abc,bc->ab", nxt, betas[t + 1]) / scales[t + 1]
    return betas


def state_posteriors(alphas: list[np.ndarray], betas: list[np.ndarray]) -> list[np.ndarray]:
    # With shared scaling the elementwise product is already normalized.
    return [a * b for a, b in zip(alphas, betas)]


def tag_posteriors(lattice: Lattice, gammas: list[np.ndarray]) -> list[dict[int, float]]:
    out = []
    for t, g in enumerate(gammas):
        mass = g.sum(axis=0)
        out.append({tag_id: float(p) for tag_id, p in zip(lattice.ids[t], mass)})
    return out


def viterbi(lattice: Lattice) -> tuple[list[int], float]:
    """Most probable tag-id sequence and its log score."""
    with np.errstate(divide="ignore"):
        log_ap = [np.log(ap) for ap in lattice.aprime]
        score = (np.log(lattice.init) + log_ap[0])[None, :]
        log_tensors = [np.log(m) for m in lattice.tensors]
    backptr: list[np.ndarray] = []
    for t in range(1, len(lattice.cohorts)):
        if not np.isfinite(score.max()):
            raise DeadLatticeError(
                f"dead lattice at position {t} "
                f"({lattice.cohorts[t - 1].token.surface!r}): no path has nonzero probability"
            )
        combined = score[:, :, None] + log_tensors[t - 1]
        backptr.append(combined.argmax(axis=0))  # first max = smallest predecessor
        score = combined.max(axis=0) + log_ap[t][None, :]
    best_logp = float(score.max())
    if not np.isfinite(best_logp):
        t = len(lattice.cohorts)
        raise DeadLatticeError(
            f"dead lattice at position {t} "
            f"({lattice.cohorts[t - 1].token.surface!r}): no path has nonzero probability"
        )
    flat = int(score.argmax())  # row-major first max = smallest state index
    prev_idx, cur_idx = divmod(flat, score.shape[1])
    rev = [cur_idx]
    for t in range(len(lattice.cohorts) - 1, 0, -1):
        rev.append(prev_idx)
        if t > 1:
            prev_idx = int(backptr[t - 1][prev_idx, rev[-2]])
    rev.reverse()
    return [lattice.ids[t][j] for t, j in enumerate(rev)], best_logp


@dataclass
class SentenceDecode:
    """Threshold-free decode: posteriors and the Viterbi path for one sentence."""

    cohorts: list[Cohort]
    candidates: list[list[Tag]]
    posteriors: list[dict[int, float]]
    viterbi_ids: list[int]
    viterbi_logp: float
    log_likelihood: float  # log of the total relative-score path mass


@dataclass
class WordResult:
    posterior: dict[Tag, float]
    viterbi_tag: Tag
    primary: Tag
    retained: list[Tag]


@dataclass
class TaggingResult:
    words: list[WordResult]
    mode: str
    threshold: float
    viterbi_logp: float


def decode_sentence(lex: LexicalModel, trans: TransitionModel, cohorts: list[Cohort]) -> SentenceDecode:
    lattice = build_lattice(lex, trans, cohorts)
    alphas, scales = forward(lattice)
    betas = backward(lattice, scales)
    gammas = state_posteriors(alphas, betas)
    posts = tag_posteriors(lattice, gammas)
    vit_ids, vit_logp = viterbi(lattice)
    return SentenceDecode(
        cohorts=cohorts,
        candidates=lattice.cand,
        posteriors=posts,
        viterbi_ids=vit_ids,
        viterbi_logp=vit_logp,
        log_likelihood=float(sum(np.log(s) for s in scales)),
    )


def apply_threshold(
    decode: SentenceDecode, threshold: float, mode: str = MODE_POSTERIOR
) -> TaggingResult:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if mode not in (MODE_VITERBI, MODE_POSTERIOR):
        raise ValueError(f"unknown mode {mode!r}")
    words = []
    for t, cands in enumerate(decode.candidates):
        post = decode.posteriors[t]
        by_index = {tag.index: tag for tag in cands}
        viterbi_tag = by_index[decode.viterbi_ids[t]]
        # posterior argmax; ties break toward the smaller tag index
        arg_id = max(post, key=lambda i: (post[i], -i))
        primary = viterbi_tag if mode == MODE_VITERBI else by_index[arg_id]
        keep = {i for i in post if post[i] >= threshold}
        keep.add(primary.index)
        order = sorted(keep, key=lambda i: (-post[i], i))
        words.append(
            WordResult(
                posterior={by_index[i]: post[i] for i in post},
                viterbi_tag=viterbi_tag,
                primary=primary,
                retained=[by_index[i] for i in order],
            )
        )
    return TaggingResult(
        words=words, mode=mode, threshold=threshold, viterbi_logp=decode.viterbi_logp
    )


def tag_with_threshold(
    lex: LexicalModel,
    trans: TransitionModel,
    cohorts: list[Cohort],
    threshold: float,
    mode: str = MODE_POSTERIOR,
) -> TaggingResult:
    return apply_threshold(decode_sentence(lex, trans, cohorts), threshold, mode)


def cohorts_for_tokens(lex: LexicalModel, tokens) -> list[Cohort]:
    """Build a sentence lattice from the model's own candidate sets."""
    return [Cohort(tok, lex.candidate_tags(tok.surface)) for tok in tokens]
