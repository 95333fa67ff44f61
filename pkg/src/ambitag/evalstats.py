"""Scoring, error-rate/ambiguity tradeoff sweeps, learning curves,
binomial confidence intervals, and the annotator-agreement test.

A word counts as an error when its gold tag is missing from the retained
set, so error rates pair naturally with residual ambiguity (mean retained
tags per word).  Error mass is attributed to previously unseen words
(surface absent from the training lexicon) and to lexical tag omissions
(gold tag absent from the word's candidate set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import ndtri

from .corpus import AnnotatedSentence, word_count
from .decoder import (
    MODE_POSTERIOR,
    SentenceDecode,
    apply_threshold,
    cohorts_for_tokens,
    decode_sentence,
)
from .errors import InputError
from .lexicon import LexicalModel, SmoothingConfig
from .ngram import TransitionModel
from .tagset import TagSet


@dataclass
class EvalReport:
    words: int
    errors: int
    error_rate: float
    ambiguity: float  # mean retained tags per word
    unseen_words: int
    unseen_errors: int
    unseen_word_error_rate: float  # unseen-word errors / all words
    omissions: int
    lexical_omission_rate: float  # gold tag absent from candidates / all words


@dataclass
class TradeoffTable:
    rows: list[tuple[float, float, float]]  # (threshold, ambiguity, error_rate)

    def to_csv(self) -> str:
        lines = ["threshold,ambiguity,error_rate"]
        lines += [f"{t},{a:.6f},{e:.6f}" for t, a, e in self.rows]
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        lines = [f"{'Threshold':>10} {'Tags/word':>10} {'Error rate':>11}"]
        lines += [f"{t:>10.4g} {a:>10.3f} {e:>10.2%}" for t, a, e in self.rows]
        return "\n".join(lines) + "\n"


@dataclass
class AgreementTest:
    n: int
    p0: float
    alpha: float
    critical_rate: float
    observed: float | None = None
    reject: bool | None = field(default=None)

    def __post_init__(self) -> None:
        if self.observed is not None:
            self.reject = self.observed <= self.critical_rate


def decode_corpus(
    lex: LexicalModel, trans: TransitionModel, corpus: list[AnnotatedSentence]
) -> list[SentenceDecode]:
    """One threshold-free decode per sentence, lattices from the lexicon."""
    return [
        decode_sentence(lex, trans, cohorts_for_tokens(lex, sent.tokens))
        for sent in corpus
    ]


def score_decodes(
    gold: list[AnnotatedSentence],
    decodes: list[SentenceDecode],
    lex: LexicalModel,
    threshold: float,
    mode: str = MODE_POSTERIOR,
) -> EvalReport:
    if len(gold) != len(decodes):
        raise InputError(
            f"corpus/output length mismatch: {len(gold)} vs {len(decodes)} sentences"
        )
    words = errors = retained_total = 0
    unseen = unseen_err = omissions = 0
    for si, (sent, dec) in enumerate(zip(gold, decodes)):
        if len(sent) != len(dec.cohorts):
            raise InputError(
                f"sentence {si}: {len(sent)} gold tokens vs {len(dec.cohorts)} output tokens"
            )
        result = apply_threshold(dec, threshold, mode)
        for tok, gold_tag, word in zip(sent.tokens, sent.gold, result.words):
            words += 1
            retained_total += len(word.retained)
            is_unseen = not lex.is_known(tok.surface)
            if is_unseen:
                unseen += 1
            if gold_tag not in word.posterior:  # not even a candidate
                omissions += 1
            if gold_tag not in word.retained:
                errors += 1
                if is_unseen:
                    unseen_err += 1
    if words == 0:
        raise InputError("empty evaluation corpus")
    return EvalReport(
        words=words,
        errors=errors,
        error_rate=errors / words,
        ambiguity=retained_total / words,
        unseen_words=unseen,
        unseen_errors=unseen_err,
        unseen_word_error_rate=unseen_err / words,
        omissions=omissions,
        lexical_omission_rate=omissions / words,
    )


def score(
    gold: list[AnnotatedSentence],
    lex: LexicalModel,
    trans: TransitionModel,
    threshold: float = 1.0,
    mode: str = MODE_POSTERIOR,
) -> EvalReport:
    return score_decodes(gold, decode_corpus(lex, trans, gold), lex, threshold, mode)


def tradeoff_sweep(
    gold: list[AnnotatedSentence],
    lex: LexicalModel,
    trans: TransitionModel,
    thresholds: list[float],
    mode: str = MODE_POSTERIOR,
) -> TradeoffTable:
    decodes = decode_corpus(lex, trans, gold)
    rows = []
    for theta in thresholds:
        rep = score_decodes(gold, decodes, lex, theta, mode)
        rows.append((theta, rep.ambiguity, rep.error_rate))
    return TradeoffTable(rows)


def learning_curve(
    corpus: list[AnnotatedSentence],
    sizes: list[int],
    eval_words: int,
    seed: int,
    tagset: TagSet,
    lex_config: SmoothingConfig | None = None,
    k_trans: float = 1.0,
    mode: str = MODE_POSTERIOR,
) -> list[tuple[int, float]]:
    from .corpus import split_for_learning_curve

    eval_slice, slices = split_for_learning_curve(corpus, sizes, eval_words, seed)
    points = []
    for train_slice in slices:
        lex = LexicalModel.train(train_slice, tagset, lex_config)
        trans = TransitionModel.train(train_slice, tagset, k_trans)
        rep = score(eval_slice, lex, trans, threshold=1.0, mode=mode)
        points.append((word_count(train_slice), rep.error_rate))
    return points


def binomial_ci_halfwidth(p_hat: float, n: int, level: float = 0.95) -> float:
    """Normal-approximation half-width z * sqrt(p(1-p)/n)."""
    if not 0.0 <= p_hat <= 1.0:
        raise InputError(f"rate must be in [0, 1], got {p_hat}")
    if n < 1:
        raise InputError(f"sample size must be >= 1, got {n}")
    z = float(ndtri(0.5 + level / 2.0))
    return z * math.sqrt(p_hat * (1.0 - p_hat) / n)


def agreement_critical_rate(n: int, p0: float, alpha: float) -> float:
    """One-sided critical disagreement rate p0 + z_alpha * sqrt(p0(1-p0)/n).

    Observing a rate at or below this rejects (at level alpha) the null
    hypothesis that the true disagreement probability is p0.
    """
    if n < 1:
        raise InputError(f"sample size must be >= 1, got {n}")
    if not 0.0 < p0 < 1.0:
        raise InputError(f"null rate must be in (0, 1), got {p0}")
    if not 0.0 < alpha < 1.0:
        raise InputError(f"significance level must be in (0, 1), got {alpha}")
    return p0 + float(ndtri(alpha)) * math.sqrt(p0 * (1.0 - p0) / n)


def agreement_test(n: int, p0: float, alpha: float, observed: float | None = None) -> AgreementTest:
    return AgreementTest(
        n=n, p0=p0, alpha=alpha,
        critical_rate=agreement_critical_rate(n, p0, alpha),
        observed=observed,
    )


def disagreement_rate(
    a: list[AnnotatedSentence], b: list[AnnotatedSentence]
) -> tuple[float, list[tuple[int, int, str, str, str]]]:
    """Fraction of positions where two annotations differ, plus the diffs
    as (sentence, position, surface, tag_a, tag_b) for adjudication."""
    if len(a) != len(b):
        raise InputError(f"corpora differ in sentence count: {len(a)} vs {len(b)}")
    diffs = []
    words = 0
    for si, (sa, sb) in enumerate(zip(a, b)):
        if len(sa) != len(sb):
            raise InputError(f"sentence {si}: length {len(sa)} vs {len(sb)}")
        for wi, (ta, tb) in enumerate(zip(sa.tokens, sb.tokens)):
            if ta.surface != tb.surface:
                raise InputError(
                    f"sentence {si}, word {wi}: token mismatch {ta.surface!r} vs {tb.surface!r}"
                )
            words += 1
            if sa.gold[wi] != sb.gold[wi]:
                diffs.append((si, wi, ta.surface, sa.gold[wi].symbol, sb.gold[wi].symbol))
    if words == 0:
        raise InputError("empty corpora")
    return len(diffs) / words, diffs
