"""Error rate versus residual ambiguity as the retention threshold drops."""

from ambitag.evalstats import score, tradeoff_sweep
from ambitag.lexicon import LexicalModel
from ambitag.ngram import TransitionModel
from ambitag.synth import build_synthetic_hmm, sample_corpus

hmm = build_synthetic_hmm(n_tags=10, vocab=800, seed=11)
train = sample_corpus(hmm, 40000, seed=12)
held_out = sample_corpus(hmm, 8000, seed=13)

lex = LexicalModel.train(train, hmm.tagset)
trans = TransitionModel.train(train, hmm.tagset)

rep = score(held_out, lex, trans, threshold=1.0)
print(f"full disambiguation: {rep.error_rate:.2%} error on {rep.words} words")
print(f"unseen-word share of errors: {rep.unseen_errors}/{rep.errors}")

# keeping more than one tag per word buys accuracy with leftover ambiguity
table = tradeoff_sweep(held_out, lex, trans, [1.0, 0.9, 0.5, 0.2, 0.1, 0.05, 0.0])
print()
print(table.to_table())
