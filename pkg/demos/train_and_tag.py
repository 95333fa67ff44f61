"""Train on a synthetic corpus and tag a sentence at a few thresholds."""

from ambitag.decoder import apply_threshold, cohorts_for_tokens, decode_sentence
from ambitag.lexicon import LexicalModel
from ambitag.ngram import TransitionModel
from ambitag.synth import build_synthetic_hmm, sample_corpus

hmm = build_synthetic_hmm(n_tags=10, vocab=600, seed=3)
corpus = sample_corpus(hmm, 10000, seed=4)
print(f"corpus: {len(corpus)} sentences, {sum(len(s) for s in corpus)} words")

lex = LexicalModel.train(corpus, hmm.tagset)
trans = TransitionModel.train(corpus, hmm.tagset)

sent = corpus[42]
print("sentence:", " ".join(t.surface for t in sent.tokens))
print("gold:    ", " ".join(t.symbol for t in sent.gold))

# decode once, then re-threshold as often as you like
decode = decode_sentence(lex, trans, cohorts_for_tokens(lex, sent.tokens))
for theta in (1.0, 0.5, 0.1):
    result = apply_threshold(decode, theta)
    out = []
    for w in result.words:
        tags = "/".join(t.symbol for t in w.retained)
        out.append(tags)
    print(f"theta={theta:<4}", " ".join(out))

# per-word posteriors for the first word
w = apply_threshold(decode, 0.0).words[0]
print("posteriors for", sent.tokens[0].surface)
for tag, p in sorted(w.posterior.items(), key=lambda kv: -kv[1])[:4]:
    print(f"  {tag.symbol:<4} {p:.4f}")
