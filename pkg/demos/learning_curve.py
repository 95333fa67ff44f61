"""Full-disambiguation error as a function of training-set size."""

from ambitag.evalstats import learning_curve
from ambitag.synth import build_synthetic_hmm, sample_corpus

hmm = build_synthetic_hmm(n_tags=10, vocab=800, seed=21)
corpus = sample_corpus(hmm, 60000, seed=22)

sizes = [1000, 2000, 5000, 10000, 20000, 40000]
points = learning_curve(corpus, sizes, eval_words=10000, seed=7, tagset=hmm.tagset)

print(f"{'train words':>12} {'error rate':>11}")
for n, err in points:
    bar = "#" * int(err * 400)
    print(f"{n:>12} {err:>10.2%}  {bar}")
