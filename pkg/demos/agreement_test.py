"""Is a low disagreement rate between two annotators explainable by chance?

One-sided test: under the null the annotators make independent errors at
rate p0, so their observed disagreement should hover near p0.  A rate at or
below the critical value rejects the null.
"""

from ambitag.evalstats import agreement_critical_rate, agreement_test

n = 55000
for p0 in (0.03, 0.02, 0.008):
    crit = agreement_critical_rate(n, p0, alpha=0.05)
    print(f"n={n} p0={p0:<5} critical rate {crit:.4f}")

# 21 differing positions out of 55000 words
observed = 21 / 55000
test = agreement_test(n, p0=0.03, alpha=0.05, observed=observed)
print(f"\nobserved {observed:.6f} vs critical {test.critical_rate:.6f}")
print("reject the null" if test.reject else "cannot reject the null")

# smaller samples need a bigger gap before the test can say anything
for m in (500, 5000, 50000):
    print(f"n={m:<6} critical {agreement_critical_rate(m, 0.03, 0.05):.4f}")
