"""Reduce morphological analyser readings to atomic tags."""

from ambitag.tagset import convert_cohort, convert_reading, default_rules, default_tagset

ts = default_tagset()
rules = default_rules(ts)
print(f"inventory: {len(ts)} tags ({ts.counts_by_class()})")
print(f"rules: {len(rules)}")

# a five-way ambiguous verb/noun cohort, readings as the analyser emits them
readings = [
    ["walk", "<SV>", "<SVO>", "V", "SUBJUNCTIVE", "VFIN"],
    ["walk", "<SV>", "<SVO>", "V", "IMP", "VFIN"],
    ["walk", "<SV>", "<SVO>", "V", "INF"],
    ["walk", "<SV>", "<SVO>", "V", "PRES", "-SG3", "VFIN"],
    ["walk", "N", "NOM", "SG"],
]

for r in readings:
    print(" ".join(r), "->", convert_reading(r, rules, ts).symbol)

cohort = convert_cohort("walk", readings, rules, ts)
print("cohort:", cohort.token.surface, [t.symbol for t in cohort.candidates])
