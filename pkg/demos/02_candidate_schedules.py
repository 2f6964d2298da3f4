"""
Feasible alternatives from the serial SGS
=========================================

Different priority rules produce different feasible schedules. Several
of them usually share a makespan, and only then does a risk criterion have
something to decide.
"""
from collections import Counter

from srbrisk import generate_candidates, load_instance, makespan, same_makespan_candidates, validate
from srbrisk.data import fixture_path

inst = load_instance(fixture_path("j30_01.sm"))

cands = generate_candidates(inst, random_seeds=range(100))
spans = Counter(makespan(c, inst) for c in cands)
print(len(cands), "distinct schedules; makespans:", dict(sorted(spans.items())))

tied = same_makespan_candidates(inst, minimum=4)
for c in tied:
    print(f"{c.label:12s} makespan {makespan(c, inst)}  feasible {validate(c, inst).feasible}")
